//! Adaptive Gauss–Kronrod integration of `exp(φ(y))` for log-valued `φ`.
//!
//! The integral is accumulated relative to a running offset, the largest
//! `φ` seen so far, so integrands that live entirely below `e^-700` (light
//! tails far out) still produce a finite `ln I`. When a larger `φ` shows up
//! later, all stored partial results are rescaled to the new offset.
//!
//! The interval is split into two edge pieces of relative width
//! `edge_split` and a middle piece. On the edges the substitution
//! `y = a + t²` (resp. `y = b - t²`) removes `|y - a|^(-1/2)`-type
//! singularities; each edge is further cut at geometric breakpoints toward
//! the endpoint so that mass concentrated near the edge is not missed by the
//! first 15-point rule.
//!
//! The middle piece is scanned for an interior maximum of `φ` before
//! integration, and a piece a few peak widths wide is placed around it, so
//! a single narrow spike (the mid-point mass of a light-tailed
//! self-convolution) is not missed. Several separated spikes narrower than
//! the scan spacing can still go unnoticed.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerances for the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Absolute tolerance, in units of the largest integrand value seen.
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
    /// Fraction of the interval peeled off each endpoint for the
    /// square-root substitution, in `(0, 1/2)`.
    pub edge_split: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-9,
            max_depth: 40,
            edge_split: 0.05,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.max_depth > 0
            && self.edge_split > 0.0
            && self.edge_split < 0.5;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid quadrature spec {self:?}")))
        }
    }
}

/// Result of [`integrate_exp`]: `ln ∫ exp(φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegral {
    pub log_value: f64,
    /// Estimated relative error of `exp(log_value)`.
    pub rel_error: f64,
    pub evaluations: usize,
}

impl LogIntegral {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

// Kronrod 15-point nodes/weights and the embedded 7-point Gauss weights,
// kept at the precision of the published tables.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Map {
    Identity,
    /// `y = a + t²`
    Left,
    /// `y = b - t²`
    Right,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
    depth: u32,
    /// Integral and error, scaled by `exp(-offset)`.
    result: f64,
    error: f64,
}

struct State<'f> {
    phi: &'f dyn Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    offset: f64,
    evaluations: usize,
    done: Vec<Segment>,
    active: Vec<Segment>,
}

impl State<'_> {
    fn log_integrand(&self, map: Map, t: f64) -> f64 {
        match map {
            Map::Identity => (self.phi)(t, self.b - t),
            Map::Left => (self.phi)(self.a + t * t, (self.b - self.a) - t * t) + (2.0 * t).ln(),
            Map::Right => (self.phi)(self.b - t * t, t * t) + (2.0 * t).ln(),
        }
    }

    fn rescale(&mut self, new_offset: f64) {
        let factor = (self.offset - new_offset).exp();
        for s in self.active.iter_mut().chain(self.done.iter_mut()) {
            s.result *= factor;
            s.error *= factor;
        }
        self.offset = new_offset;
    }

    /// Applies the 15-point rule to `[lo, hi]` and stores the segment.
    fn push(&mut self, map: Map, lo: f64, hi: f64, depth: u32) -> Result<()> {
        let centre = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut logs = [f64::NEG_INFINITY; 15];
        logs[7] = self.log_integrand(map, centre);
        for j in 0..7 {
            logs[j] = self.log_integrand(map, centre - half * XGK[j]);
            logs[14 - j] = self.log_integrand(map, centre + half * XGK[j]);
        }
        self.evaluations += 15;
        if logs.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::QuadratureFailure {
                reason: format!("non-finite integrand on [{lo}, {hi}]"),
                log_estimate: f64::NAN,
                rel_error: f64::INFINITY,
            });
        }
        let local_max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if local_max > self.offset {
            self.rescale(local_max);
        }
        let offset = self.offset;
        let f: Vec<f64> = if offset == f64::NEG_INFINITY {
            vec![0.0; 15]
        } else {
            logs.iter().map(|v| (v - offset).exp()).collect()
        };

        let fc = f[7];
        let mut resk = fc * WGK[7];
        let mut resg = fc * WG[3];
        let mut resabs = resk.abs();
        for j in 0..7 {
            let pair = f[j] + f[14 - j];
            resk += WGK[j] * pair;
            resabs += WGK[j] * (f[j].abs() + f[14 - j].abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * pair;
            }
        }
        let reskh = 0.5 * resk;
        let mut resasc = WGK[7] * (fc - reskh).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((f[j] - reskh).abs() + (f[14 - j] - reskh).abs());
        }
        let result = resk * half;
        resabs *= half;
        resasc *= half;
        let mut error = ((resk - resg) * half).abs();
        if resasc != 0.0 && error != 0.0 {
            error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            error = error.max(50.0 * f64::EPSILON * resabs);
        }
        self.active.push(Segment {
            map,
            lo,
            hi,
            depth,
            result,
            error,
        });
        Ok(())
    }

    fn phi_at(&mut self, y: f64) -> f64 {
        self.evaluations += 1;
        (self.phi)(y, self.b - y)
    }

    /// Breakpoints of the middle piece: eight uniform pieces, plus a piece
    /// of half-width `PEAK_WIDTHS` peak widths around an interior maximum.
    fn middle_breaks(&mut self, m_lo: f64, m_hi: f64) -> Vec<f64> {
        const MIDDLE_PIECES: usize = 8;
        const PEAK_WIDTHS: f64 = 8.0;
        let step = (m_hi - m_lo) / MIDDLE_PIECES as f64;
        let mut pts: Vec<f64> = (0..MIDDLE_PIECES).map(|i| m_lo + step * i as f64).collect();
        pts.push(m_hi);
        if let Some((c, w)) = self.locate_peak(m_lo, m_hi) {
            for p in [c - PEAK_WIDTHS * w, c, c + PEAK_WIDTHS * w] {
                if p > m_lo && p < m_hi {
                    pts.push(p);
                }
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
        }
        pts
    }

    /// Finds an interior maximum of `φ` on `[lo, hi]` from a coarse scan
    /// followed by golden-section refinement, and estimates its width from
    /// the curvature of `φ`. Working with `φ` rather than `exp(φ)` means a
    /// spike is found even when it sits far above everything the quadrature
    /// nodes would otherwise see. Returns `None` for a maximum at an end or
    /// a `φ` that is not locally concave.
    fn locate_peak(&mut self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        const SCAN: usize = 64;
        let spacing = (hi - lo) / SCAN as f64;
        let mut best = (f64::NEG_INFINITY, 0usize);
        for i in 0..=SCAN {
            let v = self.phi_at(lo + spacing * i as f64);
            if v > best.0 {
                best = (v, i);
            }
        }
        if !best.0.is_finite() {
            return None;
        }
        let i = best.1;
        let mut left = lo + spacing * i.saturating_sub(1) as f64;
        let mut right = lo + spacing * (i + 1).min(SCAN) as f64;

        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut p = right - ratio * (right - left);
        let mut q = left + ratio * (right - left);
        let mut fp = self.phi_at(p);
        let mut fq = self.phi_at(q);
        for _ in 0..80 {
            if right - left <= 1e-13 * (hi - lo) {
                break;
            }
            if fp >= fq {
                right = q;
                q = p;
                fq = fp;
                p = right - ratio * (right - left);
                fp = self.phi_at(p);
            } else {
                left = p;
                p = q;
                fp = fq;
                q = left + ratio * (right - left);
                fq = self.phi_at(q);
            }
        }
        let (c, fc) = if fp >= fq { (p, fp) } else { (q, fq) };
        let margin = 1e-9 * (hi - lo);
        if c - lo <= margin || hi - c <= margin || !fc.is_finite() {
            return None;
        }

        let mut s = spacing.min(c - lo).min(hi - c);
        let mut width = f64::NAN;
        for _ in 0..4 {
            let d2 = (self.phi_at(c + s) - 2.0 * fc + self.phi_at(c - s)) / (s * s);
            if !(d2 < 0.0) || !d2.is_finite() {
                return None;
            }
            width = (-d2).sqrt().recip();
            if (width - s).abs() <= 0.5 * s {
                break;
            }
            s = width.min(c - lo).min(hi - c);
        }
        Some((c, width))
    }

    fn totals(&self) -> (f64, f64) {
        let mut total = 0.0;
        let mut err = 0.0;
        for s in self.done.iter().chain(self.active.iter()) {
            total += s.result;
            err += s.error;
        }
        (total, err)
    }
}

/// Multiple of `ε |φ_max|` accepted as relative error when `φ` is so large in
/// magnitude that its own rounding dominates `rel_tol`.
const PHI_ROUNDING: f64 = 64.0;

/// Maximum number of segments before giving up.
const MAX_SEGMENTS: usize = 4000;

/// Geometric breakpoints of `[0, t_max]` toward 0.
fn edge_breaks(t_max: f64) -> Vec<f64> {
    let mut pts = vec![t_max];
    let floor = t_max * 1e-6;
    let mut t = t_max;
    while t > floor {
        t *= 0.5;
        pts.push(t);
    }
    pts.push(0.0);
    pts.reverse();
    pts
}

/// Computes `ln ∫_a^b exp(φ(y)) dy`.
///
/// Returns `-inf` for an empty interval or an integrand that is `-inf`
/// everywhere it is sampled.
pub fn integrate_exp(phi: &dyn Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<LogIntegral> {
    integrate_exp_split(&|y, _| phi(y), a, b, spec)
}

/// As [`integrate_exp`], with `φ` called as `φ(y, b - y)`. The second
/// argument is formed without cancellation near `b`, which matters when `b`
/// is large and the integrand depends on the distance to it.
pub fn integrate_exp_split(
    phi: &dyn Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<LogIntegral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("integration bounds must be finite, got [{a}, {b}]")));
    }
    if !(b > a) {
        return Ok(LogIntegral {
            log_value: f64::NEG_INFINITY,
            rel_error: 0.0,
            evaluations: 0,
        });
    }
    let mut st = State {
        phi,
        a,
        b,
        offset: f64::NEG_INFINITY,
        evaluations: 0,
        done: Vec::new(),
        active: Vec::new(),
    };

    let edge = spec.edge_split * (b - a);
    let t_edge = edge.sqrt();
    let breaks = edge_breaks(t_edge);
    for w in breaks.windows(2) {
        st.push(Map::Left, w[0], w[1], 0)?;
    }
    let (m_lo, m_hi) = (a + edge, b - edge);
    for w in st.middle_breaks(m_lo, m_hi).windows(2) {
        st.push(Map::Identity, w[0], w[1], 0)?;
    }
    for w in breaks.windows(2) {
        st.push(Map::Right, w[0], w[1], 0)?;
    }

    loop {
        let (total, err) = st.totals();
        // φ is only known to about ε|φ|, which bounds the relative accuracy of exp(φ).
        let noise = PHI_ROUNDING * f64::EPSILON * st.offset.abs();
        let tol = spec.abs_tol.max(spec.rel_tol.max(noise) * total.abs());
        if err <= tol || total == 0.0 && err == 0.0 {
            return Ok(finish(&st, total, err));
        }
        let worst = st
            .active
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(failure(&st, total, err, "no subdividable segment left"));
        };
        let seg = st.active.swap_remove(i);
        let mid = 0.5 * (seg.lo + seg.hi);
        let splittable = seg.depth < spec.max_depth && mid > seg.lo && mid < seg.hi;
        if !splittable {
            st.done.push(seg);
            continue;
        }
        if st.active.len() + st.done.len() >= MAX_SEGMENTS {
            st.active.push(seg);
            return Err(failure(&st, total, err, "segment budget exhausted"));
        }
        st.push(seg.map, seg.lo, mid, seg.depth + 1)?;
        st.push(seg.map, mid, seg.hi, seg.depth + 1)?;
    }
}

fn finish(st: &State<'_>, total: f64, err: f64) -> LogIntegral {
    let (log_value, rel_error) = if total > 0.0 {
        (st.offset + total.ln(), err / total)
    } else {
        (f64::NEG_INFINITY, 0.0)
    };
    LogIntegral {
        log_value,
        rel_error,
        evaluations: st.evaluations,
    }
}

fn failure(st: &State<'_>, total: f64, err: f64, reason: &str) -> Error {
    let est = finish(st, total, err);
    Error::QuadratureFailure {
        reason: reason.to_string(),
        log_estimate: est.log_value,
        rel_error: est.rel_error,
    }
}

/// Like [`integrate_exp`], but falls back to the best available estimate
/// when the tolerance is not met. Used where a value must be produced (model
/// evaluation inside other integrals); the explicit operations surface the
/// failure instead.
pub(crate) fn integrate_exp_lenient(phi: &dyn Fn(f64, f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> f64 {
    match integrate_exp_split(phi, a, b, spec) {
        Ok(v) => v.log_value,
        Err(Error::QuadratureFailure { log_estimate, .. }) => log_estimate,
        Err(_) => f64::NAN,
    }
}
