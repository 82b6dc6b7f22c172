//! Finite-range estimates of liminf/limsup ratio quantities, Matuszewska
//! indices, the hazard limits `M1`/`M2` and Potter-type constants.
//!
//! A limit `x → ∞` is realized on a geometric grid `x_k = x_start r^k`. The
//! liminf (limsup) is estimated by the minimum (maximum) over the last `W`
//! grid points, and the least-squares slope against `ln x` over the same
//! window is reported so that callers can see whether the sequence has
//! settled.

use crate::error::{Error, Result};
use crate::float_serde;
use crate::models::DistributionModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Ratio estimates below this are treated as zero (index `+inf`).
pub const SATURATION_LOW: f64 = 1e-300;
/// Ratio estimates above this are treated as infinite (index `-inf`).
pub const SATURATION_HIGH: f64 = 1e300;

/// Geometric evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_start: f64,
    /// Multiplier between consecutive points.
    pub ratio: f64,
    pub count: usize,
    /// Number of trailing points used for inf/sup.
    pub window: usize,
}

impl GridSpec {
    pub const DEFAULT_COUNT: usize = 80;
    pub const DEFAULT_WINDOW: usize = 16;
    pub const MIN_WINDOW: usize = 8;

    /// Quarter-octave grid of 80 points starting at `4 support_low + 1`.
    pub fn default_for(support_low: f64) -> Self {
        GridSpec {
            x_start: 4.0 * support_low + 1.0,
            ratio: 2f64.powf(0.25),
            count: Self::DEFAULT_COUNT,
            window: Self::DEFAULT_WINDOW,
        }
    }

    pub fn for_model(model: &dyn DistributionModel) -> Self {
        Self::default_for(model.support_low())
    }

    pub fn validate(&self, support_low: f64) -> Result<()> {
        if !(self.x_start > support_low) || !self.x_start.is_finite() {
            return Err(Error::Grid(format!(
                "x_start = {} must exceed the support edge {support_low}",
                self.x_start
            )));
        }
        if !(self.ratio > 1.0) || !self.ratio.is_finite() {
            return Err(Error::Grid(format!("grid ratio must be > 1, got {}", self.ratio)));
        }
        if self.count == 0 {
            return Err(Error::Grid("grid count must be positive".into()));
        }
        if self.window < Self::MIN_WINDOW || self.window > self.count {
            return Err(Error::Grid(format!(
                "window must satisfy {} <= W <= K, got W={} K={}",
                Self::MIN_WINDOW,
                self.window,
                self.count
            )));
        }
        if !self.x_max().is_finite() {
            return Err(Error::Grid("grid overflows f64".into()));
        }
        Ok(())
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x_start * self.ratio.powf(k as f64)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }

    pub fn x_max(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn window_start(&self) -> usize {
        self.count - self.window
    }

    /// Width of the window in `ln x`.
    pub fn window_log_span(&self) -> f64 {
        (self.window.saturating_sub(1)) as f64 * self.ratio.ln()
    }

    /// Same grid with `count` changed and the window kept.
    pub fn with_count(&self, count: usize) -> Self {
        GridSpec { count, ..*self }
    }
}

/// Windowed estimate of a liminf (`lower`) and limsup (`upper`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    #[serde(with = "float_serde")]
    pub lower: f64,
    #[serde(with = "float_serde")]
    pub upper: f64,
    /// Least-squares slope of the sequence against `ln x` over the window.
    #[serde(with = "float_serde")]
    pub trend: f64,
    /// Value at the largest grid point.
    #[serde(with = "float_serde")]
    pub last: f64,
    pub grid: GridSpec,
}

impl LimitEstimate {
    /// Constant sequence.
    pub fn constant(value: f64, grid: GridSpec) -> Self {
        LimitEstimate {
            lower: value,
            upper: value,
            trend: 0.0,
            last: value,
            grid,
        }
    }
}

/// Values of some quantity along the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSequence {
    pub grid: GridSpec,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledSequence {
    pub fn estimate(&self) -> LimitEstimate {
        let start = self.grid.window_start();
        let xs = &self.xs[start..];
        let vs = &self.values[start..];
        let lower = vs.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        LimitEstimate {
            lower,
            upper,
            trend: ols(&lx, vs).map_or(f64::NAN, |f| f.slope),
            last: *vs.last().unwrap_or(&f64::NAN),
            grid: self.grid,
        }
    }

    /// Log-log slope `d ln v / d ln x` over the trailing half of the grid
    /// (at least one window). Values must be positive; a bounded sequence
    /// has growth near 0, `x^α` has growth `α`.
    pub fn growth(&self) -> f64 {
        let n = self.xs.len();
        let span = (n / 2).max(self.grid.window).min(n);
        let lx: Vec<f64> = self.xs[n - span..].iter().map(|x| x.ln()).collect();
        let lv: Vec<f64> = self.values[n - span..].iter().map(|v| v.ln()).collect();
        ols(&lx, &lv).map_or(f64::NAN, |f| f.slope)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares in a fixed summation order. `None` when fewer
/// than two points or any value is non-finite.
pub(crate) fn ols(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n || xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Samples `exp(g(u x_k) - g(x_k))` on the grid.
pub fn ratio_sequence<G>(g: &G, u: f64, grid: &GridSpec) -> Result<SampledSequence>
where
    G: Fn(f64) -> f64 + Sync + ?Sized,
{
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Grid(format!("ratio argument u must be positive, got {u}")));
    }
    if !(u * grid.x_max()).is_finite() {
        return Err(Error::Grid(format!("u * x_max overflows for u = {u}, x_max = {}", grid.x_max())));
    }
    let xs = grid.points();
    let values: Vec<Result<f64>> = xs
        .par_iter()
        .map(|&x| {
            let base = g(x);
            if !base.is_finite() {
                return Err(Error::Grid(format!("g({x}) = {base} is not finite")));
            }
            if u == 1.0 {
                return Ok(1.0);
            }
            let shifted = g(u * x);
            if shifted.is_nan() || shifted == f64::INFINITY {
                return Err(Error::Grid(format!("g({}) = {shifted}", u * x)));
            }
            Ok((shifted - base).exp())
        })
        .collect();
    Ok(SampledSequence {
        grid: *grid,
        xs,
        values: values.into_iter().collect::<Result<_>>()?,
    })
}

/// Windowed estimate of `g⋆(u)` (lower) and `g^⋆(u)` (upper), where
/// `g⋆(u) = liminf g(ux)/g(x)` and `g` is given in log form.
pub fn ratio_limit<G>(g: &G, u: f64, grid: &GridSpec) -> Result<LimitEstimate>
where
    G: Fn(f64) -> f64 + Sync + ?Sized,
{
    Ok(ratio_sequence(g, u, grid)?.estimate())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexFlag {
    #[serde(rename = "gamma=+inf")]
    GammaPosInfinite,
    #[serde(rename = "gamma=-inf")]
    GammaNegInfinite,
    #[serde(rename = "delta=+inf")]
    DeltaPosInfinite,
    #[serde(rename = "delta=-inf")]
    DeltaNegInfinite,
}

/// Estimated upper (`gamma`) and lower (`delta`) Matuszewska indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    #[serde(with = "float_serde")]
    pub gamma: f64,
    #[serde(with = "float_serde")]
    pub delta: f64,
    /// Largest absolute deviation of a point from its fitted line.
    pub residual: f64,
    pub u_grid: Vec<f64>,
    pub flags: Vec<IndexFlag>,
}

pub const DEFAULT_INDEX_U_GRID: [f64; 5] = [2.0, 4.0, 8.0, 16.0, 32.0];

/// One index from the per-`u` ratio estimates: slope of `-ln v` against `ln u`.
fn index_from_ratios(us: &[f64], vals: &[f64], which: &str) -> Result<(f64, f64, Option<i8>)> {
    #[derive(PartialEq, Clone, Copy)]
    enum Kind {
        Finite,
        Zero,
        Inf,
    }
    let kinds: Vec<Kind> = vals
        .iter()
        .map(|&v| {
            if v.is_nan() {
                Err(Error::DegenerateRatio(format!("{which}: NaN ratio estimate")))
            } else if v < SATURATION_LOW {
                Ok(Kind::Zero)
            } else if v > SATURATION_HIGH {
                Ok(Kind::Inf)
            } else {
                Ok(Kind::Finite)
            }
        })
        .collect::<Result<_>>()?;

    let first_sat = kinds.iter().position(|k| *k != Kind::Finite);
    match first_sat {
        None => {
            let lu: Vec<f64> = us.iter().map(|u| u.ln()).collect();
            let y: Vec<f64> = vals.iter().map(|v| -v.ln()).collect();
            let fit = ols(&lu, &y).ok_or_else(|| Error::DegenerateRatio(format!("{which}: regression failed")))?;
            let resid = lu
                .iter()
                .zip(&y)
                .map(|(x, y)| (y - fit.intercept - fit.slope * x).abs())
                .fold(0.0, f64::max);
            Ok((fit.slope, resid, None))
        }
        Some(i) => {
            // Ratios are monotone in u, so saturation must persist to the largest u.
            let kind = kinds[i];
            if kinds[i..].iter().any(|k| *k != kind) {
                return Err(Error::DegenerateRatio(format!(
                    "{which}: saturated estimates are not monotone in u: {vals:?}"
                )));
            }
            if kind == Kind::Zero {
                Ok((f64::INFINITY, 0.0, Some(1)))
            } else {
                Ok((f64::NEG_INFINITY, 0.0, Some(-1)))
            }
        }
    }
}

/// Estimates the Matuszewska indices of the positive function `exp(g)`.
///
/// The inner limit over `x` is taken first (via [`ratio_limit`] for each
/// `u`), then `gamma` is the regression slope of `-ln g⋆(u)` against `ln u`
/// and `delta` that of `-ln g^⋆(u)`.
pub fn matuszewska_indices<G>(g: &G, grid: &GridSpec, u_grid: &[f64]) -> Result<IndexEstimate>
where
    G: Fn(f64) -> f64 + Sync + ?Sized,
{
    if u_grid.len() < 4 {
        return Err(Error::Grid(format!("u grid needs at least 4 values, got {}", u_grid.len())));
    }
    if u_grid.iter().any(|u| !(*u > 1.0)) || u_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!("u grid must be increasing and > 1: {u_grid:?}")));
    }
    let limits = u_grid
        .iter()
        .map(|&u| ratio_limit(g, u, grid))
        .collect::<Result<Vec<_>>>()?;
    let lowers: Vec<f64> = limits.iter().map(|l| l.lower).collect();
    let uppers: Vec<f64> = limits.iter().map(|l| l.upper).collect();
    let (mut gamma, r_gamma, sat_gamma) = index_from_ratios(u_grid, &lowers, "gamma")?;
    let (mut delta, r_delta, sat_delta) = index_from_ratios(u_grid, &uppers, "delta")?;
    let mut residual = r_gamma.max(r_delta);
    // The per-u estimates are ordered but the two regression slopes need not
    // be; when they cross, the crossing is noise and both take the mean.
    if delta > gamma && gamma.is_finite() && delta.is_finite() {
        let mid = 0.5 * (gamma + delta);
        residual = residual.max(delta - gamma);
        (gamma, delta) = (mid, mid);
    }
    let mut flags = Vec::new();
    match sat_gamma {
        Some(1) => flags.push(IndexFlag::GammaPosInfinite),
        Some(_) => flags.push(IndexFlag::GammaNegInfinite),
        None => {}
    }
    match sat_delta {
        Some(1) => flags.push(IndexFlag::DeltaPosInfinite),
        Some(_) => flags.push(IndexFlag::DeltaNegInfinite),
        None => {}
    }
    Ok(IndexEstimate {
        gamma,
        delta,
        residual,
        u_grid: u_grid.to_vec(),
        flags,
    })
}

/// Samples `x h(x)` on the grid.
pub fn xh_sequence(model: &dyn DistributionModel, grid: &GridSpec) -> Result<SampledSequence> {
    grid.validate(model.support_low())?;
    let xs = grid.points();
    let values: Vec<f64> = xs.par_iter().map(|&x| (x.ln() + model.log_hazard(x)).exp()).collect();
    if let Some(pos) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::Grid(format!("x h(x) is NaN at x = {}", xs[pos])));
    }
    Ok(SampledSequence {
        grid: *grid,
        xs,
        values,
    })
}

/// `lower` estimates `M1 = liminf x h(x)`, `upper` estimates `M2 = limsup x h(x)`.
pub fn xh_limits(model: &dyn DistributionModel, grid: &GridSpec) -> Result<LimitEstimate> {
    Ok(xh_sequence(model, grid)?.estimate())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotterDirection {
    /// `g(y)/g(x) <= C (y/x)^-exponent`
    UpperBound,
    /// `g(y)/g(x) >= C (y/x)^-exponent`
    LowerBound,
}

/// Constants certifying a Potter-type inequality on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotterFit {
    pub exponent: f64,
    pub direction: PotterDirection,
    pub c: f64,
    pub x0: f64,
    /// Worst relative violation over the denser verification grid; `<= 0`
    /// when the inequality holds there.
    pub max_violation: f64,
}

/// `ln[g(x_j)/g(x_i) (x_j/x_i)^exponent]`.
fn pair_log(lg: &[f64], lx: &[f64], exponent: f64, i: usize, j: usize) -> f64 {
    lg[j] - lg[i] + exponent * (lx[j] - lx[i])
}

/// Fits the smallest `C` (upper bound) or largest `C` (lower bound) over all
/// grid pairs `x_i <= x_j` with `x_i >= x0`, taking the smallest grid `x0`
/// that gives a positive finite constant. The fit is then re-checked on a
/// grid of half the spacing that extends one window past `x_max`.
pub fn fit_potter<G>(g: &G, exponent: f64, direction: PotterDirection, grid: &GridSpec) -> Result<PotterFit>
where
    G: Fn(f64) -> f64 + Sync + ?Sized,
{
    if !exponent.is_finite() {
        return Err(Error::FitFailed(format!("exponent must be finite, got {exponent}")));
    }
    let xs = grid.points();
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let lg: Vec<f64> = xs.par_iter().map(|&x| g(x)).collect();
    let n = xs.len();
    let upper = direction == PotterDirection::UpperBound;

    // best[s]: extreme pair value among pairs with both indices >= s.
    let mut best = vec![0.0; n];
    let mut running = if upper { f64::NEG_INFINITY } else { f64::INFINITY };
    for s in (0..n).rev() {
        for j in s..n {
            let v = pair_log(&lg, &lx, exponent, s, j);
            running = if v.is_nan() {
                f64::NAN
            } else if upper {
                running.max(v)
            } else {
                running.min(v)
            };
        }
        best[s] = running;
    }
    let chosen = (0..n).find(|&s| {
        let log_c = best[s];
        log_c.is_finite() && log_c.exp().is_finite() && log_c.exp() > 0.0
    });
    let Some(s) = chosen else {
        return Err(Error::FitFailed(format!(
            "no grid threshold gives a positive finite constant for exponent {exponent}"
        )));
    };
    let log_c = best[s];
    let x0 = xs[s];

    let dense = GridSpec {
        x_start: x0,
        ratio: grid.ratio.sqrt(),
        count: 2 * (n - s) - 1 + 2 * grid.window,
        window: grid.window,
    };
    let dxs = dense.points();
    let dlx: Vec<f64> = dxs.iter().map(|x| x.ln()).collect();
    let dlg: Vec<f64> = dxs.par_iter().map(|&x| g(x)).collect();
    let mut max_violation = f64::NEG_INFINITY;
    for i in 0..dxs.len() {
        for j in i..dxs.len() {
            let v = pair_log(&dlg, &dlx, exponent, i, j) - log_c;
            let violation = if upper { v.exp() - 1.0 } else { 1.0 - v.exp() };
            if violation.is_nan() {
                max_violation = f64::NAN;
            } else {
                max_violation = max_violation.max(violation);
            }
        }
    }
    Ok(PotterFit {
        exponent,
        direction,
        c: log_c.exp(),
        x0,
        max_violation,
    })
}
