//! Three-valued membership tests for the tail classes, Pitman's integral,
//! the two-sided hazard-rate bounds and the convolution closure checks.
//!
//! Every test turns finite-grid estimates into a [`Verdict`] using explicit
//! tolerance bands. A test that cannot decide says so (`Inconclusive`) and
//! carries the estimates and trends that blocked the decision; it never
//! returns an error for numerical uncertainty.
//!
//! Quantifiers over `u > 1` are realized on the configured `u` grid:
//! "for some `u`" means at least one grid value and "for all `u`" means
//! every grid value. A limit is projected across one more window width using
//! its trend before it is compared with a band, so a sequence still drifting
//! toward the band edge is not accepted early.

use crate::asymptotics::{
    fit_potter, matuszewska_indices, ratio_limit, xh_sequence, GridSpec, IndexEstimate, LimitEstimate,
    PotterDirection, PotterFit, SampledSequence, DEFAULT_INDEX_U_GRID,
};
use crate::convolution::{convolution_tail, ConvolvedModel};
use crate::error::{Error, Result};
use crate::float_serde;
use crate::models::DistributionModel;
use crate::quadrature::{integrate_exp, QuadratureSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

/// Largest exponent `κ y h(x) - H(y)` accepted in Pitman's integrand.
pub const PITMAN_EXPONENT_LIMIT: f64 = 700.0;

/// Quadrature results that missed their tolerance but are within this
/// relative error are still used as estimates by the class tests.
const USABLE_REL_ERROR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassId {
    /// Dominated variation.
    D,
    /// Extended rapid variation.
    E,
    /// Long tail.
    L,
    /// Subexponential.
    S,
    /// `S ∩ E`.
    A,
    DcapA,
    DcapL,
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassId::D => "D",
            ClassId::E => "E",
            ClassId::L => "L",
            ClassId::S => "S",
            ClassId::A => "A",
            ClassId::DcapA => "DcapA",
            ClassId::DcapL => "DcapL",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

impl Verdict {
    /// Conjunction: member only if all are, non-member if any is.
    pub fn all(verdicts: &[Verdict]) -> Verdict {
        if verdicts.contains(&Verdict::NonMember) {
            Verdict::NonMember
        } else if !verdicts.is_empty() && verdicts.iter().all(|v| *v == Verdict::Member) {
            Verdict::Member
        } else {
            Verdict::Inconclusive
        }
    }

    /// The common verdict when all agree, otherwise `Inconclusive`.
    pub fn agreement(verdicts: &[Verdict]) -> Verdict {
        match verdicts.first() {
            Some(v) if verdicts.iter().all(|w| w == v) => *v,
            _ => Verdict::Inconclusive,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Member => "Member",
            Verdict::NonMember => "NonMember",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// One estimated quantity behind a verdict. Scalars have `lower = upper`
/// and zero trend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub name: String,
    #[serde(with = "float_serde")]
    pub lower: f64,
    #[serde(with = "float_serde")]
    pub upper: f64,
    #[serde(with = "float_serde")]
    pub trend: f64,
    #[serde(with = "float_serde")]
    pub last: f64,
}

impl Evidence {
    pub fn limit(name: impl Into<String>, est: &LimitEstimate) -> Self {
        Evidence {
            name: name.into(),
            lower: est.lower,
            upper: est.upper,
            trend: est.trend,
            last: est.last,
        }
    }

    pub fn scalar(name: impl Into<String>, value: f64) -> Self {
        Evidence {
            name: name.into(),
            lower: value,
            upper: value,
            trend: 0.0,
            last: value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub class: ClassId,
    pub verdict: Verdict,
    /// Which characterization produced the verdict.
    pub route: String,
    #[serde(with = "float_serde")]
    pub tolerance: f64,
    pub evidence: Vec<Evidence>,
    pub grid: GridSpec,
    /// Why the verdict was reached, in words.
    pub reason: String,
}

impl ClassVerdict {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }

    /// Looks up an evidence entry by name.
    pub fn evidence(&self, name: &str) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.name == name)
    }
}

/// Characterization used by [`Classifier::test_e`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ERoute {
    /// `F̄(ux)/F̄(x)` bounded away from 1 for some `u`.
    Direct,
    /// `M1 = liminf x h(x) > 0`.
    HazardM1,
    /// Both, which must agree.
    Both,
}

/// Characterization used by [`Classifier::test_d`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DRoute {
    /// `F̄(ux)/F̄(x)` bounded away from 0.
    Direct,
    /// `M2 = limsup x h(x) < ∞`.
    HazardM2,
    Both,
}

/// Characterization used by [`Classifier::test_s`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SRoute {
    /// `F̄^{2*}(x)/F̄(x) → 2`.
    SelfConvolution,
    /// Pitman's integral tends to 1 for every `κ` on the grid.
    Pitman,
    Both,
}

/// Tolerances and grids shared by all tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Band for ratio-to-limit comparisons.
    pub tol: f64,
    /// Threshold for `M1 > 0`.
    pub tol_m: f64,
    /// `u` values realizing "for some / for all `u > 1`".
    pub u_grid: Vec<f64>,
    /// `u` values for Matuszewska index regressions.
    pub index_u_grid: Vec<f64>,
    /// `κ` values for Pitman's integral.
    pub kappas: Vec<f64>,
    /// Shifts `y` for the long-tail test.
    pub shifts: Vec<f64>,
    pub quad: QuadratureSpec,
    /// `x h(x)` counts as bounded when its log-log growth is at most this.
    pub growth_bounded: f64,
    /// `x h(x)` counts as unbounded when its log-log growth is at least this.
    pub growth_unbounded: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            tol: 0.02,
            tol_m: 0.05,
            u_grid: vec![1.5, 2.0, 4.0, 8.0],
            index_u_grid: DEFAULT_INDEX_U_GRID.to_vec(),
            kappas: vec![0.5, 1.0, 2.0],
            shifts: vec![1.0, 5.0, 25.0],
            quad: QuadratureSpec::default(),
            growth_bounded: 0.05,
            growth_unbounded: 0.075,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.tol > 0.0 && self.tol < 0.5) {
            return bad("tol must lie in (0, 0.5)");
        }
        if !(self.tol_m > 0.0) {
            return bad("tol_m must be positive");
        }
        if self.u_grid.is_empty() || self.u_grid.iter().any(|u| !(*u > 1.0) || !u.is_finite()) {
            return bad("u grid must be non-empty with finite values > 1");
        }
        if self.kappas.is_empty() || self.kappas.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
            return bad("kappa grid must be non-empty with finite positive values");
        }
        if self.shifts.is_empty() || self.shifts.iter().any(|y| !y.is_finite()) {
            return bad("shift grid must be non-empty and finite");
        }
        if !(self.growth_bounded >= 0.0 && self.growth_unbounded > self.growth_bounded) {
            return bad("growth thresholds must satisfy 0 <= bounded < unbounded");
        }
        self.quad.validate()
    }
}

/// Which hazard-rate bound a [`BoundCheck`] tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundName {
    /// `x h(x) >= (δ - 1) / C(δ)` from the upper Potter bound on `f`.
    XhLower,
    /// `x h(x) <= 1 / (C'(γ) V(λ, γ))` from the lower Potter bound on `f`.
    XhUpper,
}

/// Outcome of a hazard-rate bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: BoundName,
    /// `δ` or `γ`.
    pub exponent: f64,
    pub lambda: Option<f64>,
    /// The estimated density index the exponent is compared with
    /// (`δ_f` for the lower bound, `γ_f` for the upper bound).
    #[serde(with = "float_serde")]
    pub index_estimate: f64,
    /// Set when the exponent is outside the range where the bound is
    /// claimed; the check is then vacuous and `holds` is true.
    pub hypothesis_violated: bool,
    pub fitted: Option<PotterFit>,
    #[serde(with = "float_serde")]
    pub rhs: f64,
    /// `x h(x)` over grid points at or beyond the fitted threshold.
    pub observed: Option<LimitEstimate>,
    pub holds: bool,
}

/// Conditions for `F₁ ∗ F₂ ∈ E`: bounded increase with `δ_{f₁} > 0`,
/// `δ_{F̄₁} < δ_{F̄₂}`, and a `δ ∈ [δ_{F̄₁}, δ_{F̄₂})` with
/// `liminf x^δ F̄₁(x) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosurePreconditions {
    #[serde(with = "float_serde")]
    pub delta_f1: f64,
    #[serde(with = "float_serde")]
    pub delta_tail1: f64,
    #[serde(with = "float_serde")]
    pub delta_tail2: f64,
    pub density_positive_decrease: bool,
    pub ordered: bool,
    pub witness_delta: Option<f64>,
    /// Estimate of `liminf x^δ F̄₁(x)` at the witness.
    pub witness_liminf: Option<LimitEstimate>,
    pub satisfied: bool,
    pub reason: String,
}

/// Everything [`Classifier::verify_convolution_closure`] found about `F₁ ∗ F₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub left: String,
    pub right: String,
    pub preconditions: ClosurePreconditions,
    pub convolution_grid: GridSpec,
    /// `E` membership of the convolution.
    pub convolution_e: ClassVerdict,
    /// `Some(true)` when the preconditions hold and the convolution tests
    /// as an `E` member, `Some(false)` when they hold and it does not.
    pub e_claim_holds: Option<bool>,
    /// `D ∩ A` verdicts of the two inputs.
    pub inputs_dcap_a: [ClassVerdict; 2],
    /// `D ∩ A` membership of the convolution, run when both inputs are members.
    pub convolution_dcap_a: Option<ClassVerdict>,
    /// `P(X₁+X₂ > x) / (F̄₁(x) + F̄₂(x))` over the window.
    pub max_sum: LimitEstimate,
    /// Verdict on `max_sum → 1`.
    pub max_sum_verdict: Verdict,
    /// Matuszewska indices of the convolution tail.
    pub convolution_tail_index: IndexEstimate,
}

/// `V(λ, γ) = ∫_1^λ t^-γ dt`, i.e. `(λ^(1-γ) - 1)/(1 - γ)` and `ln λ` at `γ = 1`.
pub fn v_lambda_gamma(lambda: f64, gamma: f64) -> f64 {
    let s = 1.0 - gamma;
    if s.abs() < 1e-12 {
        lambda.ln()
    } else if s.abs() < 1e-4 {
        // the closed form cancels near γ = 1
        let z = s * lambda.ln();
        lambda.ln() * z.exp_m1() / z
    } else {
        (lambda.powf(s) - 1.0) / s
    }
}

/// Pitman's integral `∫_{low}^{x} exp{κ y h(x) - H(y)} h(y) dy`.
///
/// The integrand is assembled as `exp(κ y h(x) + ln f(y))`. Fails with
/// [`Error::OverflowGuard`] when the exponent `κ y h(x) - H(y)` exceeds
/// [`PITMAN_EXPONENT_LIMIT`] at any evaluated `y`, which happens for light
/// tails where `κ y h(x)` dominates.
pub fn pitman_integral(model: &dyn DistributionModel, kappa: f64, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    let low = model.support_low();
    if !(x > low) {
        return if x == low { Ok(0.0) } else { Err(Error::Domain { x, support_low: low }) };
    }
    let slope = kappa * model.hazard(x)?;
    let worst = Cell::new((f64::NEG_INFINITY, x));
    let exponent = |y: f64| slope * y + model.log_tail(y);
    let at_end = exponent(x);
    if at_end > PITMAN_EXPONENT_LIMIT {
        return Err(Error::OverflowGuard { exponent: at_end, at: x });
    }
    let phi = |y: f64| {
        let e = exponent(y);
        if e > worst.get().0 {
            worst.set((e, y));
        }
        slope * y + model.log_density(y)
    };
    let r = integrate_exp(&phi, low, x, quad)?;
    let (e, at) = worst.get();
    if e > PITMAN_EXPONENT_LIMIT {
        return Err(Error::OverflowGuard { exponent: e, at });
    }
    Ok(r.value())
}

/// `ln F̄₁∗F₂(x)`, accepting quadrature that missed its tolerance by a little.
fn usable_conv_tail(
    left: &dyn DistributionModel,
    right: &dyn DistributionModel,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    match convolution_tail(left, right, x, quad) {
        Err(Error::QuadratureFailure {
            log_estimate,
            rel_error,
            ..
        }) if rel_error <= USABLE_REL_ERROR && !log_estimate.is_nan() => Ok(log_estimate),
        other => other,
    }
}

/// The last `W` points of `grid` as a grid of their own.
fn window_grid(grid: &GridSpec) -> GridSpec {
    GridSpec {
        x_start: grid.point(grid.window_start()),
        count: grid.window,
        ..*grid
    }
}

/// Samples `values(x)` on the window of `grid`.
fn window_sequence<F>(grid: &GridSpec, value: F) -> Result<SampledSequence>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let wg = window_grid(grid);
    let xs = wg.points();
    let values = xs.par_iter().map(|&x| value(x)).collect::<Result<Vec<_>>>()?;
    Ok(SampledSequence { grid: wg, xs, values })
}

/// A sequence outside the band still counts as possibly converging when its
/// trend would carry it into the band within this many window widths.
const RETURN_WINDOWS: f64 = 10.0;

/// Limit of `est` against `target` with band `tol`.
///
/// Member when the window lies inside the band, or when the last value is
/// inside and the trend does not lead out of it. NonMember when the window
/// lies outside the band and the trend is not bringing it back, or the
/// sequence is not finite.
fn converges_to(est: &LimitEstimate, target: f64, tol: f64) -> (Verdict, String) {
    let span = est.grid.window_log_span();
    if !(est.lower.is_finite() && est.upper.is_finite() && est.last.is_finite()) {
        return (Verdict::NonMember, format!("sequence is not finite (last = {})", est.last));
    }
    let drift = est.trend * span;
    let gap = est.last - target;
    let settling = gap * est.trend <= 0.0 || drift.abs() <= tol;
    // Heading back, fast enough to reach the band within a few more windows.
    let returning = gap * est.trend < 0.0 && gap.abs() - tol <= RETURN_WINDOWS * drift.abs();
    if est.lower >= target - tol && est.upper <= target + tol {
        return (Verdict::Member, format!("window within {target} ± {tol}"));
    }
    if gap.abs() <= tol && settling {
        return (
            Verdict::Member,
            format!("last value {} within {target} ± {tol} and settling", est.last),
        );
    }
    let outside = est.lower > target + tol || est.upper < target - tol;
    if outside && !returning {
        return (
            Verdict::NonMember,
            format!("window [{}, {}] outside {target} ± {tol} and moving away", est.lower, est.upper),
        );
    }
    (
        Verdict::Inconclusive,
        format!(
            "window [{}, {}] not settled near {target} (trend {})",
            est.lower, est.upper, est.trend
        ),
    )
}

fn u_label(name: &str, u: f64) -> String {
    format!("{name}(u={u})")
}

/// Runs the class tests with a fixed configuration.
#[derive(Debug, Clone, Default)]
pub struct Classifier {
    pub config: ClassifierConfig,
}

/// Ratio estimates `F̄(ux)/F̄(x)` for each `u` on the configured grid.
struct TailRatios {
    per_u: Vec<(f64, LimitEstimate)>,
}

impl TailRatios {
    fn evidence(&self) -> Vec<Evidence> {
        self.per_u
            .iter()
            .map(|(u, e)| Evidence::limit(u_label("tail_ratio", *u), e))
            .collect()
    }
}

/// `x h(x)` along the grid with its windowed estimate and growth rate.
struct XhData {
    est: LimitEstimate,
    growth: f64,
}

impl XhData {
    fn evidence(&self) -> Vec<Evidence> {
        vec![Evidence::limit("xh", &self.est), Evidence::scalar("xh_growth", self.growth)]
    }
}

impl Classifier {
    pub fn new(config: ClassifierConfig) -> Result<Self> {
        config.validate()?;
        Ok(Classifier { config })
    }

    fn verdict(
        &self,
        class: ClassId,
        verdict: Verdict,
        route: &str,
        evidence: Vec<Evidence>,
        grid: &GridSpec,
        reason: String,
    ) -> ClassVerdict {
        ClassVerdict {
            class,
            verdict,
            route: route.to_string(),
            tolerance: self.config.tol,
            evidence,
            grid: *grid,
            reason,
        }
    }

    fn failed(&self, class: ClassId, route: &str, grid: &GridSpec, err: &Error) -> ClassVerdict {
        self.verdict(
            class,
            Verdict::Inconclusive,
            route,
            Vec::new(),
            grid,
            format!("estimate failed: {err}"),
        )
    }

    fn tail_ratios(&self, model: &dyn DistributionModel, grid: &GridSpec) -> Result<TailRatios> {
        grid.validate(model.support_low())?;
        let g = |x: f64| model.log_tail(x);
        let per_u = self
            .config
            .u_grid
            .par_iter()
            .map(|&u| Ok((u, ratio_limit(&g, u, grid)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TailRatios { per_u })
    }

    fn xh_data(&self, model: &dyn DistributionModel, grid: &GridSpec) -> Result<XhData> {
        let seq = xh_sequence(model, grid)?;
        Ok(XhData {
            est: seq.estimate(),
            growth: seq.growth(),
        })
    }

    /// `upper` pushed one window further along its trend, if rising.
    fn projected_upper(est: &LimitEstimate) -> f64 {
        est.upper + est.trend.max(0.0) * est.grid.window_log_span()
    }

    /// `lower` pushed one window further along its trend, if falling.
    fn projected_lower(est: &LimitEstimate) -> f64 {
        est.lower + est.trend.min(0.0) * est.grid.window_log_span()
    }

    fn e_direct(&self, r: &TailRatios, grid: &GridSpec) -> ClassVerdict {
        let tol = self.config.tol;
        let below = r.per_u.iter().find(|(_, e)| Self::projected_upper(e) <= 1.0 - tol);
        let (verdict, reason) = if let Some((u, e)) = below {
            (
                Verdict::Member,
                format!("tail ratio at u={u} stays at or below {} (upper {})", 1.0 - tol, e.upper),
            )
        } else if r.per_u.iter().all(|(_, e)| Self::projected_lower(e) >= 1.0 - tol) {
            (Verdict::NonMember, format!("tail ratios approach 1 within {tol} for every u"))
        } else {
            (Verdict::Inconclusive, "tail ratios neither clear of 1 nor settled at 1".into())
        };
        self.verdict(ClassId::E, verdict, "direct", r.evidence(), grid, reason)
    }

    fn e_m1(&self, xh: &XhData, grid: &GridSpec) -> ClassVerdict {
        let c = &self.config;
        let (verdict, reason) = if xh.est.lower >= c.tol_m && xh.growth >= -c.growth_bounded {
            (
                Verdict::Member,
                format!("x h(x) stays at or above {} (lower {}) without decaying", c.tol_m, xh.est.lower),
            )
        } else if xh.est.upper < c.tol_m || xh.growth <= -c.growth_unbounded {
            (
                Verdict::NonMember,
                format!("x h(x) falls toward 0 (upper {}, growth {})", xh.est.upper, xh.growth),
            )
        } else {
            (
                Verdict::Inconclusive,
                format!("x h(x) lower {} with growth {} does not settle M1", xh.est.lower, xh.growth),
            )
        };
        self.verdict(ClassId::E, verdict, "hazard-m1", xh.evidence(), grid, reason)
    }

    fn d_direct(&self, r: &TailRatios, grid: &GridSpec) -> ClassVerdict {
        let tol = self.config.tol;
        let above = r
            .per_u
            .iter()
            .find(|(_, e)| e.lower >= tol && Self::projected_lower(e) >= tol);
        let (verdict, reason) = if let Some((u, e)) = above {
            (
                Verdict::Member,
                format!("tail ratio at u={u} stays at or above {tol} (lower {})", e.lower),
            )
        } else if r.per_u.iter().all(|(_, e)| Self::projected_upper(e) < tol) {
            (Verdict::NonMember, format!("tail ratios fall below {tol} for every u"))
        } else {
            (Verdict::Inconclusive, "tail ratios neither clear of 0 nor settled at 0".into())
        };
        self.verdict(ClassId::D, verdict, "direct", r.evidence(), grid, reason)
    }

    fn d_m2(&self, xh: &XhData, grid: &GridSpec) -> ClassVerdict {
        let c = &self.config;
        let (verdict, reason) = if !xh.est.upper.is_finite() {
            (Verdict::NonMember, "x h(x) is not finite on the window".to_string())
        } else if xh.growth <= c.growth_bounded {
            (
                Verdict::Member,
                format!("x h(x) bounded: growth {} <= {}", xh.growth, c.growth_bounded),
            )
        } else if xh.growth >= c.growth_unbounded {
            (
                Verdict::NonMember,
                format!("x h(x) unbounded: growth {} >= {}", xh.growth, c.growth_unbounded),
            )
        } else {
            (
                Verdict::Inconclusive,
                format!("x h(x) growth {} between the bounded and unbounded thresholds", xh.growth),
            )
        };
        self.verdict(ClassId::D, verdict, "hazard-m2", xh.evidence(), grid, reason)
    }

    /// Combines two routes for the same class; they must agree.
    fn both(&self, a: ClassVerdict, b: ClassVerdict, grid: &GridSpec) -> ClassVerdict {
        let verdict = Verdict::agreement(&[a.verdict, b.verdict]);
        let reason = if verdict == Verdict::Inconclusive && a.verdict != b.verdict {
            format!(
                "routes disagree: {} says {} ({}); {} says {} ({})",
                a.route, a.verdict, a.reason, b.route, b.verdict, b.reason
            )
        } else {
            format!("{}: {}; {}: {}", a.route, a.reason, b.route, b.reason)
        };
        let mut evidence = a.evidence;
        evidence.extend(b.evidence);
        self.verdict(a.class, verdict, "both", evidence, grid, reason)
    }

    /// Extended rapid variation: `F̄(ux)/F̄(x) < 1` in the limit for some
    /// `u > 1`, or equivalently `M1 > 0`.
    pub fn test_e(&self, model: &dyn DistributionModel, grid: &GridSpec, route: ERoute) -> ClassVerdict {
        let direct = || match self.tail_ratios(model, grid) {
            Ok(r) => self.e_direct(&r, grid),
            Err(e) => self.failed(ClassId::E, "direct", grid, &e),
        };
        let m1 = || match self.xh_data(model, grid) {
            Ok(x) => self.e_m1(&x, grid),
            Err(e) => self.failed(ClassId::E, "hazard-m1", grid, &e),
        };
        match route {
            ERoute::Direct => direct(),
            ERoute::HazardM1 => m1(),
            ERoute::Both => {
                let (a, b) = rayon::join(direct, m1);
                self.both(a, b, grid)
            }
        }
    }

    /// Dominated variation: `F̄(ux)/F̄(x)` bounded away from 0, or
    /// equivalently `M2 < ∞`.
    pub fn test_d(&self, model: &dyn DistributionModel, grid: &GridSpec, route: DRoute) -> ClassVerdict {
        let direct = || match self.tail_ratios(model, grid) {
            Ok(r) => self.d_direct(&r, grid),
            Err(e) => self.failed(ClassId::D, "direct", grid, &e),
        };
        let m2 = || match self.xh_data(model, grid) {
            Ok(x) => self.d_m2(&x, grid),
            Err(e) => self.failed(ClassId::D, "hazard-m2", grid, &e),
        };
        match route {
            DRoute::Direct => direct(),
            DRoute::HazardM2 => m2(),
            DRoute::Both => {
                let (a, b) = rayon::join(direct, m2);
                self.both(a, b, grid)
            }
        }
    }

    /// Long tail: `F̄(x - y)/F̄(x) → 1` for every configured shift `y`.
    pub fn test_l(&self, model: &dyn DistributionModel, grid: &GridSpec) -> ClassVerdict {
        let tol = self.config.tol;
        if let Err(e) = grid.validate(model.support_low()) {
            return self.failed(ClassId::L, "shift", grid, &e);
        }
        let mut evidence = Vec::new();
        let mut verdicts = Vec::new();
        let mut reasons = Vec::new();
        for &y in &self.config.shifts {
            let seq = window_sequence(grid, |x| Ok((model.log_tail(x - y) - model.log_tail(x)).exp()));
            match seq {
                Ok(seq) => {
                    let est = seq.estimate();
                    let (v, why) = converges_to(&est, 1.0, tol);
                    evidence.push(Evidence::limit(format!("tail_shift(y={y})"), &est));
                    verdicts.push(v);
                    reasons.push(format!("y={y}: {why}"));
                }
                Err(e) => return self.failed(ClassId::L, "shift", grid, &e),
            }
        }
        self.verdict(
            ClassId::L,
            Verdict::all(&verdicts),
            "shift",
            evidence,
            grid,
            reasons.join("; "),
        )
    }

    /// Estimated lower Matuszewska index of the hazard rate.
    pub fn hazard_decrease(&self, model: &dyn DistributionModel, grid: &GridSpec) -> Result<IndexEstimate> {
        let g = |x: f64| model.log_hazard(x);
        matuszewska_indices(&g, grid, &self.config.index_u_grid)
    }

    fn s_self_convolution(&self, model: &dyn DistributionModel, grid: &GridSpec) -> ClassVerdict {
        let quad = &self.config.quad;
        let seq = window_sequence(grid, |x| {
            Ok((usable_conv_tail(model, model, x, quad)? - model.log_tail(x)).exp())
        });
        match seq {
            Ok(seq) => {
                let est = seq.estimate();
                let (v, why) = converges_to(&est, 2.0, self.config.tol);
                self.verdict(
                    ClassId::S,
                    v,
                    "self-convolution",
                    vec![Evidence::limit("self_convolution_ratio", &est)],
                    grid,
                    why,
                )
            }
            Err(e) => self.failed(ClassId::S, "self-convolution", grid, &e),
        }
    }

    /// The Pitman route together with whether hypothesis gating made it
    /// inconclusive.
    fn s_pitman(&self, model: &dyn DistributionModel, grid: &GridSpec) -> (ClassVerdict, bool) {
        let c = &self.config;
        let route = "pitman";
        if let Err(e) = grid.validate(model.support_low()) {
            return (self.failed(ClassId::S, route, grid, &e), false);
        }
        let gate = self.hazard_decrease(model, grid);
        let delta_h = gate.as_ref().map_or(f64::NAN, |ix| ix.delta);
        let mut evidence = vec![Evidence::scalar("delta_h", delta_h)];
        if !(delta_h > c.tol) {
            let detail = match &gate {
                Ok(_) => format!("delta_h estimate {delta_h} <= {}", c.tol),
                Err(e) => e.to_string(),
            };
            let v = self.verdict(
                ClassId::S,
                Verdict::Inconclusive,
                route,
                evidence,
                grid,
                format!("positive decrease not established: {detail}"),
            );
            return (v, true);
        }
        let mut verdicts = Vec::new();
        let mut reasons = Vec::new();
        for &kappa in &c.kappas {
            match window_sequence(grid, |x| pitman_integral(model, kappa, x, &c.quad)) {
                Ok(seq) => {
                    let est = seq.estimate();
                    let (v, why) = converges_to(&est, 1.0, c.tol);
                    evidence.push(Evidence::limit(format!("pitman(kappa={kappa})"), &est));
                    verdicts.push(v);
                    reasons.push(format!("kappa={kappa}: {why}"));
                }
                Err(e @ Error::OverflowGuard { .. }) => {
                    verdicts.push(Verdict::Inconclusive);
                    reasons.push(format!("kappa={kappa}: {e}"));
                }
                Err(e) => return (self.failed(ClassId::S, route, grid, &e), false),
            }
        }
        let v = self.verdict(
            ClassId::S,
            Verdict::all(&verdicts),
            route,
            evidence,
            grid,
            reasons.join("; "),
        );
        (v, false)
    }

    /// Subexponentiality, by `F̄^{2*}(x)/F̄(x) → 2` or by Pitman's criterion.
    ///
    /// Pitman's criterion only applies when the hazard rate has positive
    /// decrease, so that route is inconclusive when the estimated `δ_h` does
    /// not clear the tolerance. With `Both`, such a gated Pitman route
    /// defers to the self-convolution route; otherwise the two must agree.
    pub fn test_s(&self, model: &dyn DistributionModel, grid: &GridSpec, route: SRoute) -> ClassVerdict {
        match route {
            SRoute::SelfConvolution => self.s_self_convolution(model, grid),
            SRoute::Pitman => self.s_pitman(model, grid).0,
            SRoute::Both => {
                let (a, (b, gated)) =
                    rayon::join(|| self.s_self_convolution(model, grid), || self.s_pitman(model, grid));
                if gated {
                    let mut v = self.both(a.clone(), b, grid);
                    v.verdict = a.verdict;
                    v.reason = format!("pitman route not applicable, self-convolution decides: {}", v.reason);
                    v
                } else {
                    self.both(a, b, grid)
                }
            }
        }
    }

    /// `A = S ∩ E`.
    pub fn test_a(&self, model: &dyn DistributionModel, grid: &GridSpec) -> ClassVerdict {
        let (s, e) = rayon::join(
            || self.test_s(model, grid, SRoute::Both),
            || self.test_e(model, grid, ERoute::Both),
        );
        self.conjunction(ClassId::A, "S and E", &[s, e], grid)
    }

    fn conjunction(&self, class: ClassId, route: &str, parts: &[ClassVerdict], grid: &GridSpec) -> ClassVerdict {
        let verdict = Verdict::all(&parts.iter().map(|p| p.verdict).collect::<Vec<_>>());
        let reason = parts
            .iter()
            .map(|p| format!("{} {}: {}", p.class, p.verdict, p.reason))
            .collect::<Vec<_>>()
            .join("; ");
        let evidence = parts.iter().flat_map(|p| p.evidence.iter().cloned()).collect();
        self.verdict(class, verdict, route, evidence, grid, reason)
    }

    /// `D ∩ L`.
    pub fn test_dcap_l(&self, model: &dyn DistributionModel, grid: &GridSpec) -> ClassVerdict {
        let (d, l) = rayon::join(
            || self.test_d(model, grid, DRoute::Both),
            || self.test_l(model, grid),
        );
        self.conjunction(ClassId::DcapL, "D and L", &[d, l], grid)
    }

    /// `D ∩ A` by three characterizations that must agree pairwise:
    /// membership in `D` and in `A`; `0 < M1 <= M2 < ∞`; and
    /// `0 < F̄⋆(u) <= F̄^⋆(u) < 1` on the `u` grid (bounded away from 0
    /// for some `u`, from 1 for every `u`).
    pub fn test_dcap_a(&self, model: &dyn DistributionModel, grid: &GridSpec) -> ClassVerdict {
        let ((ratios, xh), s) = rayon::join(
            || rayon::join(|| self.tail_ratios(model, grid), || self.xh_data(model, grid)),
            || self.test_s(model, grid, SRoute::Both),
        );
        let (ratios, xh) = match (ratios, xh) {
            (Ok(r), Ok(x)) => (r, x),
            (Err(e), _) | (_, Err(e)) => return self.failed(ClassId::DcapA, "three routes", grid, &e),
        };
        let tol = self.config.tol;

        let e = self.both(self.e_direct(&ratios, grid), self.e_m1(&xh, grid), grid);
        let d = self.both(self.d_direct(&ratios, grid), self.d_m2(&xh, grid), grid);
        let a = self.conjunction(ClassId::A, "S and E", &[s, e], grid);
        let route_i = Verdict::all(&[d.verdict, a.verdict]);

        let m1 = self.e_m1(&xh, grid);
        let m2 = self.d_m2(&xh, grid);
        let route_ii = Verdict::all(&[m1.verdict, m2.verdict]);

        let d_ratio = self.d_direct(&ratios, grid);
        let e_ratio = self.e_direct(&ratios, grid);
        let all_below_one = ratios.per_u.iter().all(|(_, e)| Self::projected_upper(e) <= 1.0 - tol);
        let route_iii = if d_ratio.verdict == Verdict::NonMember || e_ratio.verdict == Verdict::NonMember {
            Verdict::NonMember
        } else if d_ratio.verdict == Verdict::Member && all_below_one {
            Verdict::Member
        } else {
            Verdict::Inconclusive
        };

        let verdict = Verdict::agreement(&[route_i, route_ii, route_iii]);
        let reason = format!(
            "D and A: {route_i} ({}; {}); 0 < M1 <= M2 < inf: {route_ii} ({}; {}); \
             0 < ratio liminf <= limsup < 1: {route_iii} ({}; {})",
            d.reason, a.reason, m1.reason, m2.reason, d_ratio.reason, e_ratio.reason
        );
        let mut evidence = vec![
            Evidence::scalar("route_d_and_a", verdict_code(route_i)),
            Evidence::scalar("route_m1_m2", verdict_code(route_ii)),
            Evidence::scalar("route_tail_ratios", verdict_code(route_iii)),
        ];
        evidence.extend(ratios.evidence());
        evidence.extend(xh.evidence());
        evidence.extend(a.evidence.into_iter().filter(|e| !e.name.starts_with("tail_ratio") && !e.name.starts_with("xh")));
        self.verdict(ClassId::DcapA, verdict, "three routes", evidence, grid, reason)
    }

    /// Checks `x h(x) >= (δ - 1)/C(δ)` past the fitted threshold, where
    /// `C(δ)` is the upper Potter constant of the density at exponent `δ`.
    /// The bound is claimed for `1 < δ < δ_f`.
    pub fn check_xh_lower_bound(&self, model: &dyn DistributionModel, delta: f64, grid: &GridSpec) -> Result<BoundCheck> {
        let g = |x: f64| model.log_density(x);
        let index = matuszewska_indices(&g, grid, &self.config.index_u_grid)?.delta;
        let mut check = BoundCheck {
            bound: BoundName::XhLower,
            exponent: delta,
            lambda: None,
            index_estimate: index,
            hypothesis_violated: !(delta > 1.0 && delta < index),
            fitted: None,
            rhs: 0.0,
            observed: None,
            holds: true,
        };
        if check.hypothesis_violated {
            return Ok(check);
        }
        let fit = fit_potter(&g, delta, PotterDirection::UpperBound, grid)?;
        check.rhs = (delta - 1.0) / fit.c;
        let observed = xh_past(model, grid, fit.x0)?;
        check.holds = observed.lower >= check.rhs * (1.0 - 1e-9);
        check.fitted = Some(fit);
        check.observed = Some(observed);
        Ok(check)
    }

    /// Checks `x h(x) <= 1/(C'(γ) V(λ, γ))` past the fitted threshold, where
    /// `C'(γ)` is the lower Potter constant of the density at exponent `γ`.
    /// The bound is claimed for `γ > γ_f` and `λ > 1`.
    pub fn check_xh_upper_bound(
        &self,
        model: &dyn DistributionModel,
        gamma: f64,
        lambda: f64,
        grid: &GridSpec,
    ) -> Result<BoundCheck> {
        let g = |x: f64| model.log_density(x);
        let index = matuszewska_indices(&g, grid, &self.config.index_u_grid)?.gamma;
        let mut check = BoundCheck {
            bound: BoundName::XhUpper,
            exponent: gamma,
            lambda: Some(lambda),
            index_estimate: index,
            hypothesis_violated: !(gamma > index && lambda > 1.0 && gamma.is_finite() && lambda.is_finite()),
            fitted: None,
            rhs: f64::INFINITY,
            observed: None,
            holds: true,
        };
        if check.hypothesis_violated {
            return Ok(check);
        }
        let fit = fit_potter(&g, gamma, PotterDirection::LowerBound, grid)?;
        check.rhs = 1.0 / (fit.c * v_lambda_gamma(lambda, gamma));
        let observed = xh_past(model, grid, fit.x0)?;
        check.holds = observed.upper <= check.rhs * (1.0 + 1e-9);
        check.fitted = Some(fit);
        check.observed = Some(observed);
        Ok(check)
    }

    /// Checks the conditions under which `F₁ ∗ F₂ ∈ E`.
    pub fn check_closure_preconditions(
        &self,
        left: &dyn DistributionModel,
        right: &dyn DistributionModel,
        grid: &GridSpec,
    ) -> Result<ClosurePreconditions> {
        let tol = self.config.tol;
        let us = &self.config.index_u_grid;
        let right_grid = if grid.x_start > right.support_low() {
            *grid
        } else {
            GridSpec::for_model(right)
        };
        let f1 = |x: f64| left.log_density(x);
        let t1 = |x: f64| left.log_tail(x);
        let t2 = |x: f64| right.log_tail(x);
        let delta_f1 = matuszewska_indices(&f1, grid, us)?.delta;
        let delta_tail1 = matuszewska_indices(&t1, grid, us)?.delta;
        let delta_tail2 = matuszewska_indices(&t2, &right_grid, us)?.delta;
        let density_positive_decrease = delta_f1 > 0.0;
        let ordered = delta_tail1 < delta_tail2 && delta_tail1.is_finite();

        let mut witness_delta = None;
        let mut witness_liminf = None;
        if ordered {
            // δ_{F̄₂} may be infinite; search a bounded stretch above δ_{F̄₁} then.
            let top = if delta_tail2.is_finite() { delta_tail2 } else { delta_tail1 + 1.0 };
            const STEPS: usize = 10;
            for k in 0..STEPS {
                let d = delta_tail1 + (top - delta_tail1) * k as f64 / STEPS as f64;
                let seq = xs_values(grid, |x| d * x.ln() + left.log_tail(x));
                let est = seq.estimate();
                if est.lower > tol && est.lower.is_finite() {
                    witness_delta = Some(d);
                    witness_liminf = Some(est);
                    break;
                }
            }
        }
        let satisfied = density_positive_decrease && ordered && witness_delta.is_some();
        let reason = if satisfied {
            format!(
                "delta_f1 = {delta_f1} > 0, delta_tail1 = {delta_tail1} < delta_tail2 = {delta_tail2}, witness {}",
                witness_delta.unwrap_or(f64::NAN)
            )
        } else if !density_positive_decrease {
            format!("density of the first distribution lacks positive decrease (delta_f1 = {delta_f1})")
        } else if !ordered {
            format!("tail indices not ordered: delta_tail1 = {delta_tail1}, delta_tail2 = {delta_tail2}")
        } else {
            "no delta in [delta_tail1, delta_tail2) keeps liminf x^delta F1(x) positive".to_string()
        };
        Ok(ClosurePreconditions {
            delta_f1,
            delta_tail1,
            delta_tail2,
            density_positive_decrease,
            ordered,
            witness_delta,
            witness_liminf,
            satisfied,
            reason,
        })
    }

    /// Convolves the two models and checks what the closure results predict:
    /// `E` membership of `F₁ ∗ F₂` under the preconditions, and `D ∩ A`
    /// membership with `F̄₁∗F₂(x) ~ F̄₁(x) + F̄₂(x)` when both inputs are
    /// in `D ∩ A`.
    pub fn verify_convolution_closure(
        &self,
        left: Arc<dyn DistributionModel>,
        right: Arc<dyn DistributionModel>,
        grid: &GridSpec,
    ) -> Result<ClosureReport> {
        let left_grid = *grid;
        let right_grid = if grid.x_start > right.support_low() {
            *grid
        } else {
            GridSpec::for_model(right.as_ref())
        };
        let conv = ConvolvedModel::from_arcs(left.clone(), right.clone(), self.config.quad);
        let conv_grid = if grid.x_start > conv.support_low() {
            *grid
        } else {
            GridSpec::for_model(&conv)
        };

        let preconditions = self.check_closure_preconditions(left.as_ref(), right.as_ref(), grid)?;
        let (inputs, (convolution_e, max_sum)) = rayon::join(
            || {
                rayon::join(
                    || self.test_dcap_a(left.as_ref(), &left_grid),
                    || self.test_dcap_a(right.as_ref(), &right_grid),
                )
            },
            || {
                rayon::join(
                    || self.test_e(&conv, &conv_grid, ERoute::Both),
                    || {
                        window_sequence(&conv_grid, |x| {
                            let tail = usable_conv_tail(left.as_ref(), right.as_ref(), x, &self.config.quad)?;
                            let sum = crate::convolution::log_add_exp(left.log_tail(x), right.log_tail(x));
                            Ok((tail - sum).exp())
                        })
                    },
                )
            },
        );
        let max_sum = max_sum?.estimate();
        let (max_sum_verdict, _) = converges_to(&max_sum, 1.0, self.config.tol);
        let both_members = inputs.0.is_member() && inputs.1.is_member();
        let convolution_dcap_a = both_members.then(|| self.test_dcap_a(&conv, &conv_grid));
        let tc = |x: f64| conv.log_tail(x);
        let convolution_tail_index = matuszewska_indices(&tc, &conv_grid, &self.config.index_u_grid)?;
        let e_claim_holds = preconditions
            .satisfied
            .then(|| convolution_e.verdict == Verdict::Member);
        Ok(ClosureReport {
            left: left.label(),
            right: right.label(),
            preconditions,
            convolution_grid: conv_grid,
            convolution_e,
            e_claim_holds,
            inputs_dcap_a: [inputs.0, inputs.1],
            convolution_dcap_a,
            max_sum,
            max_sum_verdict,
            convolution_tail_index,
        })
    }
}

/// Numeric code of a verdict for evidence tables: 1 member, 0 non-member,
/// NaN inconclusive.
fn verdict_code(v: Verdict) -> f64 {
    match v {
        Verdict::Member => 1.0,
        Verdict::NonMember => 0.0,
        Verdict::Inconclusive => f64::NAN,
    }
}

/// `exp(log_value(x))` on the whole grid.
fn xs_values<F: Fn(f64) -> f64 + Sync>(grid: &GridSpec, log_value: F) -> SampledSequence {
    let xs = grid.points();
    let values = xs.par_iter().map(|&x| log_value(x).exp()).collect();
    SampledSequence { grid: *grid, xs, values }
}

/// `x h(x)` over the grid points at or beyond `x0`, all of them forming the window.
fn xh_past(model: &dyn DistributionModel, grid: &GridSpec, x0: f64) -> Result<LimitEstimate> {
    let seq = xh_sequence(model, grid)?;
    let start = seq.xs.iter().position(|&x| x >= x0).unwrap_or(seq.xs.len() - 1);
    let n = seq.xs.len() - start;
    let tail = SampledSequence {
        grid: GridSpec {
            x_start: seq.xs[start],
            count: n,
            window: n,
            ..*grid
        },
        xs: seq.xs[start..].to_vec(),
        values: seq.values[start..].to_vec(),
    };
    Ok(tail.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build, FamilySpec};

    fn fam(s: &str) -> Arc<dyn DistributionModel> {
        Arc::new(build(s.parse::<FamilySpec>().unwrap()).unwrap())
    }

    fn classifier() -> Classifier {
        Classifier::default()
    }

    fn grid(m: &dyn DistributionModel) -> GridSpec {
        GridSpec::for_model(m)
    }

    #[test]
    fn v_examples() {
        assert_eq!(v_lambda_gamma(2.0, 2.0), 0.5);
        assert_eq!(v_lambda_gamma(2.0, 1.0), 2f64.ln());
        // continuity through γ = 1
        assert!((v_lambda_gamma(2.0, 1.0 + 1e-9) - 2f64.ln()).abs() < 1e-8);
        assert!((v_lambda_gamma(2.0, 1.0 + 1e-3) - (2f64.powf(-1e-3) - 1.0) / -1e-3).abs() < 1e-12);
    }

    #[test]
    fn verdict_combinators() {
        use Verdict::*;
        assert_eq!(Verdict::all(&[Member, Member]), Member);
        assert_eq!(Verdict::all(&[Member, Inconclusive]), Inconclusive);
        assert_eq!(Verdict::all(&[Inconclusive, NonMember]), NonMember);
        assert_eq!(Verdict::agreement(&[NonMember, NonMember]), NonMember);
        assert_eq!(Verdict::agreement(&[Member, NonMember]), Inconclusive);
    }

    #[test]
    fn convergence_rule() {
        let g = GridSpec::default_for(0.0);
        let est = |lower, upper, trend, last| LimitEstimate {
            lower,
            upper,
            trend,
            last,
            grid: g,
        };
        assert_eq!(converges_to(&est(1.99, 2.01, 0.0, 2.0), 2.0, 0.02).0, Verdict::Member);
        assert_eq!(converges_to(&est(2.0, 2.1, -0.05, 2.01), 2.0, 0.02).0, Verdict::Member);
        assert_eq!(converges_to(&est(5.0, 9.0, 1.0, 9.0), 2.0, 0.02).0, Verdict::NonMember);
        assert_eq!(converges_to(&est(2.5, 3.0, -0.1, 2.5), 2.0, 0.02).0, Verdict::Inconclusive);
        assert_eq!(
            converges_to(&est(2.0, f64::INFINITY, 1.0, f64::INFINITY), 2.0, 0.02).0,
            Verdict::NonMember
        );
    }

    #[test]
    fn e_and_d_for_pareto_and_exponential() {
        let c = classifier();
        let p = fam("pareto:a=2");
        let e = fam("exp:rate=1");
        let v = c.test_e(p.as_ref(), &grid(p.as_ref()), ERoute::Both);
        assert_eq!(v.verdict, Verdict::Member, "{}", v.reason);
        let r2 = v.evidence("tail_ratio(u=2)").unwrap();
        assert!((r2.lower - 0.25).abs() < 1e-12);
        let xh = v.evidence("xh").unwrap();
        assert!((xh.lower - 2.0).abs() < 1e-12);
        assert_eq!(c.test_e(e.as_ref(), &grid(e.as_ref()), ERoute::Both).verdict, Verdict::Member);
        assert_eq!(c.test_d(p.as_ref(), &grid(p.as_ref()), DRoute::Both).verdict, Verdict::Member);
        assert_eq!(c.test_d(e.as_ref(), &grid(e.as_ref()), DRoute::Both).verdict, Verdict::NonMember);
    }

    #[test]
    fn long_tail_examples() {
        let c = classifier();
        for (s, want) in [
            ("pareto:a=2", Verdict::Member),
            ("exp:rate=1", Verdict::NonMember),
            ("weibull:shape=0.5,scale=1", Verdict::Member),
        ] {
            let m = fam(s);
            let v = c.test_l(m.as_ref(), &grid(m.as_ref()));
            assert_eq!(v.verdict, want, "{s}: {}", v.reason);
        }
        let e = fam("exp:rate=1");
        let v = c.test_l(e.as_ref(), &grid(e.as_ref()));
        assert!((v.evidence("tail_shift(y=1)").unwrap().last - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn pitman_examples() {
        let q = QuadratureSpec::default();
        let p = fam("pareto:a=2");
        for kappa in [0.5, 1.0, 2.0] {
            let v = pitman_integral(p.as_ref(), kappa, 1e4, &q).unwrap();
            assert!((v - 1.0).abs() < 0.02, "kappa={kappa} {v}");
        }
        // vanishing range
        assert_eq!(pitman_integral(p.as_ref(), 1.0, 1.0, &q).unwrap(), 0.0);
        assert!(pitman_integral(p.as_ref(), 1.0, 1.0 + 1e-9, &q).unwrap() < 1e-7);
        // light tail: κ x h(x) - H(x) = (κ - 1) x overflows the guard
        let e = fam("exp:rate=1");
        assert!(matches!(
            pitman_integral(e.as_ref(), 2.0, 1000.0, &q),
            Err(Error::OverflowGuard { .. })
        ));
    }

    #[test]
    fn pitman_route_is_gated_for_exponential() {
        let c = classifier();
        let e = fam("exp:rate=1");
        let v = c.test_s(e.as_ref(), &grid(e.as_ref()), SRoute::Pitman);
        assert_eq!(v.verdict, Verdict::Inconclusive);
        assert!(v.reason.contains("positive decrease not established"), "{}", v.reason);
        let v = c.test_s(e.as_ref(), &grid(e.as_ref()), SRoute::Both);
        assert_eq!(v.verdict, Verdict::NonMember, "{}", v.reason);
    }

    #[test]
    fn subexponential_examples() {
        let c = classifier();
        let p = fam("pareto:a=2");
        let v = c.test_s(p.as_ref(), &grid(p.as_ref()), SRoute::Both);
        assert_eq!(v.verdict, Verdict::Member, "{}", v.reason);
        let w = fam("weibull:shape=2,scale=1");
        let v = c.test_s(w.as_ref(), &grid(w.as_ref()), SRoute::SelfConvolution);
        assert_eq!(v.verdict, Verdict::NonMember, "{}", v.reason);
    }

    #[test]
    fn prop_bounds_on_pareto() {
        let c = classifier();
        let p = fam("pareto:a=2");
        let g = grid(p.as_ref());
        let b = c.check_xh_lower_bound(p.as_ref(), 2.0, &g).unwrap();
        assert!(!b.hypothesis_violated);
        assert!((b.fitted.unwrap().c - 1.0).abs() < 1e-12);
        assert!((b.rhs - 1.0).abs() < 1e-12);
        assert!(b.holds);
        let b = c.check_xh_lower_bound(p.as_ref(), 1.0, &g).unwrap();
        assert!(b.hypothesis_violated && b.holds && b.rhs == 0.0);
        let b = c.check_xh_upper_bound(p.as_ref(), 3.5, 2.0, &g).unwrap();
        assert!(!b.hypothesis_violated);
        assert!(b.holds, "{b:?}");
        assert!(b.observed.unwrap().upper <= b.rhs);
    }

    #[test]
    fn closure_preconditions_examples() {
        let c = classifier();
        let (p2, p3, e) = (fam("pareto:a=2"), fam("pareto:a=3"), fam("exp:rate=1"));
        let g = grid(p2.as_ref());
        let ok = c.check_closure_preconditions(p2.as_ref(), p3.as_ref(), &g).unwrap();
        assert!(ok.satisfied, "{}", ok.reason);
        assert!((ok.witness_delta.unwrap() - 2.0).abs() < 1e-9);
        let swapped = c.check_closure_preconditions(p3.as_ref(), p2.as_ref(), &g).unwrap();
        assert!(!swapped.satisfied && !swapped.ordered);
        let light = c
            .check_closure_preconditions(e.as_ref(), p2.as_ref(), &grid(e.as_ref()))
            .unwrap();
        assert!(!light.satisfied && !light.ordered);
    }

    #[test]
    fn verdicts_round_trip_through_json() {
        let c = classifier();
        let e = fam("exp:rate=1");
        let v = c.test_d(e.as_ref(), &grid(e.as_ref()), DRoute::Both);
        let s = serde_json::to_string(&v).unwrap();
        let back: ClassVerdict = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
