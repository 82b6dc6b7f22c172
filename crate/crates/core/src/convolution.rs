//! Lebesgue convolution of densities and tails, and the ratios built from
//! them (self-convolution, max-sum equivalence, convolution hazard).
//!
//! With supports starting at `a₁` and `a₂`, the sum `X₁ + X₂` lives on
//! `[a₁ + a₂, ∞)` and
//!
//! ```text
//! f₁⋆f₂(x)  = ∫_{a₁}^{x-a₂} f₁(y) f₂(x-y) dy
//! P(X₁+X₂ > x) = F̄₂(x - a₁) + ∫_{a₂}^{x-a₁} F̄₁(x-y) f₂(y) dy
//! ```
//!
//! The first tail term is the usual `F̄₂(x) + ∫ F̄₁(x-y) dF₂(y)` once the
//! stretch where `F̄₁ = 1` is folded in. Both integrals are evaluated in
//! log space by [`crate::quadrature`].

use crate::error::{Error, Result};
use crate::models::DistributionModel;
use crate::quadrature::{integrate_exp_lenient, integrate_exp_split, QuadratureSpec};
use std::fmt;
use std::sync::Arc;

/// `ln(e^a + e^b)`.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

fn density_integrand<'a>(
    left: &'a dyn DistributionModel,
    right: &'a dyn DistributionModel,
) -> impl Fn(f64, f64) -> f64 + 'a {
    let lo2 = right.support_low();
    // y ranges over [a₁, x - a₂]; the complement r = x - a₂ - y gives x - y = a₂ + r.
    move |y, r| left.log_density(y) + right.log_density(lo2 + r)
}

fn tail_integrand<'a>(
    left: &'a dyn DistributionModel,
    right: &'a dyn DistributionModel,
) -> impl Fn(f64, f64) -> f64 + 'a {
    let lo1 = left.support_low();
    // y ranges over [a₂, x - a₁]; x - y = a₁ + r.
    move |y, r| left.log_tail(lo1 + r) + right.log_density(y)
}

/// `ln f₁⋆f₂(x)`; `-inf` at or below the combined support edge.
pub fn log_convolve_density(
    left: &dyn DistributionModel,
    right: &dyn DistributionModel,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let (lo1, lo2) = (left.support_low(), right.support_low());
    if !(x > lo1 + lo2) {
        return Ok(f64::NEG_INFINITY);
    }
    let phi = density_integrand(left, right);
    Ok(integrate_exp_split(&phi, lo1, x - lo2, quad)?.log_value)
}

/// Density of the sum, `f₁⋆f₂(x)`.
pub fn convolve_density(
    left: &dyn DistributionModel,
    right: &dyn DistributionModel,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(log_convolve_density(left, right, x, quad)?.exp())
}

/// `ln P(X₁ + X₂ > x)`; `0` at or below the combined support edge.
pub fn convolution_tail(
    left: &dyn DistributionModel,
    right: &dyn DistributionModel,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let (lo1, lo2) = (left.support_low(), right.support_low());
    if !(x > lo1 + lo2) {
        return Ok(0.0);
    }
    let phi = tail_integrand(left, right);
    let integral = integrate_exp_split(&phi, lo2, x - lo1, quad)?.log_value;
    Ok(log_add_exp(right.log_tail(x - lo1), integral).min(0.0))
}

/// `F̄^{2*}(x) / F̄(x)`.
pub fn self_convolution_ratio(model: &dyn DistributionModel, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    Ok((convolution_tail(model, model, x, quad)? - model.log_tail(x)).exp())
}

/// `P(X₁ + X₂ > x) / (F̄₁(x) + F̄₂(x))`.
pub fn max_sum_ratio(
    left: &dyn DistributionModel,
    right: &dyn DistributionModel,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let tail = convolution_tail(left, right, x, quad)?;
    Ok((tail - log_add_exp(left.log_tail(x), right.log_tail(x))).exp())
}

/// Hazard rate of the sum, `f₁⋆f₂(x) / P(X₁ + X₂ > x)`.
pub fn convolution_hazard(
    left: &dyn DistributionModel,
    right: &dyn DistributionModel,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let density = log_convolve_density(left, right, x, quad)?;
    let tail = convolution_tail(left, right, x, quad)?;
    let h = (density - tail).exp();
    if h.is_nan() {
        return Err(Error::Domain {
            x,
            support_low: left.support_low() + right.support_low(),
        });
    }
    Ok(h)
}

/// The distribution of `X₁ + X₂`, evaluated by quadrature on demand.
///
/// It implements [`DistributionModel`], so every asymptotic estimate and
/// class test applies to convolutions unchanged. Quadrature that misses its
/// tolerance inside the trait methods yields the best available estimate;
/// use the free functions of this module to see the failure.
#[derive(Clone)]
pub struct ConvolvedModel {
    left: Arc<dyn DistributionModel>,
    right: Arc<dyn DistributionModel>,
    quad: QuadratureSpec,
}

impl ConvolvedModel {
    pub fn new<L, R>(left: L, right: R, quad: QuadratureSpec) -> Self
    where
        L: DistributionModel + 'static,
        R: DistributionModel + 'static,
    {
        Self::from_arcs(Arc::new(left), Arc::new(right), quad)
    }

    pub fn from_arcs(left: Arc<dyn DistributionModel>, right: Arc<dyn DistributionModel>, quad: QuadratureSpec) -> Self {
        ConvolvedModel { left, right, quad }
    }

    pub fn left(&self) -> &dyn DistributionModel {
        self.left.as_ref()
    }

    pub fn right(&self) -> &dyn DistributionModel {
        self.right.as_ref()
    }

    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }
}

impl fmt::Debug for ConvolvedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvolvedModel")
            .field("left", &self.left.label())
            .field("right", &self.right.label())
            .field("quad", &self.quad)
            .finish()
    }
}

impl DistributionModel for ConvolvedModel {
    fn support_low(&self) -> f64 {
        self.left.support_low() + self.right.support_low()
    }

    fn log_density(&self, x: f64) -> f64 {
        let (lo1, lo2) = (self.left.support_low(), self.right.support_low());
        if !(x > lo1 + lo2) {
            return f64::NEG_INFINITY;
        }
        let phi = density_integrand(self.left.as_ref(), self.right.as_ref());
        integrate_exp_lenient(&phi, lo1, x - lo2, &self.quad)
    }

    fn log_tail(&self, x: f64) -> f64 {
        let (lo1, lo2) = (self.left.support_low(), self.right.support_low());
        if !(x > lo1 + lo2) {
            return 0.0;
        }
        let phi = tail_integrand(self.left.as_ref(), self.right.as_ref());
        let integral = integrate_exp_lenient(&phi, lo2, x - lo1, &self.quad);
        log_add_exp(self.right.log_tail(x - lo1), integral).min(0.0)
    }

    fn label(&self) -> String {
        format!("({})*({})", self.left.label(), self.right.label())
    }
}
