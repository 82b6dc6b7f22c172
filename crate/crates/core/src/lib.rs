//! Numerical tail classification for distributions on `(0, ∞)`.
//!
//! The crate estimates hazard-rate limits, Matuszewska indices and
//! Potter-type constants on geometric grids, convolves densities and tails
//! by log-space adaptive quadrature, and turns those estimates into
//! three-valued membership verdicts for the tail classes
//! `D` (dominated variation), `E` (extended rapid variation), `L` (long
//! tail), `S` (subexponential), `A = S ∩ E` and `D ∩ A`.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod classifiers;
pub mod convolution;
pub mod error;
pub mod float_serde;
pub mod models;
pub mod quadrature;

pub use asymptotics::{
    fit_potter, matuszewska_indices, xh_sequence, DEFAULT_INDEX_U_GRID, ratio_limit, xh_limits, GridSpec, IndexEstimate, IndexFlag, LimitEstimate,
    PotterDirection, PotterFit,
};
pub use classifiers::{
    pitman_integral, v_lambda_gamma, BoundCheck, BoundName, ClassId, ClassVerdict, Classifier, ClassifierConfig,
    ClosurePreconditions, ClosureReport, DRoute, ERoute, Evidence, SRoute, Verdict,
};
pub use convolution::{
    convolution_hazard, convolution_tail, convolve_density, max_sum_ratio, self_convolution_ratio, ConvolvedModel,
};
pub use error::{Error, Result};
pub use models::{build, DistributionModel, Family, FamilySpec};
pub use quadrature::QuadratureSpec;
