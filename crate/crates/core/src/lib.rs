//! Minimum-norm interpolation of constant labels on lifted 1-D feature
//! families, with exact (zero-crossing) and Monte Carlo risk analysis.
//!
//! Modules are layered bottom-up:
//! - [`featurelift`]: weighting ensembles, feature maps, training sets.
//! - [`interpolate`]: minimum weighted-norm interpolators and their coefficients.
//! - [`riskexact`]: learned-function evaluation, root finding, exact risks and theory bounds.
//! - [`mcestim`]: Monte Carlo risk estimators and distributional diagnostics.
//! - [`xprun`]: sweeps, validation checks and table emission.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod featurelift;
pub mod interpolate;
pub mod mcestim;
pub mod riskexact;
pub mod xprun;

pub use error::{Error, Result};

/// Crate version recorded in every run record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
