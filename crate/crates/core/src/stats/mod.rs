//! Regression and time-series statistics primitives.

mod hac;
mod lag_selection;
mod ols;
mod unit_root;

pub use hac::{hac_covariance, robust_covariance, HacCovariance, HacKernel};
pub use lag_selection::{hannan_quinn_criteria, select_var_lag};
pub use ols::{ols, OlsFit};
pub use unit_root::{adf, adf_critical_values, ar1, AdfResult, Ar1Fit, Deterministic};
pub use crate::scalar::{correlation, mean, median, std_dev};
