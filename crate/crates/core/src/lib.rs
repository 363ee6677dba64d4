//! Dividend-price ratio construction, cointegration estimation and
//! long-horizon return predictability.
//!
//! Every estimator is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod adl;
pub mod error;
pub mod johansen;
pub mod linalg;
pub mod oos;
pub mod predictability;
pub mod ratios;
mod scalar;
pub mod selftest;
pub mod series;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use adl::{adl_fit, ecm_cointegration_test, long_run_solution, long_run_solution_with_step, EcmTest};
pub use johansen::{max_eigen_test, restriction_test, trace_test, vecm_fit, RankTestReport, RestrictionTest, VecmDeterministic};
pub use oos::{evaluate, forecast_at, r2_os, BetaMode, OosScheme};
pub use predictability::{
    cs_breakdown, cs_decomposition, run_multivariate, run_regression, CsSettings, HacConfig, LagRule, Predictor,
    PredictabilityData, RegressionSpec, SampleWindow, Sampling, Target,
};
pub use ratios::{build_ratios, recursive_beta_path, BetaProvenance, Engine};
pub use series::{
    build_annual_panel, horizon_aggregate, load_monthly_csv, ColumnSchema, PanelField, ReinvestmentRate, YearMonth,
};

pub type Matrix = linalg::Matrix<f64>;
pub type MonthlySeries = series::MonthlySeries<f64>;
pub type MonthlyRecord = series::MonthlyRecord<f64>;
pub type AnnualPanel = series::AnnualPanel<f64>;
pub type OlsFit = stats::OlsFit<f64>;
pub type HacCovariance = stats::HacCovariance<f64>;
pub type VecmFit = johansen::VecmFit<f64>;
pub type AdlFit = adl::AdlFit<f64>;
pub type LongRunSolution = adl::LongRunSolution<f64>;
pub type RatioPanel = ratios::RatioPanel<f64>;
pub type BetaPath = ratios::BetaPath<f64>;
pub type RegressionResult = predictability::RegressionResult<f64>;
pub type OosReport = oos::OosReport<f64>;
