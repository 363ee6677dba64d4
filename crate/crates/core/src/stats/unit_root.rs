//! AR(1) persistence and the augmented Dickey-Fuller unit-root test.

use serde::{Deserialize, Serialize};

use super::ols::ols;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Fit<T> {
    pub phi: T,
    pub intercept: T,
    pub innovation_std: T,
    pub n_obs: usize,
}

/// OLS of `x_t` on `(1, x_{t-1})`.
pub fn ar1<T: Scalar>(series: &[T]) -> Result<Ar1Fit<T>> {
    if series.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: series.len(), context: "AR(1)".into() });
    }
    let lagged = &series[..series.len() - 1];
    let first = lagged[0];
    if lagged.iter().all(|&v| v == first) {
        return Err(Error::Degenerate("AR(1) of a constant series".into()));
    }
    let fit = ols(&series[1..], &Matrix::from_columns(&[lagged])?, true)?;
    let phi = fit.coefficients[1];
    if !phi.is_finite() || phi.abs() >= T::of(1.5) {
        return Err(Error::Degenerate(format!("AR(1) slope {phi} outside the sanity bound")));
    }
    let innovation_std = if fit.n_obs > 2 { fit.sigma2().sqrt() } else { T::zero() };
    Ok(Ar1Fit { phi, intercept: fit.coefficients[0], innovation_std, n_obs: fit.n_obs })
}

/// Deterministic terms of the Dickey-Fuller regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

// MacKinnon (2010), "Critical Values for Cointegration Tests", Queen's Economics
// Department Working Paper 1227, Table 2, N = 1. Rows are the 1%, 5% and 10%
// levels; the critical value is b∞ + b1/T + b2/T² + b3/T³.
const TAU_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const TAU_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const TAU_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// 1%, 5% and 10% Dickey-Fuller critical values for a regression with `n_obs` rows.
pub fn adf_critical_values(det: Deterministic, n_obs: usize) -> [f64; 3] {
    let table = match det {
        Deterministic::None => &TAU_NONE,
        Deterministic::Constant => &TAU_CONSTANT,
        Deterministic::ConstantTrend => &TAU_TREND,
    };
    let inv = 1.0 / n_obs as f64;
    table.map(|b| b[0] + b[1] * inv + b[2] * inv * inv + b[3] * inv * inv * inv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfResult<T> {
    /// t-ratio of the lagged level coefficient.
    pub statistic: T,
    pub lags: usize,
    pub deterministic: Deterministic,
    pub n_obs: usize,
    /// 1%, 5%, 10%
    pub critical_values: [f64; 3],
}

impl<T: Scalar> AdfResult<T> {
    /// Unit-root null rejected at the 1%, 5% and 10% levels.
    pub fn rejections(&self) -> [bool; 3] {
        self.critical_values.map(|cv| self.statistic.as_f64() < cv)
    }

    pub fn rejects_at_5pct(&self) -> bool {
        self.rejections()[1]
    }
}

/// `Δy_t = [c] [+ δt] + γ y_{t-1} + Σ_{i=1..lags} φ_i Δy_{t-i} + e_t`, testing `γ = 0`.
pub fn adf<T: Scalar>(series: &[T], lags: usize, det: Deterministic) -> Result<AdfResult<T>> {
    let n = series.len();
    let n_params = 1 + lags + match det {
        Deterministic::None => 0,
        Deterministic::Constant => 1,
        Deterministic::ConstantTrend => 2,
    };
    if n <= lags + 2 || n - 1 - lags <= n_params {
        return Err(Error::InsufficientData {
            needed: lags + n_params + 2,
            got: n,
            context: "ADF regression".into(),
        });
    }
    let diff: Vec<T> = series.windows(2).map(|w| w[1] - w[0]).collect();
    // rows are t = lags+1 .. n-1 in level indexing
    let rows: Vec<usize> = (lags + 1..n).collect();
    let y: Vec<T> = rows.iter().map(|&t| diff[t - 1]).collect();
    let mut columns: Vec<Vec<T>> = vec![rows.iter().map(|&t| series[t - 1]).collect()];
    for i in 1..=lags {
        columns.push(rows.iter().map(|&t| diff[t - 1 - i]).collect());
    }
    if det == Deterministic::ConstantTrend {
        columns.push(rows.iter().map(|&t| T::of_usize(t)).collect());
    }
    let refs: Vec<&[T]> = columns.iter().map(Vec::as_slice).collect();
    let x = Matrix::from_columns(&refs)?;
    let fit = ols(&y, &x, det != Deterministic::None)?;
    let idx = usize::from(fit.has_intercept);
    let var = fit.homoskedastic_covariance()[(idx, idx)];
    if !(var > T::zero()) {
        return Err(Error::Degenerate("zero variance of the level coefficient".into()));
    }
    Ok(AdfResult {
        statistic: fit.coefficients[idx] / var.sqrt(),
        lags,
        deterministic: det,
        n_obs: fit.n_obs,
        critical_values: adf_critical_values(det, fit.n_obs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptotic_critical_values() {
        let cv = adf_critical_values(Deterministic::Constant, usize::MAX);
        assert!((cv[1] + 2.86154).abs() < 1e-6);
        let cv = adf_critical_values(Deterministic::Constant, 100);
        // -2.86154 - 2.8903/100 - 4.234/1e4 - 40.04/1e6
        assert!((cv[1] - (-2.86154 - 0.028903 - 0.0004234 - 0.00004004)).abs() < 1e-9);
    }

    #[test]
    fn ar1_rejects_constant_and_short_input() {
        assert!(matches!(ar1(&[1.0, 1.0, 1.0, 1.0]), Err(Error::Degenerate(_))));
        assert!(matches!(ar1(&[1.0, 2.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn ar1_exact_geometric_path() {
        let x: Vec<f64> = (0..30).map(|i| 0.6f64.powi(i)).collect();
        let fit = ar1(&x).unwrap();
        assert!((fit.phi - 0.6).abs() < 1e-10);
        assert!(fit.intercept.abs() < 1e-10);
        assert_eq!(fit.n_obs, 29);
    }

    #[test]
    fn adf_needs_enough_rows() {
        assert!(matches!(
            adf(&[1.0, 2.0, 1.5, 1.7], 2, Deterministic::Constant),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn adf_strongly_mean_reverting_series_rejects() {
        let x: Vec<f64> = (0..200).map(|i| ((i * 7919 % 101) as f64 / 50.0) - 1.0).collect();
        let res = adf(&x, 1, Deterministic::Constant).unwrap();
        assert!(res.rejects_at_5pct(), "statistic {}", res.statistic);
        assert_eq!(res.n_obs, 198);
    }
}
