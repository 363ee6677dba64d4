//! Heteroskedasticity and autocorrelation consistent coefficient covariance.
//!
//! Sandwich form `B S B` with `B = (XᵀX)⁻¹` and
//! `S = Γ₀ + Σ_{j=1..L} w_j (Γ_j + Γ_jᵀ)`, `Γ_j = Σ_t g_t g_{t-j}ᵀ`, `g_t = x_t e_t`.
//! Hansen-Hodrick uses `w_j = 1`, Newey-West the Bartlett weights `1 - j/(L+1)`.

use serde::{Deserialize, Serialize};

use super::ols::{design_matrix, OlsFit};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HacKernel {
    HansenHodrick,
    NeweyWest,
}

impl HacKernel {
    fn weight<T: Scalar>(self, j: usize, lag: usize) -> T {
        match self {
            HacKernel::HansenHodrick => T::one(),
            HacKernel::NeweyWest => T::one() - T::of_usize(j) / T::of_usize(lag + 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HacCovariance<T> {
    pub matrix: Matrix<T>,
    /// Kernel that produced `matrix`.
    pub kernel: HacKernel,
    pub requested: HacKernel,
    pub lag: usize,
    /// Hansen-Hodrick gave a negative variance and Newey-West was used instead.
    pub fallback: bool,
}

impl<T: Scalar> HacCovariance<T> {
    pub fn standard_errors(&self) -> Vec<T> {
        (0..self.matrix.rows()).map(|i| self.matrix[(i, i)].max(T::zero()).sqrt()).collect()
    }

    pub fn t_stats(&self, coefficients: &[T]) -> Vec<T> {
        coefficients.iter().zip(self.standard_errors()).map(|(&b, se)| b / se).collect()
    }
}

fn scores<T: Scalar>(fit: &OlsFit<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    if x.rows() != fit.n_obs || x.cols() + usize::from(fit.has_intercept) != fit.dim {
        return Err(Error::DimensionMismatch(format!(
            "regressors are {}x{}, fit expects {} rows and {} coefficients",
            x.rows(),
            x.cols(),
            fit.n_obs,
            fit.dim
        )));
    }
    let design = design_matrix(x, fit.has_intercept);
    Ok(Matrix::from_fn(design.rows(), design.cols(), |i, j| design[(i, j)] * fit.residuals[i]))
}

fn lagged_cross<T: Scalar>(g: &Matrix<T>, j: usize) -> Matrix<T> {
    let k = g.cols();
    let mut out = Matrix::zeros(k, k);
    for t in j..g.rows() {
        let (a, b) = (g.row(t), g.row(t - j));
        for p in 0..k {
            for q in 0..k {
                out[(p, q)] = out[(p, q)] + a[p] * b[q];
            }
        }
    }
    out
}

fn sandwich<T: Scalar>(fit: &OlsFit<T>, meat: &Matrix<T>) -> Matrix<T> {
    let b = &fit.xtx_inv;
    let mut v = b.matmul(meat).matmul(b);
    // symmetrise away round-off
    for i in 0..v.rows() {
        for j in 0..i {
            let s = (v[(i, j)] + v[(j, i)]) / T::of(2.0);
            v[(i, j)] = s;
            v[(j, i)] = s;
        }
    }
    v
}

/// White heteroskedasticity-robust (HC0) covariance.
pub fn robust_covariance<T: Scalar>(fit: &OlsFit<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    let g = scores(fit, x)?;
    Ok(sandwich(fit, &lagged_cross(&g, 0)))
}

fn hac_matrix<T: Scalar>(fit: &OlsFit<T>, g: &Matrix<T>, kernel: HacKernel, lag: usize) -> Matrix<T> {
    let mut meat = lagged_cross(g, 0);
    for j in 1..=lag {
        let w: T = kernel.weight(j, lag);
        let gamma = lagged_cross(g, j);
        for p in 0..meat.rows() {
            for q in 0..meat.cols() {
                meat[(p, q)] = meat[(p, q)] + w * (gamma[(p, q)] + gamma[(q, p)]);
            }
        }
    }
    sandwich(fit, &meat)
}

/// HAC covariance with truncation lag `lag`.
///
/// A Hansen-Hodrick estimate with a negative diagonal entry is replaced by
/// Newey-West at the same lag and flagged through [`HacCovariance::fallback`].
pub fn hac_covariance<T: Scalar>(
    fit: &OlsFit<T>,
    x: &Matrix<T>,
    kernel: HacKernel,
    lag: usize,
) -> Result<HacCovariance<T>> {
    if lag >= fit.n_obs {
        return Err(Error::HacLagTooLarge { lag, n_obs: fit.n_obs });
    }
    let g = scores(fit, x)?;
    let matrix = hac_matrix(fit, &g, kernel, lag);
    let negative = (0..matrix.rows()).any(|i| matrix[(i, i)] < T::zero());
    if kernel == HacKernel::HansenHodrick && negative {
        return Ok(HacCovariance {
            matrix: hac_matrix(fit, &g, HacKernel::NeweyWest, lag),
            kernel: HacKernel::NeweyWest,
            requested: kernel,
            lag,
            fallback: true,
        });
    }
    Ok(HacCovariance { matrix, kernel, requested: kernel, lag, fallback: false })
}
