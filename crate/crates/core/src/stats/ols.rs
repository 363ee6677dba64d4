use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::scalar::{mean, Scalar};

/// Ordinary least squares fit.
///
/// With an intercept, `coefficients[0]` is the intercept and the remaining
/// entries follow the regressor columns in order.
#[derive(Debug, Clone)]
pub struct OlsFit<T> {
    pub coefficients: Vec<T>,
    pub residuals: Vec<T>,
    /// Centred R² against the intercept-only model (uncentred without an intercept).
    pub r_squared: T,
    pub n_obs: usize,
    /// Number of estimated coefficients, intercept included.
    pub dim: usize,
    pub has_intercept: bool,
    pub ssr: T,
    pub(crate) xtx_inv: Matrix<T>,
}

impl<T: Scalar> OlsFit<T> {
    /// Slope coefficients, i.e. without the intercept.
    pub fn slopes(&self) -> &[T] {
        if self.has_intercept {
            &self.coefficients[1..]
        } else {
            &self.coefficients
        }
    }

    pub fn intercept(&self) -> Option<T> {
        self.has_intercept.then(|| self.coefficients[0])
    }

    /// `(XᵀX)⁻¹` of the full design.
    pub fn xtx_inverse(&self) -> &Matrix<T> {
        &self.xtx_inv
    }

    /// Residual variance with the `n - k` divisor.
    pub fn sigma2(&self) -> T {
        self.ssr / T::of_usize(self.n_obs - self.dim)
    }

    /// Classical `σ² (XᵀX)⁻¹` covariance.
    pub fn homoskedastic_covariance(&self) -> Matrix<T> {
        self.xtx_inv.scale(self.sigma2())
    }

    /// Full design matrix (intercept column first when present).
    pub fn design(&self, x: &Matrix<T>) -> Matrix<T> {
        design_matrix(x, self.has_intercept)
    }
}

pub(crate) fn design_matrix<T: Scalar>(x: &Matrix<T>, intercept: bool) -> Matrix<T> {
    if !intercept {
        return x.clone();
    }
    Matrix::from_fn(x.rows(), x.cols() + 1, |i, j| if j == 0 { T::one() } else { x[(i, j - 1)] })
}

/// Least squares of `y` on the columns of `x`, optionally with an intercept.
pub fn ols<T: Scalar>(y: &[T], x: &Matrix<T>, intercept: bool) -> Result<OlsFit<T>> {
    let n = y.len();
    if x.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "response has {n} rows, regressors {}",
            x.rows()
        )));
    }
    let design = design_matrix(x, intercept);
    let dim = design.cols();
    if n <= dim {
        return Err(Error::InsufficientData {
            needed: dim + 1,
            got: n,
            context: "ols observations".into(),
        });
    }
    let ls = least_squares(&design, &Matrix::column_vector(y))?;
    let coefficients = ls.coefficients.column(0);
    let fitted = design.mul_vec(&coefficients);
    let residuals: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let ssr: T = residuals.iter().map(|&e| e * e).sum();
    let sst: T = if intercept {
        let m = mean(y);
        y.iter().map(|&v| (v - m) * (v - m)).sum()
    } else {
        y.iter().map(|&v| v * v).sum()
    };
    let r_squared = if sst > T::zero() {
        (T::one() - ssr / sst).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    Ok(OlsFit {
        coefficients,
        residuals,
        r_squared,
        n_obs: n,
        dim,
        has_intercept: intercept,
        ssr,
        xtx_inv: ls.xtx_inverse(),
    })
}
