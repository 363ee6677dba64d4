use crate::error::{Error, Result};
use crate::linalg::{least_squares, log_det_spd, Matrix};
use crate::scalar::Scalar;

/// Hannan-Quinn criterion of levels VARs with a constant for `q = 1..=max_lag`,
/// all estimated on the common sample that drops the first `max_lag` rows.
pub fn hannan_quinn_criteria<T: Scalar>(levels: &Matrix<T>, max_lag: usize) -> Result<Vec<T>> {
    let (n, k) = (levels.rows(), levels.cols());
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max_lag must be at least one".into()));
    }
    let needed = max_lag + k * max_lag + 2;
    if n < needed {
        return Err(Error::InsufficientData { needed, got: n, context: "VAR lag selection".into() });
    }
    let t_eff = n - max_lag;
    let y = Matrix::from_fn(t_eff, k, |i, j| levels[(i + max_lag, j)]);
    let tt = T::of_usize(t_eff);
    let penalty_rate = T::of(2.0) * tt.ln().ln() / tt;
    (1..=max_lag)
        .map(|q| {
            let x = Matrix::from_fn(t_eff, 1 + k * q, |i, c| {
                if c == 0 {
                    T::one()
                } else {
                    let lag = (c - 1) / k + 1;
                    levels[(i + max_lag - lag, (c - 1) % k)]
                }
            });
            let ls = least_squares(&x, &y)?;
            let resid = y.sub(&x.matmul(&ls.coefficients));
            let sigma = resid.tr_mul(&resid).scale(T::one() / tt);
            let n_params = T::of_usize(k * k * q + k);
            Ok(log_det_spd(&sigma)? + penalty_rate * n_params)
        })
        .collect()
}

/// Levels-VAR lag order minimising the Hannan-Quinn criterion.
pub fn select_var_lag<T: Scalar>(levels: &Matrix<T>, max_lag: usize) -> Result<usize> {
    let criteria = hannan_quinn_criteria(levels, max_lag)?;
    let (best, _) = criteria
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    Ok(best + 1)
}
