//! Bivariate vector error-correction model estimated by reduced-rank regression.
//!
//! ```text
//! Δw_t = Σ_{i=1..q} B_i Δw_{t-i} + a (bᵀ w_{t-1} + c0) + c1 + u_t,   w_t = [d_t, p_t]ᵀ
//! ```
//!
//! The levels carry linear trends through the unrestricted drift `c1` while the
//! cointegration relation holds only a constant. Because `a·c0 + c1` is one free
//! constant in the likelihood, the eigenproblem is solved with an unrestricted
//! constant in the short-run regressors and `c0` is identified afterwards as the
//! value that gives the equilibrium error zero sample mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, least_squares, solve_lower, solve_upper, spd_inverse, symmetric_eigen, Matrix};
use crate::scalar::{mean, Scalar};

/// Deterministic terms of the VECM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VecmDeterministic {
    NoDeterministic,
    /// Constant inside the relation, linear trends in the levels.
    #[default]
    ConstantInRelation,
    TrendInRelation,
}

#[derive(Debug, Clone)]
pub struct VecmFit<T> {
    /// Number of lagged differences `q`.
    pub lags: usize,
    pub deterministic: VecmDeterministic,
    /// Descending, in `[0, 1)`.
    pub eigenvalues: Vec<T>,
    /// Eigenvectors as columns, scaled so that `vᵀ S11 v = 1`.
    pub eigenvectors: Matrix<T>,
    /// Cointegration vector normalised so that its first (dividend) entry is one.
    pub coint_vector: Vec<T>,
    /// Constant inside the relation.
    pub c0: T,
    /// Adjustment speeds `a`.
    pub adjustment: Vec<T>,
    /// `B_1 .. B_q`; row = equation, column = lagged variable.
    pub short_run: Vec<Matrix<T>>,
    /// Unrestricted drift `c1`.
    pub drift: Vec<T>,
    /// `T x 2` residuals `u_t`.
    pub residuals: Matrix<T>,
    /// Effective observations after lag trimming.
    pub n_obs: usize,
    pub s00: Matrix<T>,
    pub s01: Matrix<T>,
    pub s11: Matrix<T>,
}

impl<T: Scalar> VecmFit<T> {
    /// Long-run price coefficient `β` in `d_t = β p_t + ...`.
    pub fn beta(&self) -> T {
        -self.coint_vector[1]
    }

    fn impact(&self) -> Result<Matrix<T>> {
        let s00_inv = spd_inverse(&self.s00)?;
        Ok(self.s01.transpose().matmul(&s00_inv).matmul(&self.s01))
    }

    /// `‖(S10 S00⁻¹ S01 - λ S11) v‖` for every eigenpair.
    pub fn eigen_residual_norms(&self) -> Result<Vec<T>> {
        let m = self.impact()?;
        Ok((0..self.eigenvalues.len())
            .map(|i| {
                let v = self.eigenvectors.column(i);
                let mv = m.mul_vec(&v);
                let sv = self.s11.mul_vec(&v);
                mv.iter()
                    .zip(&sv)
                    .map(|(&a, &b)| {
                        let r = a - self.eigenvalues[i] * b;
                        r * r
                    })
                    .sum::<T>()
                    .sqrt()
            })
            .collect())
    }

    /// Equilibrium error `bᵀ w_t + c0` for each row of `w`.
    pub fn equilibrium_error(&self, w: &Matrix<T>) -> Vec<T> {
        (0..w.rows())
            .map(|t| w.row(t).iter().zip(&self.coint_vector).map(|(&x, &b)| x * b).sum::<T>() + self.c0)
            .collect()
    }
}

/// Estimates the VECM on the `n x 2` level matrix `w = [d p]` with `lags` lagged differences.
pub fn vecm_fit<T: Scalar>(w: &Matrix<T>, lags: usize, det: VecmDeterministic) -> Result<VecmFit<T>> {
    if det != VecmDeterministic::ConstantInRelation {
        return Err(Error::UnsupportedDeterministic(format!(
            "{det:?}; only a constant in the relation with trending levels is supported"
        )));
    }
    let (n, k) = (w.rows(), w.cols());
    if k != 2 {
        return Err(Error::DimensionMismatch(format!("expected 2 columns [d p], got {k}")));
    }
    if n <= 2 * lags + 10 {
        return Err(Error::InsufficientData {
            needed: 2 * lags + 11,
            got: n,
            context: "VECM rows".into(),
        });
    }
    let dw = |t: usize, c: usize| w[(t, c)] - w[(t - 1, c)];
    let t_eff = n - 1 - lags;
    let first = lags + 1;
    let z = Matrix::from_fn(t_eff, 1 + k * lags, |i, c| {
        if c == 0 {
            T::one()
        } else {
            let lag = (c - 1) / k + 1;
            dw(first + i - lag, (c - 1) % k)
        }
    });
    let y01 = Matrix::from_fn(t_eff, 2 * k, |i, c| {
        let t = first + i;
        if c < k {
            dw(t, c)
        } else {
            w[(t - 1, c - k)]
        }
    });
    let ls = least_squares(&z, &y01)?;
    let resid = y01.sub(&z.matmul(&ls.coefficients));
    let r0 = resid.select_columns(&[0, 1]);
    let r1 = resid.select_columns(&[2, 3]);
    let scale = T::one() / T::of_usize(t_eff);
    let s00 = r0.tr_mul(&r0).scale(scale);
    let s01 = r0.tr_mul(&r1).scale(scale);
    let s11 = r1.tr_mul(&r1).scale(scale);

    let s00_inv = spd_inverse(&s00)?;
    let m = s01.transpose().matmul(&s00_inv).matmul(&s01);
    let l = cholesky(&s11)?;
    let lm = solve_lower(&l, &m);
    let mut c = solve_lower(&l, &lm.transpose());
    for i in 0..k {
        for j in 0..i {
            let s = (c[(i, j)] + c[(j, i)]) / T::of(2.0);
            c[(i, j)] = s;
            c[(j, i)] = s;
        }
    }
    let (raw_values, u) = symmetric_eigen(&c)?;
    let eigenvectors = solve_upper(&l.transpose(), &u);
    let one_minus = T::one() - T::epsilon();
    let eigenvalues: Vec<T> = raw_values.iter().map(|&x| x.max(T::zero()).min(one_minus)).collect();

    let v = eigenvectors.column(0);
    if !(v[0].abs() > T::epsilon() * v[1].abs()) {
        return Err(Error::Degenerate("leading cointegration vector has no dividend loading".into()));
    }
    let b: Vec<T> = v.iter().map(|&x| x / v[0]).collect();
    let bsb = s11.quad_form(&b);
    let adjustment: Vec<T> = s01.mul_vec(&b).into_iter().map(|x| x / bsb).collect();

    let ec: Vec<T> = (0..t_eff)
        .map(|i| (0..k).map(|c| b[c] * w[(first + i - 1, c)]).sum())
        .collect();
    let target = Matrix::from_fn(t_eff, k, |i, c| dw(first + i, c) - adjustment[c] * ec[i]);
    let sr = least_squares(&z, &target)?;
    let residuals = target.sub(&z.matmul(&sr.coefficients));
    let short_run = (1..=lags)
        .map(|lag| Matrix::from_fn(k, k, |eq, var| sr.coefficients[(1 + (lag - 1) * k + var, eq)]))
        .collect();
    let c0 = -mean(&ec);
    let drift = (0..k).map(|c| sr.coefficients[(0, c)] - adjustment[c] * c0).collect();

    Ok(VecmFit {
        lags,
        deterministic: det,
        eigenvalues,
        eigenvectors,
        coint_vector: b,
        c0,
        adjustment,
        short_run,
        drift,
        residuals,
        n_obs: t_eff,
        s00,
        s01,
        s11,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankTestKind {
    Trace,
    MaxEigenvalue,
}

// MacKinnon, Haug and Michelis (1999) critical values for a constant in the
// relation and linear trends in the data, indexed by k - r = 1, 2.
// Columns are the 90%, 95% and 99% quantiles.
const TRACE_CRITICAL: [[f64; 3]; 2] = [[2.7055, 3.8415, 6.6349], [13.4294, 15.4943, 19.9349]];
const MAX_EIGEN_CRITICAL: [[f64; 3]; 2] = [[2.7055, 3.8415, 6.6349], [12.2971, 14.2639, 18.5200]];

#[derive(Debug, Clone, PartialEq)]
pub struct RankHypothesis<T> {
    /// `0` for `r = 0`, `1` for `r ≤ 1`.
    pub null_rank: usize,
    pub statistic: T,
    /// 10%, 5% and 1% critical values.
    pub critical_values: [f64; 3],
}

impl<T: Scalar> RankHypothesis<T> {
    pub fn critical_5pct(&self) -> f64 {
        self.critical_values[1]
    }

    pub fn rejects_at_5pct(&self) -> bool {
        self.statistic.as_f64() > self.critical_values[1]
    }

    pub fn rejects_at_1pct(&self) -> bool {
        self.statistic.as_f64() > self.critical_values[2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTestReport<T> {
    pub kind: RankTestKind,
    pub hypotheses: Vec<RankHypothesis<T>>,
    pub n_obs: usize,
}

impl<T: Scalar> RankTestReport<T> {
    /// Smallest null rank that is not rejected at 5%.
    pub fn selected_rank(&self) -> usize {
        self.hypotheses
            .iter()
            .find(|h| !h.rejects_at_5pct())
            .map_or(self.hypotheses.len(), |h| h.null_rank)
    }
}

fn log_one_minus<T: Scalar>(x: T) -> T {
    (T::one() - x).ln()
}

/// Trace statistics `-T Σ_{i>r} ln(1 - λ_i)` for `r = 0` and `r ≤ 1`.
pub fn trace_test<T: Scalar>(fit: &VecmFit<T>) -> RankTestReport<T> {
    let tt = T::of_usize(fit.n_obs);
    let k = fit.eigenvalues.len();
    let hypotheses = (0..k)
        .map(|r| RankHypothesis {
            null_rank: r,
            statistic: -tt * fit.eigenvalues[r..].iter().map(|&l| log_one_minus(l)).sum::<T>(),
            critical_values: TRACE_CRITICAL[k - r - 1],
        })
        .collect();
    RankTestReport { kind: RankTestKind::Trace, hypotheses, n_obs: fit.n_obs }
}

/// Maximum-eigenvalue statistics `-T ln(1 - λ_{r+1})`.
pub fn max_eigen_test<T: Scalar>(fit: &VecmFit<T>) -> RankTestReport<T> {
    let tt = T::of_usize(fit.n_obs);
    let k = fit.eigenvalues.len();
    let hypotheses = (0..k)
        .map(|r| RankHypothesis {
            null_rank: r,
            statistic: -tt * log_one_minus(fit.eigenvalues[r]),
            critical_values: MAX_EIGEN_CRITICAL[k - r - 1],
        })
        .collect();
    RankTestReport { kind: RankTestKind::MaxEigenvalue, hypotheses, n_obs: fit.n_obs }
}

/// χ²(1) 5% and 1% critical values.
pub const CHI2_1_CRITICAL_5PCT: f64 = 3.841_458_820_694_124;
pub const CHI2_1_CRITICAL_1PCT: f64 = 6.634_896_601_021_214;

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionTest<T> {
    pub hypothesis: Vec<T>,
    /// Likelihood-ratio statistic `T ln((1 - λ̃)/(1 - λ₁))`.
    pub statistic: T,
    pub restricted_eigenvalue: T,
    pub df: usize,
}

impl<T: Scalar> RestrictionTest<T> {
    pub fn rejects_at_5pct(&self) -> bool {
        self.statistic.as_f64() > CHI2_1_CRITICAL_5PCT
    }

    pub fn rejects_at_1pct(&self) -> bool {
        self.statistic.as_f64() > CHI2_1_CRITICAL_1PCT
    }
}

/// LR test that the rank-one cointegration space is spanned by `hypothesis`.
pub fn restriction_test<T: Scalar>(fit: &VecmFit<T>, hypothesis: &[T]) -> Result<RestrictionTest<T>> {
    let k = fit.s11.rows();
    if hypothesis.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "restriction has {} entries, system has {k} variables",
            hypothesis.len()
        )));
    }
    let denom = fit.s11.quad_form(hypothesis);
    if !(denom > T::zero()) {
        return Err(Error::InvalidArgument("restriction vector is zero".into()));
    }
    let restricted = (fit.impact()?.quad_form(hypothesis) / denom).max(T::zero());
    let lambda1 = fit.eigenvalues[0];
    let statistic = (T::of_usize(fit.n_obs) * (log_one_minus(restricted) - log_one_minus(lambda1)))
        .max(T::zero());
    Ok(RestrictionTest {
        hypothesis: hypothesis.to_vec(),
        statistic,
        restricted_eigenvalue: restricted,
        df: 1,
    })
}
