//! Small dense linear algebra over a generic [`Scalar`].
//!
//! Only what the estimators need: Householder least squares with a rank check,
//! Cholesky factorisation, triangular solves and a Jacobi eigensolver for
//! symmetric matrices. Storage is row-major.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds an `n x k` matrix from `k` equally long columns.
    pub fn from_columns(columns: &[&[T]]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn column_vector(values: &[T]) -> Self {
        Self { rows: values.len(), cols: 1, data: values.to_vec() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `selfᵀ · other` without materialising the transpose.
    pub fn tr_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "tr_mul dimension mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            let a = self.row(r);
            let b = other.row(r);
            for (i, &ai) in a.iter().enumerate() {
                for (j, &bj) in b.iter().enumerate() {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + ai * bj;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Quadratic form `vᵀ · self · v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        self.mul_vec(v).iter().zip(v).map(|(&a, &b)| a * b).sum()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solution of a (multi right-hand side) least-squares problem.
#[derive(Debug, Clone)]
pub struct LeastSquares<T> {
    /// `k x m` coefficients, one column per right-hand side.
    pub coefficients: Matrix<T>,
    /// Upper-triangular factor of the design, `X = Q R`.
    pub r: Matrix<T>,
}

impl<T: Scalar> LeastSquares<T> {
    /// `(XᵀX)⁻¹ = R⁻¹ R⁻ᵀ`.
    pub fn xtx_inverse(&self) -> Matrix<T> {
        let r_inv = upper_triangular_inverse(&self.r);
        r_inv.matmul(&r_inv.transpose())
    }
}

/// Householder QR least squares of `y` on `x`; fails on a rank-deficient design.
pub fn least_squares<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<LeastSquares<T>> {
    let (n, k) = (x.rows(), x.cols());
    if y.rows() != n {
        return Err(Error::DimensionMismatch(format!("design has {n} rows, response {}", y.rows())));
    }
    if n < k || k == 0 {
        return Err(Error::InsufficientData {
            needed: k.max(1),
            got: n,
            context: "least squares".into(),
        });
    }
    let m = y.cols();
    let mut a = x.clone();
    let mut b = y.clone();
    let mut v = vec![T::zero(); n];
    for j in 0..k {
        let norm = (j..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if a[(j, j)] > T::zero() { -norm } else { norm };
        for i in j..n {
            v[i] = a[(i, j)];
        }
        v[j] = v[j] - alpha;
        let vnorm2: T = (j..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::of(2.0);
        for c in j..k {
            let s: T = (j..n).map(|i| v[i] * a[(i, c)]).sum::<T>() * two / vnorm2;
            for i in j..n {
                a[(i, c)] = a[(i, c)] - s * v[i];
            }
        }
        for c in 0..m {
            let s: T = (j..n).map(|i| v[i] * b[(i, c)]).sum::<T>() * two / vnorm2;
            for i in j..n {
                b[(i, c)] = b[(i, c)] - s * v[i];
            }
        }
    }
    let r = Matrix::from_fn(k, k, |i, j| if j >= i { a[(i, j)] } else { T::zero() });
    let max_diag = (0..k).fold(T::zero(), |acc, i| acc.max(r[(i, i)].abs()));
    let tol = max_diag * T::epsilon() * T::of_usize(n.max(k));
    if let Some(j) = (0..k).find(|&j| r[(j, j)].abs() <= tol) {
        return Err(Error::SingularDesign(format!(
            "design column {j} is linearly dependent on the preceding columns"
        )));
    }
    let qtb = Matrix::from_fn(k, m, |i, j| b[(i, j)]);
    let coefficients = solve_upper(&r, &qtb);
    Ok(LeastSquares { coefficients, r })
}

/// Back substitution `R X = B` for upper-triangular `R`.
pub fn solve_upper<T: Scalar>(r: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let k = r.rows();
    let mut x = Matrix::zeros(k, b.cols());
    for c in 0..b.cols() {
        for i in (0..k).rev() {
            let mut s = b[(i, c)];
            for j in i + 1..k {
                s = s - r[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = s / r[(i, i)];
        }
    }
    x
}

/// Forward substitution `L X = B` for lower-triangular `L`.
pub fn solve_lower<T: Scalar>(l: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let k = l.rows();
    let mut x = Matrix::zeros(k, b.cols());
    for c in 0..b.cols() {
        for i in 0..k {
            let mut s = b[(i, c)];
            for j in 0..i {
                s = s - l[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

fn upper_triangular_inverse<T: Scalar>(r: &Matrix<T>) -> Matrix<T> {
    solve_upper(r, &Matrix::identity(r.rows()))
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch("cholesky of a non-square matrix".into()));
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::SingularDesign(format!(
                "matrix is not positive definite (pivot {j})"
            )));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let l = cholesky(a)?;
    let l_inv = solve_lower(&l, &Matrix::identity(a.rows()));
    Ok(l_inv.tr_mul(&l_inv))
}

pub fn log_det_spd<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let l = cholesky(a)?;
    Ok((0..a.rows()).map(|i| l[(i, i)].ln()).sum::<T>() * T::of(2.0))
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues are returned in descending order; eigenvector `i` is column `i`
/// of the returned matrix and has unit Euclidean norm.
pub fn symmetric_eigen<T: Scalar>(a: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch("eigen-decomposition of a non-square matrix".into()));
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale = m.max_abs().max(T::min_positive_value());
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= T::epsilon() * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&i| m[(i, i)]).collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("eigenvalues are not finite".into()));
    }
    let vectors = v.select_columns(&order);
    Ok((values, vectors))
}
