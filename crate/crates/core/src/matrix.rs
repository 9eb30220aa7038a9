//! Dense real linear algebra: matrices, vectors, characteristic polynomials,
//! Kalman matrices and the numerical rank test used for controllability.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot threshold for the Kalman rank test.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Real matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Unchecked constructor for results of internal arithmetic.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: &[f64], v: &[f64]) -> Self {
        let mut data = Vec::with_capacity(u.len() * v.len());
        for &ui in u {
            data.extend(v.iter().map(|&vj| ui * vj));
        }
        Self::from_raw(u.len(), v.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        assert_eq!(values.len(), self.rows);
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub(crate) fn ensure_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::Dimension(format!(
                "{what} must be square, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self.mul_vec_unchecked(v))
    }

    pub(crate) fn mul_vec_unchecked(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|x| c * x).collect())
    }

    /// `self += c * other`, shapes must agree.
    pub(crate) fn axpy(&mut self, c: f64, other: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub(crate) fn add_outer(&mut self, u: &[f64]) {
        let n = u.len();
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] += u[i] * u[j];
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        neumaier_sum((0..self.rows.min(self.cols)).map(|i| self[(i, i)]))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    /// Solves `self · X = rhs` by LU factorization with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.ensure_square("coefficient matrix")?;
        if rhs.rows != n {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, expected {n}",
                rhs.rows
            )));
        }
        let mut lu = self.clone();
        let mut x = rhs.clone();
        let m = rhs.cols;
        let scale = self.max_abs();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| lu[(a, k)].abs().total_cmp(&lu[(b, k)].abs()))
                .unwrap();
            if lu[(p, k)].abs() <= f64::EPSILON * scale * n as f64 || lu[(p, k)] == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                lu.swap_rows(p, k);
                x.swap_rows(p, k);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                if f == 0.0 {
                    continue;
                }
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
                for j in 0..m {
                    x[(i, j)] -= f * x[(k, j)];
                }
            }
        }
        for j in 0..m {
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / lu[(i, i)];
            }
        }
        Ok(x)
    }

    /// Lower Cholesky factor `L` with `self = L Lᵀ`; fails unless the
    /// matrix is numerically positive definite.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.ensure_square("Cholesky input")?;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::Singular);
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// Solves `L X = rhs` for lower-triangular `self`.
    pub fn forward_substitute(&self, rhs: &Self) -> Result<Self> {
        let n = self.ensure_square("triangular factor")?;
        if rhs.rows != n {
            return Err(Error::Dimension("triangular solve shape".into()));
        }
        let mut x = rhs.clone();
        for j in 0..rhs.cols {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self[(i, k)] * x[(k, j)];
                }
                if self[(i, i)] == 0.0 {
                    return Err(Error::Singular);
                }
                x[(i, j)] = s / self[(i, i)];
            }
        }
        Ok(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    /// Panics on incompatible shapes; use [`DenseMatrix::matmul`] to get an error.
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("incompatible matrix shapes")
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Real vector with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("empty vector".into()));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite vector entry".into()));
        }
        Ok(Self(entries))
    }

    /// Canonical basis vector `e_{k}` (zero-based `k`).
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for RealVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Neumaier's compensated summation.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Monic characteristic polynomial `xⁿ + a₁xⁿ⁻¹ + … + aₙ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicPolynomial {
    coefficients: Vec<f64>,
}

impl CharacteristicPolynomial {
    /// Wraps `a₁ … aₙ`.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        if coefficients.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    /// `a₁ … aₙ`; index 0 holds `a₁`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficient `a_k` for `1 ≤ k ≤ n`.
    pub fn a(&self, k: usize) -> f64 {
        self.coefficients[k - 1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().fold(1.0, |acc, &a| acc * x + a)
    }

    /// `p(A)` by Horner's rule on matrices.
    pub fn eval_matrix(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        let n = a.ensure_square("A")?;
        let mut acc = DenseMatrix::identity(n);
        for &coef in &self.coefficients {
            acc = acc.matmul(a)?;
            for i in 0..n {
                acc[(i, i)] += coef;
            }
        }
        Ok(acc)
    }
}

/// Characteristic polynomial by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &DenseMatrix) -> Result<CharacteristicPolynomial> {
    let n = a.ensure_square("A")?;
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite entries in A".into()));
    }
    // M₁ = I, a_k = −tr(A M_k)/k, M_{k+1} = A M_k + a_k I
    let mut coefficients = Vec::with_capacity(n);
    let mut m = DenseMatrix::identity(n);
    for k in 1..=n {
        let am = a.matmul(&m)?;
        let ak = -am.trace() / k as f64;
        coefficients.push(ak);
        m = am;
        for i in 0..n {
            m[(i, i)] += ak;
        }
    }
    CharacteristicPolynomial::new(coefficients)
}

/// Kalman matrix `[b, Ab, …, Aⁿ⁻¹b]`.
pub fn kalman_matrix(a: &DenseMatrix, b: &[f64]) -> Result<DenseMatrix> {
    let n = a.ensure_square("A")?;
    if b.len() != n {
        return Err(Error::Dimension(format!("b has length {}, A is {n}x{n}", b.len())));
    }
    let mut k = DenseMatrix::zeros(n, n);
    let mut col = b.to_vec();
    for j in 0..n {
        k.set_column(j, &col);
        if j + 1 < n {
            col = a.mul_vec_unchecked(&col);
        }
    }
    Ok(k)
}

/// Numerical rank by row echelon reduction with partial pivoting. A pivot
/// counts when its magnitude exceeds `tol` times the largest row norm.
pub fn rank(m: &DenseMatrix, tol: f64) -> usize {
    let threshold = tol * (0..m.rows()).map(|i| norm(m.row(i))).fold(0.0, f64::max);
    let mut work = m.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows)
            .max_by(|&x, &y| work[(x, c)].abs().total_cmp(&work[(y, c)].abs()))
            .unwrap();
        let pivot = work[(p, c)];
        if !(pivot.abs() > threshold) {
            continue;
        }
        work.swap_rows(p, r);
        for i in r + 1..rows {
            let f = work[(i, c)] / pivot;
            for j in c..cols {
                work[(i, j)] -= f * work[(r, j)];
            }
        }
        r += 1;
    }
    r
}

/// Kalman rank of `(A, b)` after scaling every Krylov column to unit norm.
pub fn kalman_rank(a: &DenseMatrix, b: &[f64], tol: f64) -> Result<usize> {
    let mut k = kalman_matrix(a, b)?;
    let n = k.rows();
    for j in 0..n {
        let col = k.column(j);
        let s = norm(&col);
        if s == 0.0 {
            // every later Krylov column is zero too
            k.set_column(j, &vec![0.0; n]);
        } else {
            k.set_column(j, &col.iter().map(|x| x / s).collect::<Vec<_>>());
        }
    }
    Ok(rank(&k, tol))
}

/// True when `(A, b)` satisfies the Kalman rank condition.
pub fn is_cyclic(a: &DenseMatrix, b: &[f64], tol: f64) -> Result<bool> {
    Ok(kalman_rank(a, b, tol)? == a.rows())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat2() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![-2.0, 1.0], vec![1.0, -2.0]]).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(DenseMatrix::new(0, 2, vec![]), Err(Error::Dimension(_))));
        assert!(matches!(DenseMatrix::new(2, 2, vec![1.0; 3]), Err(Error::Dimension(_))));
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
        assert!(RealVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn char_poly_examples() {
        let cp = char_poly(&heat2()).unwrap();
        assert_eq!(cp.coefficients(), &[4.0, 3.0]);

        let cp = char_poly(&DenseMatrix::zeros(2, 2)).unwrap();
        assert_eq!(cp.coefficients(), &[0.0, 0.0]);

        let cp = char_poly(&DenseMatrix::diag(&[1.0, 2.0, 3.0])).unwrap();
        for (got, want) in cp.coefficients().iter().zip([-6.0, 11.0, -6.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn char_poly_errors() {
        let rect = DenseMatrix::zeros(2, 3);
        assert!(matches!(char_poly(&rect), Err(Error::Dimension(_))));
    }

    #[test]
    fn cayley_hamilton_residual() {
        let a = DenseMatrix::from_rows(&[
            vec![0.3, -1.2, 0.5, 0.0],
            vec![0.7, 0.1, -0.4, 1.1],
            vec![-0.2, 0.9, 0.6, -0.3],
            vec![1.0, 0.0, -0.8, 0.2],
        ])
        .unwrap();
        let cp = char_poly(&a).unwrap();
        let res = cp.eval_matrix(&a).unwrap().frobenius_norm();
        assert!(res / a.frobenius_norm().powi(4) <= 1e-8);
    }

    #[test]
    fn kalman_matrix_examples() {
        let k = kalman_matrix(&heat2(), &[1.0, 0.0]).unwrap();
        assert_eq!(k.to_rows(), vec![vec![1.0, -2.0], vec![0.0, 1.0]]);

        let k = kalman_matrix(&DenseMatrix::identity(2), &[1.0, 0.0]).unwrap();
        assert_eq!(k.to_rows(), vec![vec![1.0, 1.0], vec![0.0, 0.0]]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = kalman_matrix(&heat2(), &[s, s]).unwrap();
        assert!((k[(0, 1)] + s).abs() < 1e-15 && (k[(1, 1)] + s).abs() < 1e-15);
        assert_eq!(rank(&k, DEFAULT_RANK_TOL), 1);

        assert!(matches!(
            kalman_matrix(&heat2(), &[1.0, 0.0, 0.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&DenseMatrix::identity(3), 1e-10), 3);
        assert_eq!(rank(&DenseMatrix::zeros(2, 2), 1e-10), 0);
        let m = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(rank(&m, 1e-10), 2);
        let wide = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        assert_eq!(rank(&wide, 1e-10), 1);
    }

    #[test]
    fn cyclic_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(is_cyclic(&heat2(), &[1.0, 0.0], DEFAULT_RANK_TOL).unwrap());
        assert!(!is_cyclic(&heat2(), &[s, s], DEFAULT_RANK_TOL).unwrap());
        assert!(!is_cyclic(&DenseMatrix::identity(2), &[0.3, -0.9], DEFAULT_RANK_TOL).unwrap());
        assert!(!is_cyclic(&heat2(), &[0.0, 0.0], DEFAULT_RANK_TOL).unwrap());
    }

    #[test]
    fn graded_krylov_columns_stay_full_rank() {
        // 1/h² scaled Laplacian, n = 6: Krylov columns span ten orders of magnitude
        let n = 6;
        let s = ((n - 1) * (n - 1)) as f64;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = -2.0 * s;
            if i + 1 < n {
                a[(i, i + 1)] = s;
                a[(i + 1, i)] = s;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.37).collect();
        assert!(is_cyclic(&a, &b, DEFAULT_RANK_TOL).unwrap());
    }

    #[test]
    fn solve_and_cholesky() {
        let m = DenseMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let rhs = DenseMatrix::from_rows(&[vec![2.0], vec![1.0]]).unwrap();
        let x = m.solve(&rhs).unwrap();
        assert!((x[(0, 0)] - 0.5).abs() < 1e-15 && x[(1, 0)].abs() < 1e-15);
        let l = m.cholesky().unwrap();
        let back = &l * &l.transpose();
        assert!(back.sub(&m).unwrap().max_abs() < 1e-14);
        let y = l.forward_substitute(&rhs).unwrap();
        assert!((&l * &y).sub(&rhs).unwrap().max_abs() < 1e-15);

        let singular = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(singular.solve(&rhs), Err(Error::Singular));
        assert_eq!(singular.cholesky(), Err(Error::Singular));
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        assert_eq!(neumaier_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }
}
