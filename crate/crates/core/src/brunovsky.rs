//! Brunovsky normal form of a single-input pair `(A, b)`.
//!
//! For a controllable pair there is a unique invertible `P(b)` with
//! `A = P𝔄P⁻¹` and `b = P eₙ`, where `𝔄` is the companion matrix of `A`.
//! Its columns are `f_k = p_k(A) b` with
//!
//! ```text
//! p_k(A) = A^{n-k} + Σ_{j=1}^{n-k} a_j A^{n-k-j}    (k < n),    p_n(A) = I,
//! ```
//!
//! so the Gram matrix `P Pᵀ = Σ_k p_k(A) b bᵀ p_k(A)ᵀ` is assembled from
//! rank-one terms without ever forming `P⁻¹`. Maximizing its smallest
//! eigenvalue over the unit sphere minimizes `‖P⁻¹(b)‖`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    char_poly, dot, is_cyclic, kalman_rank, neumaier_sum, norm, CharacteristicPolynomial,
    DenseMatrix, DEFAULT_RANK_TOL,
};
use crate::spectral;

/// Companion matrix: ones on the superdiagonal, bottom row `(−aₙ, …, −a₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionMatrix {
    poly: CharacteristicPolynomial,
    matrix: DenseMatrix,
}

impl CompanionMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn polynomial(&self) -> &CharacteristicPolynomial {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

pub fn companion(cp: &CharacteristicPolynomial) -> Result<CompanionMatrix> {
    let n = cp.degree();
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        m[(n - 1, j)] = -cp.a(n - j);
    }
    Ok(CompanionMatrix { poly: cp.clone(), matrix: m })
}

/// `A⁰ … Aⁿ⁻¹`.
fn power_table(a: &DenseMatrix) -> Vec<DenseMatrix> {
    let n = a.rows();
    let mut powers = Vec::with_capacity(n);
    powers.push(DenseMatrix::identity(n));
    for k in 1..n {
        powers.push(&powers[k - 1] * a);
    }
    powers
}

/// `[p₁(A), …, pₙ(A)]`, with `pₙ(A) = I`.
pub fn pk_matrices(a: &DenseMatrix, cp: &CharacteristicPolynomial) -> Result<Vec<DenseMatrix>> {
    let n = a.ensure_square("A")?;
    if cp.degree() != n {
        return Err(Error::InvalidInput(format!(
            "polynomial of degree {} for a {n}x{n} matrix",
            cp.degree()
        )));
    }
    let powers = power_table(a);
    Ok((1..=n)
        .map(|k| {
            let top = n - k;
            let mut p = powers[top].clone();
            for j in 1..=top {
                p.axpy(cp.a(j), &powers[top - j]);
            }
            p
        })
        .collect())
}

/// Cached `p_k(A)` for repeated Gram assembly at a fixed `A`.
#[derive(Debug, Clone)]
pub struct GramOperator {
    poly: CharacteristicPolynomial,
    pk: Vec<DenseMatrix>,
}

impl GramOperator {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let n = a.ensure_square("A")?;
        if n < 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        let poly = char_poly(a)?;
        let pk = pk_matrices(a, &poly)?;
        Ok(Self { poly, pk })
    }

    pub fn dim(&self) -> usize {
        self.pk.len()
    }

    pub fn polynomial(&self) -> &CharacteristicPolynomial {
        &self.poly
    }

    pub fn pk(&self) -> &[DenseMatrix] {
        &self.pk
    }

    fn check(&self, b: &[f64]) -> Result<()> {
        if b.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "b has length {}, expected {}",
                b.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Columns `f₁ … fₙ` of `P(b)`.
    pub fn columns(&self, b: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check(b)?;
        Ok(self.columns_unchecked(b))
    }

    fn columns_unchecked(&self, b: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        self.pk
            .iter()
            .enumerate()
            .map(|(k, p)| if k + 1 == n { b.to_vec() } else { p.mul_vec_unchecked(b) })
            .collect()
    }

    pub fn basis(&self, b: &[f64]) -> Result<DenseMatrix> {
        let cols = self.columns(b)?;
        let n = self.dim();
        let mut p = DenseMatrix::zeros(n, n);
        for (k, f) in cols.iter().enumerate() {
            p.set_column(k, f);
        }
        Ok(p)
    }

    pub fn gram(&self, b: &[f64]) -> Result<GramMatrix> {
        self.check(b)?;
        Ok(self.gram_unchecked(b))
    }

    pub(crate) fn gram_unchecked(&self, b: &[f64]) -> GramMatrix {
        let n = self.dim();
        let columns = self.columns_unchecked(b);
        let mut m = DenseMatrix::zeros(n, n);
        for f in &columns {
            m.add_outer(f);
        }
        m.symmetrize();
        GramMatrix { m, columns }
    }
}

/// `P(b)`, the factors `p_k(A)` and the companion matrix.
#[derive(Debug, Clone)]
pub struct BrunovskyBasis {
    pub p: DenseMatrix,
    pub pk: Vec<DenseMatrix>,
    pub companion: CompanionMatrix,
}

/// Symmetric positive semidefinite `M(b) = P(b)P(b)ᵀ`, kept together with
/// the columns of `P(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    m: DenseMatrix,
    columns: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    /// Columns `f_k` of the factor `P(b)`.
    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// `vᵀMv` evaluated as `Σ_k (f_kᵀv)²`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        neumaier_sum(self.columns.iter().map(|f| dot(f, v).powi(2)))
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.m
    }
}

fn require_controllable(a: &DenseMatrix, b: &[f64]) -> Result<usize> {
    let n = a.ensure_square("A")?;
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if b.len() != n {
        return Err(Error::Dimension(format!("b has length {}, A is {n}x{n}", b.len())));
    }
    if !is_cyclic(a, b, DEFAULT_RANK_TOL)? {
        return Err(Error::NonControllable { rank: kalman_rank(a, b, DEFAULT_RANK_TOL)?, n });
    }
    Ok(n)
}

pub fn basis_matrix(a: &DenseMatrix, b: &[f64]) -> Result<BrunovskyBasis> {
    require_controllable(a, b)?;
    let op = GramOperator::new(a)?;
    Ok(BrunovskyBasis {
        p: op.basis(b)?,
        companion: companion(op.polynomial())?,
        pk: op.pk,
    })
}

/// Gram matrix `Σ_k p_k(A) b bᵀ p_k(A)ᵀ`. Defined for any `b`; singular when
/// `(A, b)` is not controllable.
pub fn gram(a: &DenseMatrix, b: &[f64]) -> Result<GramMatrix> {
    GramOperator::new(a)?.gram(b)
}

/// `‖P⁻¹(b)‖ = λ₁(P Pᵀ)^{-1/2}`.
pub fn inverse_norm(a: &DenseMatrix, b: &[f64]) -> Result<f64> {
    require_controllable(a, b)?;
    let l1 = spectral::lambda1(&gram(a, b)?);
    if l1 > 0.0 {
        Ok(l1.powf(-0.5))
    } else {
        Err(Error::Singular)
    }
}

/// Relative residuals of the normal-form identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrunovskyResiduals {
    /// `‖AP − P𝔄‖_F / (‖A‖_F ‖P‖_F)`
    pub similarity: f64,
    /// `‖P eₙ − b‖ / ‖b‖`
    pub input: f64,
}

pub fn verify_brunovsky(a: &DenseMatrix, b: &[f64]) -> Result<BrunovskyResiduals> {
    let basis = basis_matrix(a, b)?;
    residuals_against(a, b, &basis.p, basis.companion.matrix())
}

/// Residuals of `(A, b)` against an explicit `P` and companion matrix.
pub fn residuals_against(
    a: &DenseMatrix,
    b: &[f64],
    p: &DenseMatrix,
    companion: &DenseMatrix,
) -> Result<BrunovskyResiduals> {
    let lhs = a.matmul(p)?;
    let rhs = p.matmul(companion)?;
    let similarity =
        lhs.sub(&rhs)?.frobenius_norm() / (a.frobenius_norm() * p.frobenius_norm());
    let last = p.column(p.cols() - 1);
    let diff: Vec<f64> = last.iter().zip(b).map(|(x, y)| x - y).collect();
    Ok(BrunovskyResiduals { similarity, input: norm(&diff) / norm(b) })
}

/// Closed-form `λ₁` for `A = [[-2, 1], [1, -2]]`:
/// `4b₁b₂ + 3(b₁² + b₂²) − 2√((2b₁² + 2b₁b₂ + b₂²)(b₁² + 2b₁b₂ + 2b₂²))`.
pub fn closed_form_lambda1_heat2(b: &[f64]) -> Result<f64> {
    let &[b1, b2] = b else {
        return Err(Error::Dimension(format!("expected 2 components, got {}", b.len())));
    };
    let f = 2.0 * b1 * b1 + 2.0 * b1 * b2 + b2 * b2;
    let g = b1 * b1 + 2.0 * b1 * b2 + 2.0 * b2 * b2;
    Ok(4.0 * b1 * b2 + 3.0 * (b1 * b1 + b2 * b2) - 2.0 * (f * g).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn heat2() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![-2.0, 1.0], vec![1.0, -2.0]]).unwrap()
    }

    fn poly(c: &[f64]) -> CharacteristicPolynomial {
        CharacteristicPolynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn companion_examples() {
        let c = companion(&poly(&[4.0, 3.0])).unwrap();
        assert_eq!(c.matrix().to_rows(), vec![vec![0.0, 1.0], vec![-3.0, -4.0]]);
        assert_eq!(char_poly(c.matrix()).unwrap().coefficients(), &[4.0, 3.0]);

        let c = companion(&poly(&[0.0, 0.0, 0.0])).unwrap();
        let rows = c.matrix().to_rows();
        assert_eq!(rows[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(rows[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(rows[2], vec![0.0; 3]);

        assert_eq!(companion(&poly(&[1.0])), Err(Error::UnsupportedDimension(1)));
    }

    #[test]
    fn pk_examples() {
        let a = heat2();
        let pk = pk_matrices(&a, &poly(&[4.0, 3.0])).unwrap();
        assert_eq!(pk[0].to_rows(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert_eq!(pk[1], DenseMatrix::identity(2));

        let z = DenseMatrix::zeros(3, 3);
        let pk = pk_matrices(&z, &poly(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(pk[0], z);
        assert_eq!(pk[1], z);
        assert_eq!(pk[2], DenseMatrix::identity(3));

        assert!(matches!(pk_matrices(&a, &poly(&[1.0, 2.0, 3.0])), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn basis_examples() {
        let a = heat2();
        let p = basis_matrix(&a, &[1.0, 0.0]).unwrap().p;
        assert_eq!(p.to_rows(), vec![vec![2.0, 1.0], vec![1.0, 0.0]]);
        let p = basis_matrix(&a, &[0.0, 1.0]).unwrap().p;
        assert_eq!(p.to_rows(), vec![vec![1.0, 0.0], vec![2.0, 1.0]]);
        assert_eq!(
            basis_matrix(&a, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap_err(),
            Error::NonControllable { rank: 1, n: 2 }
        );
    }

    #[test]
    fn one_state_is_rejected() {
        let a = DenseMatrix::from_rows(&[vec![-1.0]]).unwrap();
        assert_eq!(gram(&a, &[1.0]).unwrap_err(), Error::UnsupportedDimension(1));
        assert_eq!(basis_matrix(&a, &[1.0]).unwrap_err(), Error::UnsupportedDimension(1));
    }

    #[test]
    fn gram_examples() {
        let a = heat2();
        let g = gram(&a, &[1.0, 0.0]).unwrap();
        assert_eq!(g.matrix().to_rows(), vec![vec![5.0, 2.0], vec![2.0, 1.0]]);

        let (b1, b2) = (0.3, -0.7);
        let g = gram(&a, &[b1, b2]).unwrap();
        let off = (2.0 * b1 + b2) * (b1 + 2.0 * b2) + b1 * b2;
        let want = [
            [(2.0 * b1 + b2).powi(2) + b1 * b1, off],
            [off, (b1 + 2.0 * b2).powi(2) + b2 * b2],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.matrix()[(i, j)] - want[i][j]).abs() < 1e-14);
            }
        }

        let g = gram(&a, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let m = g.matrix();
        assert!((m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).abs() < 1e-12);

        assert!(matches!(gram(&a, &[1.0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn inverse_norm_examples() {
        let a = heat2();
        assert!((inverse_norm(&a, &[1.0, 0.0]).unwrap() - (2f64.sqrt() + 1.0)).abs() < 1e-10);
        let c = companion(&poly(&[4.0, 3.0])).unwrap();
        assert!((inverse_norm(c.matrix(), &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        let v = inverse_norm(&a, &[0.97891, -0.20431]).unwrap();
        assert!((v - 0.2f64.powf(-0.5)).abs() < 1e-4, "{v}");
        assert!(matches!(
            inverse_norm(&a, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            Err(Error::NonControllable { .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let r = verify_brunovsky(&heat2(), &[1.0, 0.0]).unwrap();
        assert!(r.similarity <= 1e-12);
        assert_eq!(r.input, 0.0);

        let c = companion(&poly(&[4.0, 3.0])).unwrap();
        let basis = basis_matrix(c.matrix(), &[0.0, 1.0]).unwrap();
        assert_eq!(basis.p, DenseMatrix::identity(2));
        let r = verify_brunovsky(c.matrix(), &[0.0, 1.0]).unwrap();
        assert_eq!(r, BrunovskyResiduals { similarity: 0.0, input: 0.0 });
    }

    #[test]
    fn closed_form_examples() {
        let v = closed_form_lambda1_heat2(&[1.0, 0.0]).unwrap();
        assert!((v - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        let v = closed_form_lambda1_heat2(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!(v.abs() < 1e-14);
        let v = closed_form_lambda1_heat2(&[0.96614944, -0.257983]).unwrap();
        assert!((v - 0.197311).abs() < 1e-6, "{v}");
        assert!(closed_form_lambda1_heat2(&[1.0, 0.0, 0.0]).is_err());
    }
}
