//! Symmetric eigenvalue routines.
//!
//! The objective is evaluated with a two-stage power iteration: the dominant
//! eigenvalue `λmax` of `M` first, then the dominant eigenvalue `μ` of
//! `λmax·I − M`, so that `λ₁ = λmax − μ`. A cyclic Jacobi solver provides the
//! full spectrum and serves as the independent reference in tests and in the
//! `verify` suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::brunovsky::{GramMatrix, GramOperator};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm, DenseMatrix};
use crate::systems::InputMap;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 50_000;
/// Seed for the start vector used by [`Objective`].
pub const OBJECTIVE_SEED: u64 = 0x5eed;

/// Unit-sphere constraint tolerance accepted by [`objective`].
const UNIT_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigResult {
    pub value: f64,
    /// Unit-norm eigenvector estimate. Only meaningful for simple eigenvalues.
    pub vector: Vec<f64>,
    /// Matrix-vector steps plus matrix squarings.
    pub iterations: usize,
    /// Set when successive Rayleigh quotients differ by at most `tol·|λ|` and
    /// the residual `‖Mv − λv‖` is at most `tol·‖M‖_F`.
    pub converged: bool,
}

fn check_symmetric(m: &DenseMatrix) -> Result<usize> {
    let n = m.ensure_square("eigenvalue input")?;
    let tol = 1e-10 * m.max_abs().max(f64::MIN_POSITIVE);
    if !m.is_symmetric(tol) {
        return Err(Error::InvalidInput("matrix is not symmetric".into()));
    }
    Ok(n)
}

fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = norm(&v);
        if s > 1e-3 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Plain power steps before switching to squaring.
const PLAIN_BUDGET: usize = 200;
/// Plain steps after each squaring.
const POLISH_STEPS: usize = 4;
const MAX_SQUARINGS: usize = 64;

struct Sweep {
    value: f64,
    vector: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn iterate(m: &DenseMatrix, mut v: Vec<f64>, tol: f64, res_tol: f64, budget: usize) -> Sweep {
    let mut w = m.mul_vec_unchecked(&v);
    let mut value = dot(&v, &w);
    let mut iterations = 0;
    while iterations < budget {
        iterations += 1;
        let wn = norm(&w);
        if wn == 0.0 {
            // v lies in the null space
            return Sweep { value: 0.0, vector: v, iterations, converged: false };
        }
        v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / wn);
        w = m.mul_vec_unchecked(&v);
        let next = dot(&v, &w);
        let change = (next - value).abs();
        value = next;
        if change <= tol * value.abs() {
            let residual =
                norm(&w.iter().zip(&v).map(|(wi, vi)| wi - value * vi).collect::<Vec<_>>());
            if residual <= res_tol {
                return Sweep { value, vector: v, iterations, converged: true };
            }
        }
    }
    Sweep { value, vector: v, iterations, converged: false }
}

/// Dominant eigenvalue of a symmetric matrix by power iteration.
///
/// Iterates until successive Rayleigh quotients differ by at most `tol·|λ|`
/// and the residual is at most `tol·‖M‖_F`. When the plain iteration is slow
/// (small relative gap) the matrix is repeatedly squared and the iterate
/// multiplied by `M^(2^k)`, followed by a few plain steps after each squaring.
pub fn power_largest(m: &DenseMatrix, tol: f64, max_iter: usize, seed: u64) -> Result<EigResult> {
    let n = check_symmetric(m)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    Ok(power_largest_unchecked(m, n, tol, max_iter, seed))
}

fn power_largest_unchecked(
    m: &DenseMatrix,
    n: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> EigResult {
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return EigResult { value: 0.0, vector: start_vector(n, seed), iterations: 0, converged: true };
    }
    let res_tol = tol * scale;
    let mut sweep = iterate(m, start_vector(n, seed), tol, res_tol, PLAIN_BUDGET.min(max_iter));
    let mut used = sweep.iterations;
    let mut power = m.scale(1.0 / scale);
    let mut squarings = 0;
    while !sweep.converged && used < max_iter && squarings < MAX_SQUARINGS {
        power = power.matmul(&power).expect("square");
        let s = power.frobenius_norm();
        if !(s > 0.0 && s.is_finite()) {
            break;
        }
        power = power.scale(1.0 / s);
        squarings += 1;
        used += 1;
        let mut v = power.mul_vec_unchecked(&sweep.vector);
        let vn = norm(&v);
        if vn > 0.0 {
            v.iter_mut().for_each(|x| *x /= vn);
        } else {
            v = sweep.vector.clone();
        }
        sweep = iterate(m, v, tol, res_tol, POLISH_STEPS.min(max_iter - used));
        used += sweep.iterations;
    }
    EigResult { value: sweep.value, vector: sweep.vector, iterations: used, converged: sweep.converged }
}

/// Smallest eigenvalue through a spectral shift: `λ₁ = λmax − λmax(λmax·I − M)`.
pub fn smallest_eig_shifted(
    m: &DenseMatrix,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigResult> {
    let n = check_symmetric(m)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    Ok(smallest_unchecked(m, n, tol, max_iter, seed))
}

fn smallest_unchecked(m: &DenseMatrix, n: usize, tol: f64, max_iter: usize, seed: u64) -> EigResult {
    smallest_with_shift(m, n, tol, max_iter, seed).0
}

/// Also returns the shifted matrix `λmax·I − M`.
fn smallest_with_shift(
    m: &DenseMatrix,
    n: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> (EigResult, DenseMatrix) {
    let top = power_largest_unchecked(m, n, tol, max_iter, seed);
    let shift = top.value;
    let mut shifted = m.scale(-1.0);
    for i in 0..n {
        shifted[(i, i)] += shift;
    }
    let low = power_largest_unchecked(&shifted, n, tol, max_iter, seed);
    let result = EigResult {
        value: shift - low.value,
        vector: low.vector,
        iterations: top.iterations + low.iterations,
        converged: top.converged && low.converged,
    };
    (result, shifted)
}

/// Pushes an approximate dominant eigenvector of `b` to working accuracy by
/// applying `(b/‖b‖)^(2^k)`, squaring until the normalized power settles.
fn polish_dominant(b: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let scale = b.frobenius_norm();
    if !(scale > 0.0) {
        return v.to_vec();
    }
    let mut s = b.scale(1.0 / scale);
    for _ in 0..MAX_SQUARINGS {
        let next = s.matmul(&s).expect("square");
        let ns = next.frobenius_norm();
        if !(ns > 0.0 && ns.is_finite()) {
            break;
        }
        let next = next.scale(1.0 / ns);
        let change = next.sub(&s).expect("same shape").frobenius_norm();
        s = next;
        if change <= 1e-14 {
            break;
        }
    }
    let w = s.mul_vec_unchecked(v);
    let wn = norm(&w);
    if wn > 0.0 {
        w.into_iter().map(|x| x / wn).collect()
    } else {
        v.to_vec()
    }
}

/// All eigenvalues of a symmetric matrix in ascending order, by cyclic
/// Jacobi rotations.
pub fn jacobi_spectrum(m: &DenseMatrix) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let (mut values, _) = jacobi_eigen(m);
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Unsorted eigenvalues and the matrix of eigenvectors (as columns).
pub(crate) fn jacobi_eigen(m: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    const MAX_SWEEPS: usize = 100;
    let n = m.rows();
    let mut a = m.clone();
    a.symmetrize();
    let mut v = DenseMatrix::identity(n);
    let target = 1e-12 * m.frobenius_norm();
    let off = |a: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
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
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// `λ₁` of a Gram matrix.
///
/// The eigenvector comes from the shifted power iteration, sharpened to
/// working accuracy; the eigenvalue is then the Rayleigh quotient evaluated
/// in factored form, `Σ_k (f_kᵀv)²`. Subtracting `λmax − μ` directly loses
/// everything below `ε·λmax`, which for strongly graded Gram matrices is all
/// of `λ₁`.
pub fn lambda1(m: &GramMatrix) -> f64 {
    let g = m.matrix();
    let (eig, shifted) = smallest_with_shift(g, g.rows(), DEFAULT_TOL, DEFAULT_MAX_ITER, OBJECTIVE_SEED);
    m.quadratic_form(&polish_dominant(&shifted, &eig.vector))
}

/// `b ↦ λ₁(P(b)P(b)ᵀ)` for a fixed system, with `p_k(A)` cached.
#[derive(Debug, Clone)]
pub struct Objective {
    gram: GramOperator,
    input: InputMap,
}

impl Objective {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        Self::with_input(a, InputMap::Full)
    }

    pub fn with_input(a: &DenseMatrix, input: InputMap) -> Result<Self> {
        let gram = GramOperator::new(a)?;
        if input.state_dim(input.actuator_dim(gram.dim())?) != gram.dim() {
            return Err(Error::Dimension("input map does not fit the state".into()));
        }
        Ok(Self { gram, input })
    }

    /// Dimension of the actuator vector `b`.
    pub fn dim(&self) -> usize {
        self.input.actuator_dim(self.gram.dim()).expect("checked at construction")
    }

    pub fn gram_operator(&self) -> &GramOperator {
        &self.gram
    }

    pub fn input_map(&self) -> InputMap {
        self.input
    }

    pub fn gram(&self, b: &[f64]) -> GramMatrix {
        self.gram.gram_unchecked(&self.input.embed(b))
    }

    /// Objective value; `b` must have length [`Self::dim`].
    pub fn value(&self, b: &[f64]) -> f64 {
        assert_eq!(b.len(), self.dim(), "actuator dimension");
        lambda1(&self.gram(b))
    }
}

/// `λ₁(gram(A, b))` for a unit vector `b`.
pub fn objective(a: &DenseMatrix, b: &[f64]) -> Result<f64> {
    let n = a.ensure_square("A")?;
    if b.len() != n {
        return Err(Error::Dimension(format!("b has length {}, A is {n}x{n}", b.len())));
    }
    if (norm(b) - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidInput(format!("b must be a unit vector, |b| = {}", norm(b))));
    }
    Ok(Objective::new(a)?.value(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn power_largest_examples() {
        let r = power_largest(&DenseMatrix::diag(&[1.0, 4.0]), 1e-12, 50_000, 1).unwrap();
        assert!((r.value - 4.0).abs() < 1e-10 && r.converged);

        let r = power_largest(&m(&[&[5.0, 2.0], &[2.0, 1.0]]), 1e-12, 50_000, 1).unwrap();
        assert!((r.value - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-10);

        let r = power_largest(&DenseMatrix::identity(4), 1e-12, 50_000, 9).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn max_iter_exhaustion_reports_not_converged() {
        let r = power_largest(&DenseMatrix::diag(&[1.0, 0.999, 0.5]), 1e-15, 3, 2).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn rejects_bad_inputs() {
        let nonsym = m(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(power_largest(&nonsym, 1e-12, 10, 0), Err(Error::InvalidInput(_))));
        assert!(power_largest(&DenseMatrix::identity(2), 0.0, 10, 0).is_err());
        assert!(jacobi_spectrum(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn shifted_examples() {
        let r = smallest_eig_shifted(&m(&[&[5.0, 2.0], &[2.0, 1.0]]), 1e-12, 50_000, 3).unwrap();
        assert!((r.value - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        let r = smallest_eig_shifted(&DenseMatrix::identity(3), 1e-12, 50_000, 3).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn jacobi_examples() {
        let s = jacobi_spectrum(&m(&[&[5.0, 2.0], &[2.0, 1.0]])).unwrap();
        assert!((s[0] - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!((s[1] - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert_eq!(jacobi_spectrum(&DenseMatrix::diag(&[3.0, 1.0, 2.0])).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(jacobi_spectrum(&DenseMatrix::zeros(3, 3)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn objective_examples() {
        let a = m(&[&[-2.0, 1.0], &[1.0, -2.0]]);
        assert!((objective(&a, &[1.0, 0.0]).unwrap() - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(objective(&a, &[s, s]).unwrap() <= 1e-10);
        let r = (0.97891f64.powi(2) + 0.20431f64.powi(2)).sqrt();
        let v = objective(&a, &[0.97891 / r, -0.20431 / r]).unwrap();
        assert!((v - 0.2).abs() < 1e-5, "{v}");
        assert!(matches!(objective(&a, &[2.0, 0.0]), Err(Error::InvalidInput(_))));
        assert!(matches!(objective(&a, &[1.0]), Err(Error::Dimension(_))));
    }
}
