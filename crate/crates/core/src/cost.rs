//! Controllability cost computed directly from Gramians, independent of the
//! Brunovsky construction.
//!
//! The minimal `L²(0,T)` control steering `y₀` to zero has squared norm
//! `⟨W_T⁻¹ E y₀, E y₀⟩` with `E = e^{AT}` and
//! `W_T = ∫₀ᵀ e^{As} b bᵀ e^{Aᵀs} ds`, so the cost constant is
//! `√λmax(Eᵀ W_T⁻¹ E)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::brunovsky::{companion, inverse_norm};
use crate::error::{Error, Result};
use crate::matrix::{char_poly, is_cyclic, kalman_rank, DenseMatrix, DEFAULT_RANK_TOL};
use crate::spectral::jacobi_spectrum;

/// Shortest horizon accepted by [`exact_cost`].
pub const MIN_HORIZON: f64 = 1e-4;
/// Slack on `cost ≤ κ·‖P⁻¹‖` before the bound is reported as violated.
pub const BOUND_SLACK: f64 = 1e-4;
const CONDITION_WARN: f64 = 1e12;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the `[13/13]` Padé
/// approximant.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.ensure_square("expm input")?;
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite entries".into()));
    }
    let norm1 = a.norm_one();
    let squarings = if norm1 > THETA13 { (norm1 / THETA13).log2().ceil() as i32 } else { 0 };
    if squarings > 1023 {
        return Err(Error::NumericRange(format!("‖A‖₁ = {norm1:e} is too large")));
    }
    let a = a.scale(2f64.powi(-squarings));
    let b = &PADE13;
    let id = DenseMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let mut inner = a6.scale(b[13]);
    inner.axpy(b[11], &a4);
    inner.axpy(b[9], &a2);
    let mut u = &a6 * &inner;
    u.axpy(b[7], &a6);
    u.axpy(b[5], &a4);
    u.axpy(b[3], &a2);
    u.axpy(b[1], &id);
    let u = &a * &u;

    let mut inner = a6.scale(b[12]);
    inner.axpy(b[10], &a4);
    inner.axpy(b[8], &a2);
    let mut v = &a6 * &inner;
    v.axpy(b[6], &a6);
    v.axpy(b[4], &a4);
    v.axpy(b[2], &a2);
    v.axpy(b[0], &id);

    let mut r = v.sub(&u)?.solve(&v.add(&u)?)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::NumericRange("matrix exponential overflowed".into()));
    }
    Ok(r)
}

/// Controllability Gramian over `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gramian {
    pub w: DenseMatrix,
    pub horizon: f64,
}

fn check_pair(a: &DenseMatrix, b: &[f64]) -> Result<usize> {
    let n = a.ensure_square("A")?;
    if b.len() != n {
        return Err(Error::Dimension(format!("b has length {}, A is {n}x{n}", b.len())));
    }
    Ok(n)
}

fn check_horizon(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("horizon must be positive, got {t}")))
    }
}

/// Gramian from the exponential of the block matrix `[[−A, bbᵀ], [0, Aᵀ]]·T`:
/// with blocks `F₁₂`, `F₂₂` of the result, `W = F₂₂ᵀ F₁₂`.
pub fn gramian(a: &DenseMatrix, b: &[f64], t: f64) -> Result<Gramian> {
    let n = check_pair(a, b)?;
    check_horizon(t)?;
    let mut block = DenseMatrix::zeros(2 * n, 2 * n);
    block.set_block(0, 0, &a.scale(-t));
    block.set_block(0, n, &DenseMatrix::outer(b, b).scale(t));
    block.set_block(n, n, &a.transpose().scale(t));
    let f = expm(&block)?;
    let f12 = f.block(0, n, n, n);
    let f22 = f.block(n, n, n, n);
    let mut w = f22.transpose().matmul(&f12)?;
    w.symmetrize();
    Ok(Gramian { w, horizon: t })
}

/// Gramian by adaptive Simpson quadrature of `e^{As} b bᵀ e^{Aᵀs}`.
pub fn gramian_quadrature(
    a: &DenseMatrix,
    b: &[f64],
    t: f64,
    tol: f64,
    max_depth: usize,
) -> Result<Gramian> {
    check_pair(a, b)?;
    check_horizon(t)?;
    let integrand = |s: f64| -> Result<DenseMatrix> {
        let v = expm(&a.scale(s))?.mul_vec_unchecked(b);
        Ok(DenseMatrix::outer(&v, &v))
    };
    let fa = integrand(0.0)?;
    let fm = integrand(0.5 * t)?;
    let fb = integrand(t)?;
    let whole = simpson(&fa, &fm, &fb, t);
    let scale = whole.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut w = simpson_rec(
        &integrand,
        0.0,
        t,
        [&fa, &fm, &fb],
        whole,
        tol * scale,
        max_depth,
        0,
    )?;
    w.symmetrize();
    Ok(Gramian { w, horizon: t })
}

fn simpson(fa: &DenseMatrix, fm: &DenseMatrix, fb: &DenseMatrix, width: f64) -> DenseMatrix {
    let mut s = fa.add(fb).expect("same shape");
    s.axpy(4.0, fm);
    s.scale(width / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> Result<DenseMatrix>,
    lo: f64,
    hi: f64,
    [fa, fm, fb]: [&DenseMatrix; 3],
    whole: DenseMatrix,
    tol: f64,
    max_depth: usize,
    depth: usize,
) -> Result<DenseMatrix> {
    const MIN_DEPTH: usize = 4;
    let mid = 0.5 * (lo + hi);
    let flm = f(0.5 * (lo + mid))?;
    let frm = f(0.5 * (mid + hi))?;
    let left = simpson(fa, &flm, fm, mid - lo);
    let right = simpson(fm, &frm, fb, hi - mid);
    let both = left.add(&right)?;
    let delta = both.sub(&whole)?;
    if depth >= max_depth || (depth >= MIN_DEPTH && delta.frobenius_norm() <= 15.0 * tol) {
        let mut out = both;
        out.axpy(1.0 / 15.0, &delta);
        return Ok(out);
    }
    let l = simpson_rec(f, lo, mid, [fa, &flm, fm], left, 0.5 * tol, max_depth, depth + 1)?;
    let r = simpson_rec(f, mid, hi, [fm, &frm, fb], right, 0.5 * tol, max_depth, depth + 1)?;
    l.add(&r)
}

fn condition_estimate(w: &DenseMatrix) -> f64 {
    match jacobi_spectrum(w) {
        Ok(s) => {
            let lo = s[0].abs().max(f64::MIN_POSITIVE);
            s[s.len() - 1].abs() / lo
        }
        Err(_) => f64::INFINITY,
    }
}

/// Exact controllability cost `ℭ(b, T) = √λmax(Eᵀ W⁻¹ E)`.
///
/// The Gramian is formed in coordinates `D y` for a diagonal `D` that brings
/// its diagonal close to one. For short horizons the entries of `W` span many
/// orders of magnitude and the unscaled block exponential only resolves them
/// to normwise accuracy. The cost is recovered from `Eᵀ W⁻¹ E = D K' D`.
pub fn exact_cost(a: &DenseMatrix, b: &[f64], t: f64) -> Result<f64> {
    let n = check_pair(a, b)?;
    check_horizon(t)?;
    if t < MIN_HORIZON {
        return Err(Error::InvalidInput(format!("horizon {t:e} below minimum {MIN_HORIZON:e}")));
    }
    if !is_cyclic(a, b, DEFAULT_RANK_TOL)? {
        return Err(Error::NonControllable { rank: kalman_rank(a, b, DEFAULT_RANK_TOL)?, n });
    }
    const PASSES: usize = 6;
    let mut d = vec![1.0; n];
    let (scaled_a, w) = {
        let mut pass = 0;
        loop {
            let mut sa = a.clone();
            for i in 0..n {
                for j in 0..n {
                    sa[(i, j)] *= d[i] / d[j];
                }
            }
            let sb: Vec<f64> = b.iter().zip(&d).map(|(x, di)| x * di).collect();
            let w = gramian(&sa, &sb, t)?.w;
            let diag: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
            if diag.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::IllConditioned { condition: condition_estimate(&w) });
            }
            let balanced = diag.iter().all(|x| (x - 1.0).abs() < 1e-2);
            pass += 1;
            if balanced || pass == PASSES {
                break (sa, w);
            }
            for (di, x) in d.iter_mut().zip(&diag) {
                *di /= x.sqrt();
            }
        }
    };
    let condition = condition_estimate(&w);
    if condition > CONDITION_WARN {
        log::warn!("equilibrated Gramian condition {condition:.3e} at T = {t:e}");
    }
    let l = w.cholesky().map_err(|_| Error::IllConditioned { condition })?;
    let e = expm(&scaled_a.scale(t))?;
    let mut x = l.forward_substitute(&e)?;
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] *= d[j];
        }
    }
    let k = x.transpose().matmul(&x)?;
    let top = *jacobi_spectrum(&k)?.last().expect("n ≥ 1");
    Ok(top.max(0.0).sqrt())
}

/// Cost of the normalized pair `(𝔄, eₙ)`; depends on `A` only through its
/// characteristic polynomial.
pub fn kappa(a: &DenseMatrix, t: f64) -> Result<f64> {
    let n = a.ensure_square("A")?;
    let c = companion(&char_poly(a)?)?;
    let mut en = vec![0.0; n];
    en[n - 1] = 1.0;
    exact_cost(c.matrix(), &en, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostReport {
    pub horizon: f64,
    pub exact_cost: f64,
    pub kappa: f64,
    pub inverse_norm: f64,
    /// `κ(T)·‖P⁻¹(b)‖`
    pub upper_bound: f64,
    /// `exact_cost / upper_bound`
    pub ratio: f64,
    /// `ratio ≤ 1 + BOUND_SLACK`
    pub bound_holds: bool,
}

pub fn factorization_report(a: &DenseMatrix, b: &[f64], t: f64) -> Result<CostReport> {
    let exact = exact_cost(a, b, t)?;
    let kappa = kappa(a, t)?;
    let inv = inverse_norm(a, b)?;
    let upper_bound = kappa * inv;
    let ratio = exact / upper_bound;
    Ok(CostReport {
        horizon: t,
        exact_cost: exact,
        kappa,
        inverse_norm: inv,
        upper_bound,
        ratio,
        bound_holds: ratio <= 1.0 + BOUND_SLACK,
    })
}

/// Least-squares slope of `log κ(T)` against `log T`.
pub fn blowup_exponent(a: &DenseMatrix, horizons: &[f64]) -> Result<f64> {
    if horizons.len() < 4 {
        return Err(Error::DegenerateGrid(format!("{} horizons, need at least 4", horizons.len())));
    }
    if horizons.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::DegenerateGrid("horizons must be positive".into()));
    }
    let lo = horizons.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = horizons.iter().copied().fold(0.0, f64::max);
    if hi < 10.0 * lo {
        return Err(Error::DegenerateGrid("horizons must span at least one decade".into()));
    }
    let kappas: Vec<f64> =
        horizons.par_iter().map(|&t| kappa(a, t)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = horizons.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = kappas.iter().map(|k| k.ln()).collect();
    Ok(least_squares_slope(&xs, &ys))
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `count` log-spaced horizons from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
