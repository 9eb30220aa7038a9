//! Property suites: each draws seeded random cases and records the worst
//! residual against a fixed threshold.

use std::time::Instant;

use actuator_core::brunovsky::{basis_matrix, residuals_against, GramOperator};
use actuator_core::cost::factorization_report;
use actuator_core::matrix::{is_cyclic, DEFAULT_RANK_TOL};
use actuator_core::optimizer::{builtin_symmetries, project_to_sphere};
use actuator_core::spectral::{jacobi_spectrum, lambda1, smallest_eig_shifted, Objective, DEFAULT_MAX_ITER, DEFAULT_TOL};
use actuator_core::{DenseMatrix, InputMap, Scaling, SystemKind, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::args::{Format, VerifyArgs};
use crate::output::{format_or, write_json, Report};
use crate::{exit, CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub threshold: f64,
}

impl SuiteOutcome {
    fn new(name: &'static str, cases: usize, worst: f64, threshold: f64) -> Self {
        Self { name, passed: worst <= threshold, cases, worst, threshold }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        if let Ok(b) = project_to_sphere(&gaussian(rng, n)) {
            return b;
        }
    }
}

/// Gaussian `(A, b)` with `2 ≤ n ≤ max_n`, redrawn until cyclic.
pub fn random_cyclic_pair(rng: &mut ChaCha8Rng, max_n: usize) -> (DenseMatrix, Vec<f64>) {
    loop {
        let n = rng.gen_range(2..=max_n);
        let a = DenseMatrix::new(n, n, gaussian(rng, n * n)).expect("finite entries");
        let b = gaussian(rng, n);
        if is_cyclic(&a, &b, DEFAULT_RANK_TOL).unwrap_or(false) {
            return (a, b);
        }
    }
}

/// `GGᵀ/n + I/10` for Gaussian `G`; eigenvalues are bounded below by 0.1.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let g = DenseMatrix::new(n, n, gaussian(rng, n * n)).expect("finite entries");
    let mut m = g.matmul(&g.transpose()).expect("square").scale(1.0 / n as f64);
    for i in 0..n {
        m[(i, i)] += 0.1;
    }
    m.symmetrize();
    m
}

/// Similarity and input residuals of the normal form; with `corrupt` the
/// companion matrix is perturbed so the suite must fail.
pub fn brunovsky_suite(seed: u64, cases: usize, corrupt: bool) -> CliResult<Vec<SuiteOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut r1, mut r2, mut gram_err) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..cases {
        let (a, b) = random_cyclic_pair(&mut rng, 10);
        let basis = basis_matrix(&a, &b)?;
        let mut comp = basis.companion.matrix().clone();
        if corrupt {
            let n = comp.rows();
            comp[(n - 1, 0)] += 1.0;
        }
        let res = residuals_against(&a, &b, &basis.p, &comp)?;
        r1 = r1.max(res.similarity);
        r2 = r2.max(res.input);

        let m = GramOperator::new(&a)?.gram(&b)?.into_matrix();
        let ppt = basis.p.matmul(&basis.p.transpose())?;
        gram_err = gram_err.max(m.sub(&ppt)?.frobenius_norm() / m.frobenius_norm());
    }
    Ok(vec![
        SuiteOutcome::new("brunovsky-similarity", cases, r1, 1e-8),
        SuiteOutcome::new("brunovsky-input", cases, r2, 1e-12),
        SuiteOutcome::new("gram-factorization", cases, gram_err, 1e-10),
    ])
}

/// Shifted power iteration against Jacobi on random SPD matrices.
pub fn oracle_suite(seed: u64, cases: usize) -> CliResult<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for k in 0..cases {
        let n = rng.gen_range(2..=10);
        let m = random_spd(&mut rng, n);
        let power = smallest_eig_shifted(&m, DEFAULT_TOL, DEFAULT_MAX_ITER, k as u64)?.value;
        let jacobi = jacobi_spectrum(&m)?[0];
        worst = worst.max((power - jacobi).abs() / jacobi.abs());
    }
    Ok(SuiteOutcome::new("eigen-oracles", cases, worst, 1e-8))
}

/// Wave Gram matrix against the block-diagonal of the heat Gram matrix, and
/// their smallest eigenvalues measured relative to the heat value.
pub fn wave_heat_suite(seed: u64, cases: usize) -> CliResult<Vec<SuiteOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut block, mut eig) = (0.0_f64, 0.0_f64);
    for n in 2..=6 {
        let heat = SystemSpec::new(SystemKind::Heat, n, Scaling::None).build()?;
        let wave = SystemSpec::new(SystemKind::Wave, n, Scaling::None).build()?;
        let heat_op = GramOperator::new(&heat.a)?;
        let wave_op = GramOperator::new(&wave.a)?;
        for _ in 0..cases {
            let b = random_unit(&mut rng, n);
            let md = heat_op.gram(&b)?;
            let mw = wave_op.gram(&InputMap::Velocity.embed(&b))?;
            let mut expected = DenseMatrix::zeros(2 * n, 2 * n);
            expected.set_block(0, 0, md.matrix());
            expected.set_block(n, n, md.matrix());
            let scale = mw.matrix().frobenius_norm();
            block = block.max(mw.matrix().sub(&expected)?.frobenius_norm() / scale);
            let (lw, lh) = (lambda1(&mw), lambda1(&md));
            eig = eig.max((lw - lh).abs() / lh.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(vec![
        SuiteOutcome::new("wave-heat-blocks", 5 * cases, block, 1e-9),
        SuiteOutcome::new("wave-heat-lambda1", 5 * cases, eig, 1e-9),
    ])
}

/// Objective invariance under the built-in heat symmetries, `n = 2` and `3`.
pub fn symmetry_suite(seed: u64, cases: usize) -> CliResult<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for n in [2, 3] {
        let heat = SystemSpec::new(SystemKind::Heat, n, Scaling::None).build()?;
        let objective = Objective::new(&heat.a)?;
        let syms = builtin_symmetries(SystemKind::Heat, n);
        for _ in 0..cases {
            let b = random_unit(&mut rng, n);
            let base = objective.value(&b);
            for r in &syms {
                worst = worst.max((objective.value(&r.mul_vec(&b)?) - base).abs());
            }
        }
    }
    Ok(SuiteOutcome::new("symmetry-invariance", 2 * cases, worst, 1e-10))
}

/// Exact cost never exceeds the factored bound (heat, `n = 2`, `T = 1`).
pub fn cost_bound_suite(seed: u64, cases: usize) -> CliResult<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heat = SystemSpec::new(SystemKind::Heat, 2, Scaling::None).build()?;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let b = random_unit(&mut rng, 2);
        worst = worst.max(factorization_report(&heat.a, &b, 1.0)?.ratio);
    }
    Ok(SuiteOutcome::new("cost-bound", cases, worst, 1.0 + actuator_core::cost::BOUND_SLACK))
}

pub fn all_suites(seed: u64, samples: usize, corrupt: bool) -> CliResult<Vec<SuiteOutcome>> {
    let mut out = brunovsky_suite(seed, samples, corrupt)?;
    out.push(oracle_suite(seed.wrapping_add(1), samples)?);
    out.extend(wave_heat_suite(seed.wrapping_add(2), samples)?);
    out.push(symmetry_suite(seed.wrapping_add(3), samples)?);
    out.push(cost_bound_suite(seed.wrapping_add(4), samples.min(50))?);
    Ok(out)
}

#[derive(Debug, Serialize)]
struct VerifyResult {
    passed: bool,
    suites: Vec<SuiteOutcome>,
}

pub fn run(args: &VerifyArgs) -> CliResult<i32> {
    let started = Instant::now();
    if args.samples == 0 {
        return Err(CliError::config("--samples must be positive"));
    }
    if format_or(&args.output, Format::Json) != Format::Json {
        return Err(CliError::config("verify writes JSON only"));
    }
    let suites = all_suites(args.seed, args.samples, args.corrupt_companion)?;
    for s in &suites {
        eprintln!(
            "{:<22} {}  worst {:.3e}  threshold {:.1e}  ({} cases)",
            s.name,
            if s.passed { "PASS" } else { "FAIL" },
            s.worst,
            s.threshold,
            s.cases
        );
    }
    let passed = suites.iter().all(|s| s.passed);
    let result = VerifyResult { passed, suites };
    write_json(&Report::new("verify", args, &result, started)?, &args.output)?;
    Ok(if passed { exit::OK } else { exit::VERIFY_FAILED })
}
