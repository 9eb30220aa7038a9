//! Global maximization of `b ↦ λ₁(P(b)P(b)ᵀ)` over the unit sphere.
//!
//! Differential evolution (DE/rand/1/bin) with every trial vector projected
//! back to the sphere. Trial vectors are generated sequentially from the run's
//! RNG; only fitness evaluation is parallel, so a seeded run is bit-identical
//! for any thread count.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, norm, DenseMatrix};
use crate::spectral::Objective;
use crate::systems::{InputMap, System, SystemKind};

/// Norm below which a vector cannot be projected.
pub const MIN_PROJECT_NORM: f64 = 1e-300;
/// Tolerance for the symmetry hypotheses and orbit objective equality.
pub const SYMMETRY_TOL: f64 = 1e-10;
const ORBIT_DEDUP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEConfig {
    pub population_size: usize,
    /// Mutation weight.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    pub max_generations: usize,
    pub stall_tolerance: f64,
    pub seed: u64,
}

impl DEConfig {
    /// Defaults for an `n`-dimensional actuator: population `15n`,
    /// `F = 0.8`, `CR = 0.9`, `300n` generations.
    pub fn for_dim(n: usize, seed: u64) -> Self {
        Self {
            population_size: 15 * n,
            f: 0.8,
            cr: 0.9,
            max_generations: 300 * n,
            stall_tolerance: 1e-12,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f > 0.0 && self.f <= 2.0) {
            return Err(Error::InvalidInput(format!("F = {} outside (0, 2]", self.f)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidInput(format!("CR = {} outside [0, 1]", self.cr)));
        }
        if self.population_size < 4 {
            return Err(Error::InvalidInput(format!(
                "population of {} is below the minimum of 4",
                self.population_size
            )));
        }
        if !(self.stall_tolerance >= 0.0) {
            return Err(Error::InvalidInput("stall tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    /// Unit-norm maximizer, sign fixed so its largest-magnitude entry is positive.
    pub best_b: Vec<f64>,
    pub best_value: f64,
    pub generations: usize,
    pub evaluations: usize,
    pub seed: u64,
    pub starts: usize,
    /// Best value after initialization and after every generation.
    pub history: Vec<f64>,
    pub orbit: Vec<Vec<f64>>,
}

/// `v / ‖v‖`, or [`Error::Resample`] when `v` is numerically zero.
pub fn project_to_sphere(v: &[f64]) -> Result<Vec<f64>> {
    let s = norm(v);
    if !(s >= MIN_PROJECT_NORM) {
        return Err(Error::Resample(MIN_PROJECT_NORM));
    }
    Ok(v.iter().map(|x| x / s).collect())
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = project_to_sphere(&v) {
            return u;
        }
    }
}

fn canonical_sign(mut b: Vec<f64>) -> Vec<f64> {
    let lead = b.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if lead < 0.0 {
        b.iter_mut().for_each(|x| *x = -*x);
    }
    b
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// One DE/rand/1/bin run.
pub fn differential_evolution(objective: &Objective, cfg: &DEConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    let n = objective.dim();
    let np = cfg.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pop: Vec<Vec<f64>> = (0..np).map(|_| random_unit(&mut rng, n)).collect();
    let mut fit: Vec<f64> = pop.par_iter().map(|x| objective.value(x)).collect();
    let mut evaluations = np;

    let scale = pop
        .iter()
        .map(|x| objective.gram(x).matrix().trace())
        .fold(0.0, f64::max);
    if fit.iter().all(|&v| v <= 1e-12 * scale.max(1.0)) {
        return Err(Error::NoControllableDirection);
    }

    let mut history = vec![fit[argmax(&fit)]];
    let mut generations = 0;
    while generations < cfg.max_generations {
        generations += 1;
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let picks = loop {
                    let idx = sample(&mut rng, np, 3).into_vec();
                    if !idx.contains(&i) {
                        break idx;
                    }
                };
                let (r1, r2, r3) = (&pop[picks[0]], &pop[picks[1]], &pop[picks[2]]);
                let forced = rng.gen_range(0..n);
                let trial: Vec<f64> = (0..n)
                    .map(|j| {
                        if j == forced || rng.gen::<f64>() < cfg.cr {
                            r1[j] + cfg.f * (r2[j] - r3[j])
                        } else {
                            pop[i][j]
                        }
                    })
                    .collect();
                project_to_sphere(&trial).unwrap_or_else(|_| random_unit(&mut rng, n))
            })
            .collect();
        let trial_fit: Vec<f64> = trials.par_iter().map(|x| objective.value(x)).collect();
        evaluations += np;
        for (i, (trial, value)) in trials.into_iter().zip(trial_fit).enumerate() {
            if value >= fit[i] {
                pop[i] = trial;
                fit[i] = value;
            }
        }
        history.push(fit[argmax(&fit)]);
        if std_dev(&fit) < cfg.stall_tolerance {
            break;
        }
    }

    let best = argmax(&fit);
    Ok(OptimizationResult {
        best_b: canonical_sign(pop[best].clone()),
        best_value: fit[best],
        generations,
        evaluations,
        seed: cfg.seed,
        starts: 1,
        history,
        orbit: Vec::new(),
    })
}

/// Best of `starts` runs seeded `seed, seed + 1, …`.
pub fn multi_start(objective: &Objective, cfg: &DEConfig, starts: usize) -> Result<OptimizationResult> {
    let starts = starts.max(1);
    let mut best: Option<OptimizationResult> = None;
    let mut evaluations = 0;
    for k in 0..starts {
        let run_cfg = DEConfig { seed: cfg.seed.wrapping_add(k as u64), ..cfg.clone() };
        let run = differential_evolution(objective, &run_cfg)?;
        evaluations += run.evaluations;
        if best.as_ref().map_or(true, |b| run.best_value > b.best_value) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = evaluations;
    best.starts = starts;
    best.seed = cfg.seed;
    Ok(best)
}

/// Default number of restarts: one for `n = 2`, four above.
pub fn default_starts(n: usize) -> usize {
    if n >= 3 {
        4
    } else {
        1
    }
}

/// Checks `AR = RA` (relative to `‖A‖_F‖R‖_F`) and `RRᵀ = I`.
pub fn commutes_and_orthogonal(a: &DenseMatrix, r: &DenseMatrix, tol: f64) -> Result<bool> {
    let n = a.ensure_square("A")?;
    if r.rows() != n || r.cols() != n {
        return Err(Error::Dimension(format!(
            "R is {}x{}, A is {n}x{n}",
            r.rows(),
            r.cols()
        )));
    }
    let comm = a.matmul(r)?.sub(&r.matmul(a)?)?.frobenius_norm();
    let orth = r.matmul(&r.transpose())?.sub(&DenseMatrix::identity(n))?.frobenius_norm();
    Ok(comm <= tol * a.frobenius_norm() * r.frobenius_norm() && orth <= tol)
}

/// `{b} ∪ {R b}` without near-duplicates.
pub fn symmetry_orbit(
    a: &DenseMatrix,
    b: &[f64],
    candidates: &[DenseMatrix],
) -> Result<Vec<Vec<f64>>> {
    for (index, r) in candidates.iter().enumerate() {
        if !commutes_and_orthogonal(a, r, SYMMETRY_TOL)? {
            return Err(Error::InvalidSymmetry {
                index,
                reason: "not orthogonal or does not commute with A".into(),
            });
        }
    }
    let mut orbit = vec![b.to_vec()];
    for r in candidates {
        let image = r.mul_vec(b)?;
        let fresh = orbit.iter().all(|p| {
            norm(&p.iter().zip(&image).map(|(x, y)| x - y).collect::<Vec<_>>()) >= ORBIT_DEDUP
        });
        if fresh {
            orbit.push(image);
        }
    }
    Ok(orbit)
}

/// Reversal permutation `J`.
pub fn reversal(n: usize) -> DenseMatrix {
    let mut j = DenseMatrix::zeros(n, n);
    for i in 0..n {
        j[(i, n - 1 - i)] = 1.0;
    }
    j
}

/// Orthogonal matrices in actuator space known to leave the objective
/// invariant: `−I` always, plus `±J` for the symmetric Laplacian-based systems.
/// For `n = 2` heat these are the three matrices `−I`, `[[0,1],[1,0]]`,
/// `[[0,−1],[−1,0]]`.
pub fn builtin_symmetries(kind: SystemKind, n: usize) -> Vec<DenseMatrix> {
    let minus_id = DenseMatrix::identity(n).scale(-1.0);
    match kind {
        SystemKind::Heat | SystemKind::Wave => {
            let j = reversal(n);
            vec![minus_id, j.clone(), j.scale(-1.0)]
        }
        _ => vec![minus_id],
    }
}

fn lift(r: &DenseMatrix, input: InputMap) -> DenseMatrix {
    match input {
        InputMap::Full => r.clone(),
        InputMap::Velocity => {
            let n = r.rows();
            let mut out = DenseMatrix::zeros(2 * n, 2 * n);
            out.set_block(0, 0, r);
            out.set_block(n, n, r);
            out
        }
    }
}

/// Orbit of an actuator under [`builtin_symmetries`], checked against the
/// full state matrix.
pub fn system_orbit(system: &System, b: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = system.actuator_dim();
    let lifted: Vec<DenseMatrix> = builtin_symmetries(system.kind, n)
        .iter()
        .map(|r| lift(r, system.input))
        .collect();
    let orbit = symmetry_orbit(&system.a, &system.input.embed(b), &lifted)?;
    let offset = system.a.rows() - n;
    Ok(orbit.into_iter().map(|v| v[offset..].to_vec()).collect())
}

/// Central-difference gradient of the objective; each perturbed point is
/// projected back to the sphere. Noisy near eigenvalue crossings.
pub fn fd_gradient_with(objective: &Objective, b: &[f64], eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {eps}")));
    }
    if b.len() != objective.dim() {
        return Err(Error::Dimension("actuator length".into()));
    }
    (0..b.len())
        .map(|i| {
            let mut plus = b.to_vec();
            let mut minus = b.to_vec();
            plus[i] += eps;
            minus[i] -= eps;
            let fp = objective.value(&project_to_sphere(&plus)?);
            let fm = objective.value(&project_to_sphere(&minus)?);
            Ok((fp - fm) / (2.0 * eps))
        })
        .collect()
}

pub fn fd_gradient(a: &DenseMatrix, b: &[f64], eps: f64) -> Result<Vec<f64>> {
    fd_gradient_with(&Objective::new(a)?, b, eps)
}

/// Component of `g` tangent to the sphere at unit `b`.
pub fn tangential(b: &[f64], g: &[f64]) -> Vec<f64> {
    let radial = dot(b, g);
    g.iter().zip(b).map(|(gi, bi)| gi - radial * bi).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{dirichlet_laplacian, Scaling};

    fn heat2() -> DenseMatrix {
        dirichlet_laplacian(2, Scaling::None).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_to_sphere(&[3.0, 4.0]).unwrap(), vec![0.6, 0.8]);
        assert_eq!(project_to_sphere(&[0.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(project_to_sphere(&[0.0, 0.0, 0.0]), Err(Error::Resample(_))));
    }

    #[test]
    fn config_validation() {
        let ok = DEConfig::for_dim(2, 0);
        assert_eq!(ok.population_size, 30);
        assert_eq!(ok.max_generations, 600);
        ok.validate().unwrap();
        for bad in [
            DEConfig { f: 0.0, ..ok.clone() },
            DEConfig { f: 2.5, ..ok.clone() },
            DEConfig { cr: 1.1, ..ok.clone() },
            DEConfig { population_size: 3, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn symmetry_hypotheses() {
        let a = heat2();
        let swap = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(commutes_and_orthogonal(&a, &swap, SYMMETRY_TOL).unwrap());
        assert!(commutes_and_orthogonal(&a, &DenseMatrix::identity(2).scale(-1.0), SYMMETRY_TOL).unwrap());
        assert!(!commutes_and_orthogonal(&a, &DenseMatrix::diag(&[1.0, 2.0]), SYMMETRY_TOL).unwrap());
        assert!(commutes_and_orthogonal(&a, &DenseMatrix::identity(3), SYMMETRY_TOL).is_err());
    }

    #[test]
    fn orbit_examples() {
        let a = heat2();
        let syms = builtin_symmetries(SystemKind::Heat, 2);
        assert_eq!(syms[1].to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(syms[2].to_rows(), vec![vec![0.0, -1.0], vec![-1.0, 0.0]]);

        let orbit = symmetry_orbit(&a, &[0.97891, -0.20431], &syms).unwrap();
        assert_eq!(orbit.len(), 4);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let orbit = symmetry_orbit(&a, &[s, -s], &syms[2..]).unwrap();
        assert_eq!(orbit.len(), 1);

        assert_eq!(symmetry_orbit(&a, &[1.0, 0.0], &[]).unwrap(), vec![vec![1.0, 0.0]]);

        let bad = vec![syms[0].clone(), DenseMatrix::diag(&[1.0, 2.0])];
        assert!(matches!(
            symmetry_orbit(&a, &[1.0, 0.0], &bad),
            Err(Error::InvalidSymmetry { index: 1, .. })
        ));
    }

    #[test]
    fn wave_orbit_matches_heat_orbit() {
        let heat = crate::systems::SystemSpec::new(SystemKind::Heat, 3, Scaling::None).build().unwrap();
        let wave = crate::systems::SystemSpec::new(SystemKind::Wave, 3, Scaling::None).build().unwrap();
        let b = [0.2, -0.5, 0.84];
        assert_eq!(system_orbit(&heat, &b).unwrap(), system_orbit(&wave, &b).unwrap());
    }

    #[test]
    fn gradient_is_odd() {
        let a = heat2();
        let b = project_to_sphere(&[0.3, 0.8]).unwrap();
        let nb: Vec<f64> = b.iter().map(|x| -x).collect();
        let g = fd_gradient(&a, &b, 1e-6).unwrap();
        let gn = fd_gradient(&a, &nb, 1e-6).unwrap();
        for (x, y) in g.iter().zip(&gn) {
            assert!((x + y).abs() < 1e-8, "{g:?} {gn:?}");
        }
        assert!(fd_gradient(&a, &b, 0.0).is_err());
    }

    #[test]
    fn gradient_vanishes_at_the_maximizer() {
        let b = project_to_sphere(&[0.97891, -0.20431]).unwrap();
        let g = fd_gradient(&heat2(), &b, 1e-6).unwrap();
        assert!(norm(&tangential(&b, &g)) <= 1e-4, "{g:?}");
    }

    #[test]
    fn gradient_matches_closed_form_derivative() {
        // ∂/∂b₂ of the closed form at (1, 0): 4 − (F_b₂ G + F G_b₂)/√(FG), F = 2, G = 1,
        // F_b₂ = G_b₂ = 2; the b₁ direction is radial and drops out.
        let want = 4.0 - 6.0 / 2f64.sqrt();
        let g = fd_gradient(&heat2(), &[1.0, 0.0], 1e-6).unwrap();
        assert!(g[0].abs() < 1e-9);
        assert!((g[1] - want).abs() < 1e-5, "{} vs {want}", g[1]);
    }

    #[test]
    fn all_zero_population_is_reported() {
        let obj = Objective::new(&DenseMatrix::identity(3)).unwrap();
        let cfg = DEConfig::for_dim(3, 1);
        assert_eq!(differential_evolution(&obj, &cfg).unwrap_err(), Error::NoControllableDirection);
    }

    #[test]
    fn heat2_run_is_monotone_and_normalized() {
        let obj = Objective::new(&heat2()).unwrap();
        let r = differential_evolution(&obj, &DEConfig::for_dim(2, 11)).unwrap();
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
        assert!((norm(&r.best_b) - 1.0).abs() < 1e-12);
        assert!((r.best_value - obj.value(&r.best_b)).abs() <= 1e-12);
        assert!((r.best_value - 0.2).abs() < 1e-6, "{}", r.best_value);
    }
}
