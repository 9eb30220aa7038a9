use std::f64::consts::{PI, TAU};
use std::time::Instant;

use actuator_core::spectral::Objective;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Format, SampleArgs, SampleMode};
use crate::output::{format_or, write_csv, write_json, Report};
use crate::system::build_system;
use crate::{exit, CliError, CliResult};

pub const MIN_RESOLUTION: usize = 8;

/// A sampled point: its angular parameters (or index) and the unit actuator.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub params: Vec<f64>,
    pub b: Vec<f64>,
}

/// Parameter column names for a grid of dimension `n`.
pub fn grid_params(n: usize) -> CliResult<Vec<&'static str>> {
    match n {
        2 => Ok(vec!["theta"]),
        3 => Ok(vec!["theta", "phi"]),
        _ => Err(CliError::config(format!(
            "grid sampling supports n = 2 or 3, got n = {n}; use --mode random"
        ))),
    }
}

/// Angle grid on the circle (`r` points) or the 2-sphere (`r²` points).
/// Angles are `2π·(i/r)` and `π·(j/r)`, so the grid at `r` is a subset of the
/// grid at `2r` bit for bit.
pub fn grid(n: usize, r: usize) -> CliResult<Vec<SamplePoint>> {
    grid_params(n)?;
    if r < MIN_RESOLUTION {
        return Err(CliError::config(format!("--resolution must be at least {MIN_RESOLUTION}")));
    }
    let frac = |i: usize| i as f64 / r as f64;
    Ok(if n == 2 {
        (0..r)
            .map(|i| {
                let t = TAU * frac(i);
                SamplePoint { params: vec![t], b: vec![t.cos(), t.sin()] }
            })
            .collect()
    } else {
        (0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (t, p) = (TAU * frac(i), PI * frac(j));
                SamplePoint {
                    params: vec![t, p],
                    b: vec![p.sin() * t.cos(), p.sin() * t.sin(), p.cos()],
                }
            })
            .collect()
    })
}

/// `count` seeded, uniformly distributed unit vectors.
pub fn random_points(n: usize, count: usize, seed: u64) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| loop {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            if let Ok(b) = actuator_core::project_to_sphere(&v) {
                break SamplePoint { params: vec![k as f64], b };
            }
        })
        .collect()
}

pub fn evaluate(objective: &Objective, points: &[SamplePoint]) -> Vec<f64> {
    points.par_iter().map(|p| objective.value(&p.b)).collect()
}

#[derive(Debug, Serialize)]
struct SampleResult {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    max_value: f64,
    max_b: Vec<f64>,
    min_value: f64,
}

pub fn run(args: &SampleArgs) -> CliResult<i32> {
    let started = Instant::now();
    let system = build_system(&args.system)?;
    let n = system.actuator_dim();
    let objective = Objective::with_input(&system.a, system.input)?;

    let (params, points) = match args.mode {
        SampleMode::Grid => (grid_params(n)?, grid(n, args.resolution)?),
        SampleMode::Random => {
            let count = args.samples.unwrap_or(args.resolution);
            if count == 0 {
                return Err(CliError::config("--samples must be positive"));
            }
            (vec!["index"], random_points(n, count, args.seed))
        }
    };
    let values = evaluate(&objective, &points);

    let mut columns: Vec<String> = params.iter().map(|s| s.to_string()).collect();
    columns.extend((1..=n).map(|i| format!("b{i}")));
    columns.push("lambda1".into());
    let rows: Vec<Vec<f64>> = points
        .iter()
        .zip(&values)
        .map(|(p, v)| p.params.iter().chain(&p.b).chain(std::iter::once(v)).copied().collect())
        .collect();

    match format_or(&args.output, Format::Csv) {
        Format::Csv => write_csv(&columns, &rows, &args.output)?,
        Format::Json => {
            let best = (0..values.len()).fold(0, |m, i| if values[i] > values[m] { i } else { m });
            let result = SampleResult {
                max_value: values[best],
                max_b: points[best].b.clone(),
                min_value: values.iter().copied().fold(f64::INFINITY, f64::min),
                columns,
                rows,
            };
            write_json(&Report::new("sample", args, &result, started)?, &args.output)?;
        }
    }
    Ok(exit::OK)
}
