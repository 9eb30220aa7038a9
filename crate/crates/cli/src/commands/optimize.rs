use std::time::Instant;

use actuator_core::optimizer::{default_starts, multi_start, system_orbit, DEConfig};
use actuator_core::spectral::Objective;
use serde::Serialize;

use crate::args::{Format, OptimizeArgs};
use crate::output::{format_or, write_csv, write_json, Report};
use crate::reference::reference_block;
use crate::system::build_system;
use crate::{exit, CliError, CliResult};

#[derive(Debug, Serialize)]
struct OptimizeResult {
    system: String,
    state_dim: usize,
    best_b: Vec<f64>,
    best_value: f64,
    generations: usize,
    evaluations: usize,
    seed: u64,
    starts: usize,
    history: Vec<f64>,
    orbit: Vec<Vec<f64>>,
    orbit_values: Vec<f64>,
}

pub fn run(args: &OptimizeArgs) -> CliResult<i32> {
    let started = Instant::now();
    let system = build_system(&args.system)?;
    let n = system.actuator_dim();
    let objective = Objective::with_input(&system.a, system.input)?;

    let mut cfg = DEConfig::for_dim(n, args.seed);
    cfg.f = args.f;
    cfg.cr = args.cr;
    if let Some(pop) = args.pop {
        cfg.population_size = pop;
    }
    if let Some(gens) = args.gens {
        cfg.max_generations = gens;
    }
    let starts = args.starts.unwrap_or_else(|| default_starts(n));
    if starts == 0 {
        return Err(CliError::config("--starts must be at least 1"));
    }

    let run = multi_start(&objective, &cfg, starts)?;
    let orbit = system_orbit(&system, &run.best_b)?;
    let orbit_values = orbit.iter().map(|b| objective.value(b)).collect();
    log::info!("best value {:.12} after {} evaluations", run.best_value, run.evaluations);

    if format_or(&args.output, Format::Json) == Format::Csv {
        let rows: Vec<Vec<f64>> =
            run.history.iter().enumerate().map(|(g, v)| vec![g as f64, *v]).collect();
        write_csv(&["generation".into(), "best_value".into()], &rows, &args.output)?;
        return Ok(exit::OK);
    }

    let result = OptimizeResult {
        system: system.kind.to_string(),
        state_dim: system.a.rows(),
        best_b: run.best_b,
        best_value: run.best_value,
        generations: run.generations,
        evaluations: run.evaluations,
        seed: run.seed,
        starts: run.starts,
        history: run.history,
        orbit,
        orbit_values,
    };
    let reference = reference_block(system.kind, n, &objective, result.best_value);
    let report = Report::new("optimize", args, &result, started)?.with_reference(reference);
    write_json(&report, &args.output)?;
    Ok(exit::OK)
}
