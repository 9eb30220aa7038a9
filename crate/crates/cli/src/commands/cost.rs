use std::time::Instant;

use actuator_core::cost::{blowup_exponent, factorization_report};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{CostArgs, Format};
use crate::commands::verify::random_unit;
use crate::output::{format_or, write_csv, write_json, Report};
use crate::system::{build_system, unit_actuator};
use crate::{exit, CliError, CliResult};

#[derive(Debug, Serialize)]
struct CostRow {
    b: Vec<f64>,
    horizon: f64,
    exact_cost: f64,
    kappa: f64,
    inverse_norm: f64,
    upper_bound: f64,
    ratio: f64,
    bound_holds: bool,
}

#[derive(Debug, Serialize)]
struct CostResult {
    rows: Vec<CostRow>,
    ratio_min: f64,
    ratio_max: f64,
    /// `ratio_max / ratio_min`
    ratio_spread: f64,
    all_bounds_hold: bool,
    /// Least-squares slope of `log κ` against `log T`, when the horizons
    /// allow a fit (at least 4 spanning a decade).
    blowup_exponent: Option<f64>,
}

pub fn run(args: &CostArgs) -> CliResult<i32> {
    let started = Instant::now();
    let system = build_system(&args.system)?;
    let n = system.actuator_dim();
    if args.horizons.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(CliError::config("--T values must be positive"));
    }

    let mut actuators = Vec::new();
    if let Some(b) = &args.b {
        actuators.push(unit_actuator(b, n)?);
    }
    let random = args.samples.unwrap_or(if args.b.is_some() { 0 } else { 10 });
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    actuators.extend((0..random).map(|_| random_unit(&mut rng, n)));
    if actuators.is_empty() {
        return Err(CliError::config("no actuators: give --b or --samples"));
    }

    let jobs: Vec<(&Vec<f64>, f64)> =
        actuators.iter().flat_map(|b| args.horizons.iter().map(move |&t| (b, t))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(b, t)| {
            let r = factorization_report(&system.a, &system.input.embed(b), t)?;
            Ok(CostRow {
                b: b.clone(),
                horizon: t,
                exact_cost: r.exact_cost,
                kappa: r.kappa,
                inverse_norm: r.inverse_norm,
                upper_bound: r.upper_bound,
                ratio: r.ratio,
                bound_holds: r.bound_holds,
            })
        })
        .collect::<actuator_core::Result<Vec<_>>>()?;

    let exponent = match blowup_exponent(&system.a, &args.horizons) {
        Ok(slope) => Some(slope),
        Err(actuator_core::Error::DegenerateGrid(_)) => None,
        Err(e) => return Err(e.into()),
    };

    if format_or(&args.output, Format::Json) == Format::Csv {
        let mut header: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
        header.extend(
            ["horizon", "exact_cost", "kappa", "inverse_norm", "upper_bound", "ratio"]
                .map(String::from),
        );
        let table: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let mut v = r.b.clone();
                v.extend([r.horizon, r.exact_cost, r.kappa, r.inverse_norm, r.upper_bound, r.ratio]);
                v
            })
            .collect();
        write_csv(&header, &table, &args.output)?;
        return Ok(exit::OK);
    }

    let ratio_min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let ratio_max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let result = CostResult {
        all_bounds_hold: rows.iter().all(|r| r.bound_holds),
        rows,
        ratio_min,
        ratio_max,
        ratio_spread: ratio_max / ratio_min,
        blowup_exponent: exponent,
    };
    write_json(&Report::new("cost", args, &result, started)?, &args.output)?;
    Ok(exit::OK)
}
