use std::time::Instant;

use actuator_core::spectral::{jacobi_spectrum, Objective};
use actuator_core::systems::laplacian_eigs;
use actuator_core::SystemKind;
use serde::Serialize;

use crate::args::{Format, SpectrumArgs, SpectrumTarget};
use crate::output::{format_or, write_csv, write_json, Report};
use crate::system::{build_system, unit_actuator};
use crate::{exit, CliError, CliResult};

#[derive(Debug, Serialize)]
struct SpectrumResult {
    target: SpectrumTarget,
    eigenvalues: Vec<f64>,
    /// Closed-form Laplacian eigenvalues, for the heat system only.
    formula: Option<Vec<f64>>,
    max_relative_error: Option<f64>,
}

pub fn run(args: &SpectrumArgs) -> CliResult<i32> {
    let started = Instant::now();
    let system = build_system(&args.system)?;
    let n = system.actuator_dim();

    let (eigenvalues, formula) = match args.of {
        SpectrumTarget::System => {
            if !system.a.is_symmetric(1e-12 * system.a.max_abs()) {
                return Err(CliError::config(format!(
                    "the {} system matrix is not symmetric; use --of gram",
                    system.kind
                )));
            }
            let formula = (system.kind == SystemKind::Heat)
                .then(|| laplacian_eigs(n, actuator_core::Scaling::from(args.system.scale).spacing(n)))
                .transpose()?;
            (jacobi_spectrum(&system.a)?, formula)
        }
        SpectrumTarget::Gram => {
            let b = args.b.as_deref().ok_or_else(|| CliError::config("--of gram needs --b"))?;
            let b = unit_actuator(b, n)?;
            let objective = Objective::with_input(&system.a, system.input)?;
            (jacobi_spectrum(objective.gram(&b).matrix())?, None)
        }
    };
    let max_relative_error = formula.as_ref().map(|f| {
        f.iter().zip(&eigenvalues).map(|(x, y)| (x - y).abs() / x.abs()).fold(0.0, f64::max)
    });

    if format_or(&args.output, Format::Json) == Format::Csv {
        let rows: Vec<Vec<f64>> =
            eigenvalues.iter().enumerate().map(|(i, v)| vec![(i + 1) as f64, *v]).collect();
        write_csv(&["index".into(), "eigenvalue".into()], &rows, &args.output)?;
        return Ok(exit::OK);
    }
    let result = SpectrumResult { target: args.of, eigenvalues, formula, max_relative_error };
    write_json(&Report::new("spectrum", args, &result, started)?, &args.output)?;
    Ok(exit::OK)
}
