//! Building the dynamics from command-line options.

use std::path::Path;

use actuator_core::optimizer::project_to_sphere;
use actuator_core::{DenseMatrix, Scaling, System, SystemKind, SystemSpec};

use crate::args::{ScaleArg, SystemArg, SystemArgs};
use crate::{CliError, CliResult};

impl From<ScaleArg> for Scaling {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::None => Scaling::None,
            ScaleArg::H2 => Scaling::HSquared,
        }
    }
}

pub fn build_system(args: &SystemArgs) -> CliResult<System> {
    let kind = match (args.system, &args.matrix) {
        (SystemArg::Custom, None) => {
            return Err(CliError::config("--system custom needs --matrix <path>"))
        }
        (SystemArg::Custom, Some(_)) | (SystemArg::Heat, Some(_)) => SystemKind::Custom,
        (_, Some(_)) => return Err(CliError::config("--matrix is only valid with --system custom")),
        (SystemArg::Heat, None) => SystemKind::Heat,
        (SystemArg::Wave, None) => SystemKind::Wave,
        (SystemArg::AdvectionPlus, None) => SystemKind::AdvectionPlus,
        (SystemArg::AdvectionMinus, None) => SystemKind::AdvectionMinus,
    };
    if kind == SystemKind::Custom {
        let path = args.matrix.as_deref().expect("checked above");
        return Ok(System::custom(read_matrix(path)?)?);
    }
    Ok(SystemSpec::new(kind, args.n, args.scale.into()).build()?)
}

/// Reads a headerless CSV of reals, one matrix row per line.
pub fn read_matrix(path: &Path) -> CliResult<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    CliError::config(format!("{}: row {}: not a number: {field:?}", path.display(), line + 1))
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::config(format!("{}: empty matrix", path.display())));
    }
    Ok(DenseMatrix::from_rows(&rows)?)
}

/// Validates the length of a user actuator and normalizes it.
pub fn unit_actuator(b: &[f64], dim: usize) -> CliResult<Vec<f64>> {
    if b.len() != dim {
        return Err(CliError::config(format!("--b has {} entries, the actuator has {dim}", b.len())));
    }
    project_to_sphere(b).map_err(|_| CliError::config("--b must be nonzero"))
}
