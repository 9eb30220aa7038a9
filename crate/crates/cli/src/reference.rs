//! Published maximum values and maximizers for the built-in examples, kept
//! for side-by-side comparison with computed results.

use actuator_core::optimizer::project_to_sphere;
use actuator_core::spectral::Objective;
use actuator_core::SystemKind;
use serde_json::{json, Value};

pub struct Published {
    pub best_value: Option<f64>,
    pub maximizers: Vec<Vec<f64>>,
}

pub fn published(kind: SystemKind, n: usize) -> Option<Published> {
    use SystemKind::*;
    let (best_value, maximizers): (Option<f64>, Vec<Vec<f64>>) = match (kind, n) {
        (Heat | Wave, 2) => (
            Some(0.24913),
            vec![
                vec![-0.257983, 0.96614944],
                vec![0.257983, -0.96614944],
                vec![0.96614944, -0.257983],
                vec![-0.96614944, 0.257983],
            ],
        ),
        (Heat | Wave, 3) => (
            Some(0.0399),
            vec![
                vec![-0.7633, 0.6325, 0.1311],
                vec![-0.1311, 0.6325, -0.7633],
                vec![-0.1311, -0.6325, 0.7633],
                vec![0.7633, -0.6325, -0.1311],
                vec![-1.346e-7, 0.44707, -0.8944],
                // Published with a middle entry of -4.44707; normalized before evaluation.
                vec![4.975e-7, -4.44707, 0.8944],
                vec![-9.089e-8, 0.44707, -0.8944],
                vec![-4.8519e-8, 0.44707, -0.8944],
            ],
        ),
        (AdvectionPlus, 2) => {
            (Some(0.32236), vec![vec![-0.9548099, 0.296895], vec![0.9548099, -0.296895]])
        }
        (AdvectionMinus, 2) => {
            (Some(0.32236), vec![vec![-0.296895, 0.9548099], vec![0.296895, -0.9548099]])
        }
        (AdvectionPlus, 3) => (
            None,
            vec![
                vec![-0.8716, 0.4901, -9.34e-9],
                vec![-0.8716, 0.4901, 1.246e-6],
                vec![0.8716, -0.4901, -7.297e-8],
                vec![0.8716, -0.4901, 1.541e-7],
            ],
        ),
        (AdvectionMinus, 3) => (
            None,
            vec![
                vec![-9.229e-8, 0.4901, -0.8716],
                vec![-3.581e-8, 0.4901, -0.8716],
                vec![-2.223e-7, -0.4901, 0.8716],
                vec![1.787e-7, -0.4901, 0.8716],
            ],
        ),
        _ => return None,
    };
    Some(Published { best_value, maximizers })
}

/// Reference block for a report: the published numbers, our objective at the
/// published maximizers, and the gap to `measured`.
pub fn reference_block(kind: SystemKind, n: usize, objective: &Objective, measured: f64) -> Option<Value> {
    let p = published(kind, n)?;
    let at_maximizers: Vec<f64> = p
        .maximizers
        .iter()
        .map(|b| project_to_sphere(b).map(|u| objective.value(&u)).unwrap_or(f64::NAN))
        .collect();
    Some(json!({
        "best_value": p.best_value,
        "maximizers": p.maximizers,
        "objective_at_maximizers": at_maximizers,
        "measured_best_value": measured,
        "difference": p.best_value.map(|v| measured - v),
    }))
}
