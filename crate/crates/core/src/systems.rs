//! Finite-difference dynamics for the heat, wave and advection–diffusion
//! examples on the unit interval with homogeneous Dirichlet conditions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Heat,
    Wave,
    AdvectionPlus,
    AdvectionMinus,
    Custom,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Heat => "heat",
            SystemKind::Wave => "wave",
            SystemKind::AdvectionPlus => "advection-plus",
            SystemKind::AdvectionMinus => "advection-minus",
            SystemKind::Custom => "custom",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(SystemKind::Heat),
            "wave" => Ok(SystemKind::Wave),
            "advection-plus" => Ok(SystemKind::AdvectionPlus),
            "advection-minus" => Ok(SystemKind::AdvectionMinus),
            "custom" => Ok(SystemKind::Custom),
            other => Err(Error::InvalidInput(format!("unknown system kind '{other}'"))),
        }
    }
}

/// Whether the difference operators carry the `1/h²` (and `1/(2h)`) factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    #[default]
    None,
    HSquared,
}

impl Scaling {
    /// Grid spacing used by the operators: `1/(n−1)` when scaled, else 1.
    pub fn spacing(self, n: usize) -> f64 {
        match self {
            Scaling::None => 1.0,
            Scaling::HSquared => 1.0 / (n as f64 - 1.0),
        }
    }
}

impl FromStr for Scaling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Scaling::None),
            "h2" | "h-squared" => Ok(Scaling::HSquared),
            other => Err(Error::InvalidInput(format!("unknown scaling '{other}'"))),
        }
    }
}

/// How an actuator profile `b` enters the state equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMap {
    /// The input vector is `b` itself.
    Full,
    /// Second-order systems in first-order form: the input vector is `(0, b)`.
    Velocity,
}

impl InputMap {
    pub fn actuator_dim(self, state_dim: usize) -> Result<usize> {
        match self {
            InputMap::Full => Ok(state_dim),
            InputMap::Velocity if state_dim % 2 == 0 => Ok(state_dim / 2),
            InputMap::Velocity => {
                Err(Error::Dimension(format!("odd state dimension {state_dim} for (0, b) input")))
            }
        }
    }

    pub fn state_dim(self, actuator_dim: usize) -> usize {
        match self {
            InputMap::Full => actuator_dim,
            InputMap::Velocity => 2 * actuator_dim,
        }
    }

    pub fn embed(self, b: &[f64]) -> Vec<f64> {
        match self {
            InputMap::Full => b.to_vec(),
            InputMap::Velocity => {
                let mut v = vec![0.0; b.len()];
                v.extend_from_slice(b);
                v
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    /// Number of grid points.
    pub n: usize,
    pub scaling: Scaling,
}

/// Dynamics matrix together with its input map.
#[derive(Debug, Clone)]
pub struct System {
    pub kind: SystemKind,
    pub a: DenseMatrix,
    pub input: InputMap,
}

impl System {
    pub fn custom(a: DenseMatrix) -> Result<Self> {
        let n = a.ensure_square("custom system matrix")?;
        if n < 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        Ok(Self { kind: SystemKind::Custom, a, input: InputMap::Full })
    }

    /// Length of the actuator vector.
    pub fn actuator_dim(&self) -> usize {
        self.input.actuator_dim(self.a.rows()).expect("validated at construction")
    }
}

impl SystemSpec {
    pub fn new(kind: SystemKind, n: usize, scaling: Scaling) -> Self {
        Self { kind, n, scaling }
    }

    pub fn state_dim(&self) -> usize {
        match self.kind {
            SystemKind::Wave => 2 * self.n,
            _ => self.n,
        }
    }

    pub fn build(&self) -> Result<System> {
        let (a, input) = match self.kind {
            SystemKind::Heat => (dirichlet_laplacian(self.n, self.scaling)?, InputMap::Full),
            SystemKind::Wave => (wave_dynamics(self.n, self.scaling)?, InputMap::Velocity),
            SystemKind::AdvectionPlus => {
                (advection_diffusion(self.n, 1, self.scaling)?, InputMap::Full)
            }
            SystemKind::AdvectionMinus => {
                (advection_diffusion(self.n, -1, self.scaling)?, InputMap::Full)
            }
            SystemKind::Custom => {
                return Err(Error::InvalidInput("custom systems are built from a matrix".into()))
            }
        };
        Ok(System { kind: self.kind, a, input })
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// Three-point Dirichlet Laplacian `tridiag(1, −2, 1)`, times `1/h²` when scaled.
pub fn dirichlet_laplacian(n: usize, scaling: Scaling) -> Result<DenseMatrix> {
    check_grid(n)?;
    let h = scaling.spacing(n);
    let c = 1.0 / (h * h);
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = -2.0 * c;
        if i + 1 < n {
            a[(i, i + 1)] = c;
            a[(i + 1, i)] = c;
        }
    }
    Ok(a)
}

/// `λ_j = −(4/h²) sin²(πj / (2(n+1)))`, `j = 1..n`, ascending.
pub fn laplacian_eigs(n: usize, h: f64) -> Result<Vec<f64>> {
    check_grid(n)?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("grid spacing must be positive, got {h}")));
    }
    let mut eigs: Vec<f64> = (1..=n)
        .map(|j| {
            let s = (PI * j as f64 / (2.0 * (n as f64 + 1.0))).sin();
            -4.0 / (h * h) * s * s
        })
        .collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// First-order wave operator `[[0, I], [A_Δ, 0]]` of size `2n`.
pub fn wave_dynamics(n: usize, scaling: Scaling) -> Result<DenseMatrix> {
    let lap = dirichlet_laplacian(n, scaling)?;
    let mut a = DenseMatrix::zeros(2 * n, 2 * n);
    a.set_block(0, n, &DenseMatrix::identity(n));
    a.set_block(n, 0, &lap);
    Ok(a)
}

/// Laplacian plus centred advection `(1/(2h))·tridiag(∓1, 0, ±1)`; `sign`
/// selects the superdiagonal sign.
pub fn advection_diffusion(n: usize, sign: i8, scaling: Scaling) -> Result<DenseMatrix> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidInput(format!("advection sign must be ±1, got {sign}")));
    }
    let mut a = dirichlet_laplacian(n, scaling)?;
    let c = f64::from(sign) / (2.0 * scaling.spacing(n));
    for i in 0..n - 1 {
        a[(i, i + 1)] += c;
        a[(i + 1, i)] -= c;
    }
    Ok(a)
}
