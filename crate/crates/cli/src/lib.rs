//! Library side of the `actuator` command-line tool.

pub mod args;
pub mod commands;
pub mod output;
pub mod reference;
pub mod system;

use std::fmt;

use actuator_core::Error as CoreError;

pub use args::Cli;
pub use output::Report;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NON_CONTROLLABLE: i32 = 2;
    pub const VERIFY_FAILED: i32 = 3;
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: exit::CONFIG, kind: "config", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: exit::CONFIG, kind: "io", message: message.into() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": { "kind": self.kind, "message": self.message, "exit_code": self.code }
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let (code, kind) = match &e {
            CoreError::NonControllable { .. } => (exit::NON_CONTROLLABLE, "non-controllable"),
            CoreError::NoControllableDirection => (exit::NON_CONTROLLABLE, "no-controllable-direction"),
            CoreError::IllConditioned { .. } => (exit::CONFIG, "ill-conditioned"),
            CoreError::Dimension(_) => (exit::CONFIG, "dimension"),
            CoreError::UnsupportedDimension(_) => (exit::CONFIG, "unsupported-dimension"),
            CoreError::InvalidSymmetry { .. } => (exit::CONFIG, "invalid-symmetry"),
            CoreError::DegenerateGrid(_) => (exit::CONFIG, "degenerate-grid"),
            _ => (exit::CONFIG, "invalid-input"),
        };
        Self { code, kind, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command line and returns the exit code. Errors are printed
/// to stderr as JSON.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.threads {
        Some(0) => Err(CliError::config("--threads must be at least 1")),
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli.command)),
            Err(e) => Err(CliError::config(format!("thread pool: {e}"))),
        },
        None => commands::dispatch(&cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    }
}
