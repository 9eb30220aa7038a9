pub mod cost;
pub mod optimize;
pub mod sample;
pub mod spectrum;
pub mod verify;

use crate::args::Command;
use crate::CliResult;

pub fn dispatch(command: &Command) -> CliResult<i32> {
    match command {
        Command::Optimize(a) => optimize::run(a),
        Command::Sample(a) => sample::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Cost(a) => cost::run(a),
        Command::Spectrum(a) => spectrum::run(a),
    }
}
