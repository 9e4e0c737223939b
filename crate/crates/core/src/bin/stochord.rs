use std::panic;
use std::process::ExitCode;

use stochord::cli::{run_from, EXIT_INPUT};

fn main() -> ExitCode {
    let code = panic::catch_unwind(|| run_from(std::env::args_os())).unwrap_or(EXIT_INPUT);
    ExitCode::from(code as u8)
}
