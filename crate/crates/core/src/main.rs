use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = rlam::harness::cli::run_cli(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
