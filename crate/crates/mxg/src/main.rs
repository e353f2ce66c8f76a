use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mxg::cli::run(std::env::args()) as u8)
}
