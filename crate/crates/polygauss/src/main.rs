use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(polygauss::cli::run(std::env::args_os()))
}
