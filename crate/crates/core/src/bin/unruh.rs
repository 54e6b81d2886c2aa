use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(unruh::cli::main_with_args(std::env::args_os()))
}
