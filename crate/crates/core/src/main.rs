use std::process::ExitCode;

fn main() -> ExitCode {
    bellmart::cli::main_with_args(std::env::args_os())
}
