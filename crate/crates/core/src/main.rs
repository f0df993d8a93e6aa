use std::process::ExitCode;

fn main() -> ExitCode {
    dlap::cli::main_with_args(std::env::args_os())
}
