use std::process::ExitCode;

fn main() -> ExitCode {
    dicke_lab::cli::main_with(std::env::args_os().collect())
}
