use std::process::ExitCode;

fn main() -> ExitCode {
    latticelab::cli::try_main(std::env::args_os())
}
