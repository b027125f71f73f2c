use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(maxplus_sync_cli::main_with(std::env::args_os()))
}
