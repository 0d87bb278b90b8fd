use std::process::ExitCode;

fn main() -> ExitCode {
    maxent_cli::run()
}
