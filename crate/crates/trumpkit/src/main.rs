//! Binary entry point; all behavior lives in [`trumpkit::cli`].

use std::process::ExitCode;

fn main() -> ExitCode {
    trumpkit::cli::run(std::env::args_os())
}
