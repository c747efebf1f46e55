//! Runs every acceptance criterion at its stated tolerance and prints one
//! pass/fail line per criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;

use spinshift_cli::validate::{run, CHECK_COUNT};
use spinshift_cli::{Command, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::for_command(Command::Validate);
    let report = match run(&cfg, |c| println!("{}", c.summary())) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    assert_eq!(report.checks.len(), CHECK_COUNT);
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        CHECK_COUNT - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
