//! Command-line front end for `spinshift`: figure data as CSV or JSON, a
//! single-point `compute` record, and the `validate` acceptance suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod series;
pub mod validate;

use std::fs;

pub use config::{Cli, Command, ConfigFile, Format, RunConfig};
pub use error::{CliError, CliResult};

/// Resolves the configuration and runs one subcommand.
pub fn run(cli: &Cli) -> CliResult<()> {
    let file = match &cli.flags.config {
        Some(path) => Some(ConfigFile::parse(&fs::read_to_string(path).map_err(
            |e| CliError::Usage(format!("cannot read config {}: {e}", path.display())),
        )?)?),
        None => None,
    };
    let cfg = RunConfig::resolve(cli.command, &cli.flags, file.as_ref())?;
    let series = match cfg.command {
        Command::Fig1 => commands::cmd_fig1(&cfg)?,
        Command::Fig2 => commands::cmd_fig2(&cfg)?,
        Command::Fig3 => commands::cmd_fig3(&cfg)?,
        Command::Fig4 => commands::cmd_fig4(&cfg)?,
        Command::Fig5 => commands::cmd_fig5(&cfg)?,
        Command::Compute => {
            let record = commands::cmd_compute(&cfg)?;
            return write_document(&cfg, &series::to_json(&record));
        }
        Command::Validate => {
            let report = validate::run(&cfg, |c| eprintln!("{}", c.summary()))?;
            write_document(&cfg, &series::to_json(&report))?;
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.id.to_string())
                .collect();
            if failed.is_empty() {
                return Ok(());
            }
            return Err(CliError::Validation(format!(
                "checks {} failed",
                failed.join(", ")
            )));
        }
    };
    for path in series::emit(&cfg, series)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn write_document(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.json", cfg.command.name()));
            fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
