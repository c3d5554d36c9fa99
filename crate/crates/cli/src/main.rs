mod args;
mod commands;
mod output;

use std::process::ExitCode;

use arw_core::ArwError;
use clap::Parser;

use args::{Cli, ExperimentConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match ExperimentConfig::resolve(cli.command, cli.opts) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match pool.install(|| commands::run(&cfg)) {
        Ok(report) => report,
        Err(e @ ArwError::BudgetExceeded { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BUDGET);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Err(e) = write_outputs(&cfg, &report.table) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn write_outputs(cfg: &ExperimentConfig, table: &output::Table) -> std::io::Result<()> {
    output::emit(cfg.out.as_deref(), &table.to_csv(&cfg.echo())?)?;
    if let Some(path) = &cfg.json {
        let config = serde_json::to_value(cfg).expect("config serializes");
        let text = serde_json::to_string_pretty(&table.to_json(config)).expect("rows serialize");
        std::fs::write(path, text + "\n")?;
    }
    Ok(())
}
