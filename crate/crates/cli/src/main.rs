use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfikit_cli::config::parse_backends;
use qfikit_cli::{
    emit_optimal_ring, run_scenario, selftest, tolerance_from_env, validate_backends, write_result, CliError,
    Format, Result, ScenarioConfig, SweepResult, EXIT_VALIDATION,
};

#[derive(Parser)]
#[command(name = "qfikit", version, about = "Quantum Fisher information sweeps for unitary parametrizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Fisher information over the configured grid.
    Run(Common),
    /// Compare generator backends at every grid point.
    Validate(Common),
    /// Sample the ring of optimal initial states.
    Ring(Common),
    /// Run built-in checks with known answers.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output file (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(short, long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Comma-separated backend list, overriding the scenario.
    #[arg(short, long)]
    backend: Option<String>,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::from_path(&self.config)?;
        if let Some(list) = &self.backend {
            cfg.backends = parse_backends(list).map_err(CliError::Validation)?;
        }
        if let Some(path) = &self.output {
            cfg.output_path = Some(path.clone());
        }
        if let Some(f) = &self.format {
            cfg.format = Some(f.parse::<Format>().map_err(CliError::Validation)?);
        }
        Ok(cfg)
    }
}

fn emit(cfg: &ScenarioConfig, result: &SweepResult) -> Result<()> {
    let format = cfg.resolved_format();
    match &cfg.output_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_result(result, format, &mut w)?;
            w.flush()?;
        }
        None => write_result(result, format, io::stdout().lock())?,
    }
    Ok(())
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Run(args) => {
            let cfg = args.load()?;
            emit(&cfg, &run_scenario(&cfg)?)?;
            Ok(0)
        }
        Command::Validate(args) => {
            let cfg = args.load()?;
            let report = validate_backends(&cfg, tolerance_from_env()?)?;
            emit(&cfg, &report.table)?;
            for line in &report.skipped {
                eprintln!("{line}");
            }
            eprintln!("{}", report.summary());
            Ok(if report.passed() { 0 } else { EXIT_VALIDATION })
        }
        Command::Ring(args) => {
            let cfg = args.load()?;
            emit(&cfg, &emit_optimal_ring(&cfg)?)?;
            Ok(0)
        }
        Command::Selftest => {
            let checks = selftest()?;
            for c in &checks {
                println!(
                    "[{}] {}: {:e} (tolerance {:e})",
                    if c.passed() { "ok" } else { "FAIL" },
                    c.name,
                    c.deviation,
                    c.tolerance
                );
            }
            Ok(if checks.iter().all(|c| c.passed()) { 0 } else { EXIT_VALIDATION })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
