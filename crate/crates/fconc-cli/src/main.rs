use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fconc_cli::{run, CliError, Command, Options, ScenarioConfig};

#[derive(Parser)]
#[command(name = "fconc", version, about = "Eventual F-concavity experiments for heat flows")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Scenario file (TOML); defaults apply to every missing key
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the CSV here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the timestamp comment from the CSV header
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads for sweeps and probes
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Gauss-Legendre order per panel (overrides sweep.quadrature_order)
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Render the classification tables
    Classify,
    /// Eventual concavity sweep over a geometric t grid
    Sweep,
    /// I, J, psi or U along probe curves
    Probe,
    /// Compare the strength of two admissible functions
    Compare,
    /// Report on condition (A) for the datum
    CheckA,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("fconc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let command = match cli.command {
        Cmd::Classify => Command::Classify,
        Cmd::Sweep => Command::Sweep,
        Cmd::Probe => Command::Probe,
        Cmd::Compare => Command::Compare,
        Cmd::CheckA => Command::CheckA,
    };
    let opts = Options {
        no_timestamp: cli.no_timestamp,
        quadrature_order: cli.quadrature_order,
    };
    let out = run(command, &cfg, &opts)?;
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &out.csv)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            print!("{}", out.text);
        }
        None if command == Command::Classify => print!("{}", out.text),
        None => {
            print!("{}", out.csv);
            eprint!("{}", out.text);
        }
    }
    Ok(out.code)
}
