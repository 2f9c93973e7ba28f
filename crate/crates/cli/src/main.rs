mod commands;
mod config;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{
    FileConfig, GeometryArgs, OutputPaths, QuadratureArgs, RunConfig, ScanArgs, Table1Args,
    Table1Config,
};

const THREADS_ENV: &str = "SUPERDARK_THREADS";

/// Superdark collective states of small atomic arrays.
#[derive(Parser)]
#[command(name = "superdark", version)]
struct Cli {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal dark state: binomial, moment-constraint and W-eigenvector forms.
    Darkstate {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Also write the report as JSON.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Frequency shifts that make the dark state a Hamiltonian eigenstate.
    Tune {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Slowest decay rate as a function of the middle-atom detuning.
    Scan {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        scan: ScanArgs,
        /// CSV output path (default: stdout).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// JSON summary of the located minimum.
        #[arg(long, value_name = "FILE")]
        summary: Option<PathBuf>,
    },
    /// Minimized and unshifted decay rates for 3- and 4-atom chains.
    Table1(Table1Args),
    /// Dump the coupling and decay matrices as CSV.
    Wmatrix {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        quadrature: QuadratureArgs,
        /// Write u.csv and w.csv here instead of stdout.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

fn configure_threads() -> superdark::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        superdark::Error::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got '{raw}'"
        ))
    })?;
    // fails only if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let none = QuadratureArgs::default();
    match cli.command {
        Command::Darkstate { geometry, json } => {
            let cfg = RunConfig::resolve(
                &geometry,
                &ScanArgs::default(),
                OutputPaths::default(),
                &none,
                &file,
            )?;
            commands::darkstate(&cfg, json.or(cfg.output.json.clone()).as_deref())
        }
        Command::Tune { geometry, json } => {
            let cfg = RunConfig::resolve(
                &geometry,
                &ScanArgs::default(),
                OutputPaths::default(),
                &none,
                &file,
            )?;
            commands::tune(&cfg, json.or(cfg.output.json.clone()).as_deref())
        }
        Command::Scan {
            geometry,
            scan,
            out,
            summary,
        } => {
            let paths = OutputPaths {
                csv: out,
                json: summary,
                dir: None,
            };
            let cfg = RunConfig::resolve(&geometry, &scan, paths, &none, &file)?;
            commands::scan(&cfg, cfg.output.csv.as_deref(), cfg.output.json.as_deref())
        }
        Command::Table1(args) => commands::table1(&Table1Config::resolve(&args, &file)?),
        Command::Wmatrix {
            geometry,
            quadrature,
            out_dir,
        } => {
            let paths = OutputPaths {
                dir: out_dir,
                ..Default::default()
            };
            let cfg =
                RunConfig::resolve(&geometry, &ScanArgs::default(), paths, &quadrature, &file)?;
            commands::wmatrix(&cfg, cfg.output.dir.as_deref())
        }
    }
}

/// 2 for configuration and usage problems, 1 for numerical failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<superdark::Error>())
        .map_or(1, |e| if e.is_usage() { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
