//! `eiwe` command-line front end.

mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

use commands::CmdError;
use config::SweepConfig;

const EXIT_THRESHOLD: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "eiwe", version, about = "Work extraction from measured entangled Gaussian modes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Run configuration (flat `key = value` file).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; overrides the config file.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// RNG seed; overrides the config file.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Fock cutoff; turns the oracle on.
    #[arg(long, global = true, value_name = "N")]
    cutoff: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the entropy-difference work with ξ(r)·n̄ℏω over an (r, n̄) grid.
    #[command(name = "verify-eq4")]
    VerifyEq4,
    /// Evaluate the pipeline over the full parameter grid.
    Sweep,
    /// Cross-check Gaussian work against the truncated Fock-space oracle.
    OracleCompare,
    /// Ricci-scalar change ΔR = ξ·32Gp₀/c⁴.
    Curvature {
        #[arg(long, allow_negative_numbers = true)]
        xi: f64,
        /// Pressure in Pa.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        p0: f64,
    },
}

fn init_logging() -> Result<(), String> {
    let level = match std::env::var("EIWE_LOG").as_deref() {
        Err(_) => LevelFilter::Warn,
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => return Err(format!("EIWE_LOG must be quiet, info or debug, got '{other}'")),
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    Ok(())
}

fn load_config(common: &Common) -> Result<SweepConfig, String> {
    let path = common.config.as_deref().ok_or("this command needs --config PATH")?;
    let mut cfg = SweepConfig::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(f) = &common.format {
        cfg.format = f.parse().map_err(|e: config::ConfigError| e.0)?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(c) = common.cutoff {
        cfg.oracle = Some(c);
    }
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<bool, CmdError> {
    let usage = CmdError::Usage;
    if let Command::Curvature { xi, p0 } = cli.command {
        if cli.common.format.as_deref() == Some("csv") {
            return Err(usage("curvature emits a single JSON record; --format csv is not supported".into()));
        }
        let record = commands::curvature(xi, p0)?;
        let mut out = open_out(cli.common.out.as_deref()).map_err(|e| usage(e.to_string()))?;
        serde_json::to_writer_pretty(&mut out, &record).map_err(|e| usage(e.to_string()))?;
        writeln!(out).and_then(|_| out.flush()).map_err(|e| usage(e.to_string()))?;
        return Ok(true);
    }

    let cfg = load_config(&cli.common).map_err(usage)?;
    let table = match cli.command {
        Command::VerifyEq4 => commands::verify_eq4(&cfg)?,
        Command::Sweep => commands::sweep(&cfg)?,
        Command::OracleCompare => commands::oracle_compare(&cfg)?,
        Command::Curvature { .. } => unreachable!(),
    };
    let mut out = open_out(cli.common.out.as_deref()).map_err(|e| usage(e.to_string()))?;
    table
        .write(cfg.format, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| usage(format!("cannot write output: {e}")))?;
    Ok(table.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(msg) = init_logging() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::error!("threshold check failed");
            ExitCode::from(EXIT_THRESHOLD)
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CmdError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_THRESHOLD)
        }
    }
}
