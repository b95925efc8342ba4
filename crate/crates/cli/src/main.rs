use std::path::PathBuf;
use std::process::ExitCode;

use backcom_cli::config::{parse_regime, parse_schemes};
use backcom_cli::{emit_outputs, run, summarize, ConfigFile, Experiment, Result};
use clap::Parser;

/// Minimum transmit power sweeps for IRS-aided backscatter links.
#[derive(Debug, Parser)]
#[command(name = "backcom", version)]
struct Args {
    /// fig2 | fig3 | fig4 | single (overrides the config file; default single)
    #[arg(long)]
    experiment: Option<Experiment>,

    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    realizations: Option<usize>,

    /// Output directory (default results/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated scheme names, e.g. mm_sdr,no_irs.
    #[arg(long)]
    schemes: Option<String>,

    /// auto | dinkelbach | circuit | noise
    #[arg(long)]
    regime: Option<String>,

    /// Fill the wall_ms column (makes results.csv non-reproducible).
    #[arg(long)]
    record_timing: bool,
}

fn main_inner(args: Args) -> Result<()> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut cfg = file.resolve(args.experiment.unwrap_or(Experiment::Single))?;
    if let Some(experiment) = args.experiment {
        cfg.experiment = experiment;
        if file.schemes.is_none() {
            cfg.schemes = experiment.default_schemes();
        }
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.realizations {
        if n == 0 {
            return Err(backcom_cli::CliError::Config("realizations must be at least 1".into()));
        }
        cfg.realizations = n;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    } else if file.out.is_none() {
        cfg.out = PathBuf::from("results").join(cfg.experiment.name());
    }
    if let Some(list) = &args.schemes {
        cfg.schemes = parse_schemes(list.split(','))?;
    }
    if let Some(r) = &args.regime {
        cfg.power.regime = parse_regime(r)?;
    }
    cfg.record_timing |= args.record_timing;

    let result = run(&cfg)?;
    let outputs = emit_outputs(&result, &cfg.out)?;
    for s in summarize(&result.rows) {
        let mean = s.mean_dbm.map_or("infeasible".to_string(), |m| format!("{m:8.3} dBm"));
        let std = s.std_db.map_or(String::new(), |d| format!(" ± {d:.3}"));
        println!(
            "{:<24} {:>8} {:<14} {mean}{std}  ({}/{} feasible)",
            s.sweep_var_name, s.sweep_var_value, s.scheme, s.feasible, s.realizations
        );
    }
    eprintln!("wrote {}", outputs.results.display());
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
