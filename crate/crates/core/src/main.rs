use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zonal_stlf::attack::{AttackKind, Direction, NormOrder};
use zonal_stlf::pipeline::{self, RunConfig};
use zonal_stlf::{Error, Result};

/// Zonal load forecasting, temperature attacks and similarity checks.
#[derive(Parser)]
#[command(name = "zonal-stlf", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset.
    Synth {
        #[arg(long)]
        hours: Option<usize>,
        #[arg(long)]
        zones: Option<usize>,
    },
    /// Parse and clean raw load and temperature files.
    Ingest {
        #[arg(long)]
        load: Option<PathBuf>,
        #[arg(long)]
        temperature: Option<PathBuf>,
    },
    /// Fit f1/f2 per zone and write the metrics table.
    Fit,
    /// Forecast with saved models.
    Predict,
    /// Perturb the target zone's temperature.
    Attack {
        /// Gaussian noise standard deviation, °F.
        #[arg(long, conflicts_with = "epsilon")]
        sd: Option<f64>,
        /// Norm-ball radius of the optimized attack, °F.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "2", requires = "epsilon")]
        norm: String,
        #[arg(long, default_value = "inflate", requires = "epsilon")]
        direction: String,
    },
    /// Similarity grid between zones, clean and attacked.
    Measure,
    /// Detection experiment.
    Detect,
    /// Text tables and SVG plots.
    Report,
}

fn configure(cli: &mut Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match &cli.command {
        Command::Synth { hours, zones } => {
            cfg.synth.n_hours = hours.unwrap_or(cfg.synth.n_hours);
            cfg.synth.zone_count = zones.unwrap_or(cfg.synth.zone_count);
        }
        Command::Ingest { load, temperature } => {
            cfg.data.load_file = load.clone().or(cfg.data.load_file);
            cfg.data.temperature_file = temperature.clone().or(cfg.data.temperature_file);
        }
        Command::Attack { sd, epsilon, norm, direction } => {
            if let Some(sd) = sd {
                cfg.attack = AttackKind::gaussian(*sd);
            }
            if let Some(eps) = epsilon {
                let direction = match direction.as_str() {
                    "inflate" => Direction::Inflate,
                    "deflate" => Direction::Deflate,
                    d => return Err(Error::Config(format!("unknown direction `{d}`"))),
                };
                cfg.attack = AttackKind::bounded(*eps, norm.parse::<NormOrder>()?, direction);
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(mut cli: Cli) -> Result<Vec<PathBuf>> {
    let cfg = configure(&mut cli)?;
    match cli.command {
        Command::Synth { .. } => pipeline::cmd_synth(&cfg),
        Command::Ingest { .. } => pipeline::cmd_ingest(&cfg),
        Command::Fit => pipeline::cmd_fit(&cfg),
        Command::Predict => pipeline::cmd_predict(&cfg),
        Command::Attack { .. } => pipeline::cmd_attack(&cfg),
        Command::Measure => pipeline::cmd_measure(&cfg),
        Command::Detect => pipeline::cmd_detect(&cfg),
        Command::Report => pipeline::cmd_report(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .init();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(files)) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_user_error() { 2 } else { 1 })
        }
        Err(_) => ExitCode::from(1),
    }
}
