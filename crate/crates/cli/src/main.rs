//! `sitsim`: weather ingestion, simulation, release-strategy scans and
//! equilibrium tables from one JSON configuration.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sitsim::{Objective, WeatherVariant};

use crate::commands::Run;
use crate::config::{parse_start_grid, DataSource, RunConfig, DATA_DIR_VAR};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "sitsim", version, about = "Sterile-male release simulations driven by daily weather")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Daily water level, carrying capacity and density-dependent death rate.
    Weather(Common),
    /// Trajectory from the wild equilibrium, with optional releases.
    Simulate(Common),
    /// Strategy scan over start dates, one summary per weather variant.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Run all four weather variants.
        #[arg(long)]
        all_variants: bool,
    },
    /// Daily equilibria, release thresholds and the nuisance box.
    Equilibria(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Daily weather CSV.
    #[arg(long, conflicts_with = "synth")]
    weather: Option<PathBuf>,
    /// Use seeded synthetic weather.
    #[arg(long)]
    synth: bool,
    /// Length of the synthetic series in days.
    #[arg(long, requires = "synth")]
    days: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// full, mean, temp or rain.
    #[arg(long)]
    variant: Option<WeatherVariant>,
    /// nuisance or epi.
    #[arg(long)]
    objective: Option<Objective>,
    /// Residual fertility; a comma-separated list sweeps it in `scan`.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Mechanical control level; a list sweeps it in `scan`.
    #[arg(long, value_delimiter = ',')]
    mc: Vec<f64>,
    /// Massive release rate per hectare; a list sweeps it in `scan`.
    #[arg(long, value_delimiter = ',')]
    rate: Vec<f64>,
    /// weekly, weekly:FROM:TO, dates:D1,D2 or days:N1,N2.
    #[arg(long)]
    start_grid: Option<String>,
    /// Worker threads for scans.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(path) = &self.weather {
            cfg.data = Some(DataSource::Weather { path: path.clone() });
        }
        if self.synth {
            let profile = match &cfg.data {
                Some(DataSource::Synth { profile, .. }) => profile.clone(),
                _ => Default::default(),
            };
            let days = match (&cfg.data, self.days) {
                (_, Some(d)) => d,
                (Some(DataSource::Synth { days, .. }), None) => *days,
                _ => 3 * 365,
            };
            cfg.data = Some(DataSource::Synth { days, profile });
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(v) = self.variant {
            cfg.environment.capacity.variant = v;
        }
        if let Some(o) = self.objective {
            cfg.scan.objective = o;
        }
        // A single value sets the base configuration; several values sweep.
        if let [e] = self.eps[..] {
            cfg.scan.fertility.epsilon = e;
            cfg.sweep.epsilon.clear();
        } else if !self.eps.is_empty() {
            cfg.sweep.epsilon = self.eps.clone();
        }
        if let [m] = self.mc[..] {
            cfg.environment.capacity.mc_level = m;
            cfg.sweep.mc_level.clear();
        } else if !self.mc.is_empty() {
            cfg.sweep.mc_level = self.mc.clone();
        }
        if let [r] = self.rate[..] {
            cfg.scan.massive_rate = r;
            cfg.sweep.massive_rate.clear();
        } else if !self.rate.is_empty() {
            cfg.sweep.massive_rate = self.rate.clone();
        }
        if let Some(g) = &self.start_grid {
            cfg.scan.start_grid = parse_start_grid(g)?;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        let data_dir = std::env::var_os(DATA_DIR_VAR).map(PathBuf::from);
        cfg.resolve_data(data_dir.as_deref());
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<PathBuf, CliError> {
    let (name, common, all_variants) = match &cli.command {
        Command::Weather(c) => ("weather", c, false),
        Command::Simulate(c) => ("simulate", c, false),
        Command::Scan { common, all_variants } => ("scan", common, *all_variants),
        Command::Equilibria(c) => ("equilibria", c, false),
    };
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let mut run = Run::load(common.resolve()?)?;
    match &cli.command {
        Command::Weather(_) => commands::cmd_weather(&mut run)?,
        Command::Simulate(_) => commands::cmd_simulate(&mut run)?,
        Command::Scan { .. } => commands::cmd_scan(&mut run, all_variants)?,
        Command::Equilibria(_) => commands::cmd_equilibria(&mut run)?,
    }
    log::info!("outputs in {}", commands::out_dir(&run).display());
    run.finish(name)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sitsim: {e}");
            e.exit_code()
        }
    }
}
