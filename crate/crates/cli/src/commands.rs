//! Subcommand bodies. Each writes its CSV artifacts and a JSON manifest into
//! the output directory.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use sitsim::bio_params::RateSplines;
use sitsim::environment::Environment;
use sitsim::export::{
    write_capacity_csv, write_epi_csv, write_epi_trajectory_csv, write_equilibria_csv, write_scan_csv,
    write_summary_csv, write_trajectory_csv, Header,
};
use sitsim::population::{EpiModel, EpiState, PopulationState, SitModel};
use sitsim::strategy::{ScanConfig, SummaryCell};
use sitsim::weather::{read_weather_csv, write_weather_csv, WeatherSeries};
use sitsim::{
    e1_min_box, integrate, scan_start_dates, summarize, synth_weather, wild_equilibrium, EnvironmentConfig,
    ImpulseSchedule, Objective, Rk4, StrategyContext, WeatherVariant,
};

use crate::config::{DataSource, RunConfig, SimModel};
use crate::error::CliError;

/// Loaded inputs shared by every command.
pub struct Run {
    pub cfg: RunConfig,
    pub config_hash: String,
    series: Option<WeatherSeries<f64>>,
    data_sha256: String,
    splines: RateSplines<f64>,
    outputs: Vec<OutputRecord>,
}

#[derive(Serialize)]
struct OutputRecord {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config_hash: &'a str,
    data_sha256: &'a str,
    seed: u64,
    config: &'a RunConfig,
    outputs: &'a [OutputRecord],
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    /// Reads or generates the data source of a resolved configuration.
    pub fn load(cfg: RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let (series, data_sha256) = match cfg.data.as_ref().expect("data source resolved") {
            DataSource::Weather { path } => {
                let bytes = std::fs::read(path)
                    .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
                let series = read_weather_csv(bytes.as_slice())
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                (Some(series), sha256_hex(&bytes))
            }
            DataSource::Synth { days, profile } => {
                let series = synth_weather(cfg.seed, *days, profile)?;
                let mut bytes = Vec::new();
                write_weather_csv(&series, &mut bytes)?;
                (Some(series), sha256_hex(&bytes))
            }
            DataSource::Constant { .. } => {
                let json = serde_json::to_string(&cfg.data).expect("data source serializes");
                (None, sha256_hex(json.as_bytes()))
            }
        };
        Ok(Self {
            config_hash: cfg.hash(),
            cfg,
            series,
            data_sha256,
            splines: RateSplines::published(),
            outputs: Vec::new(),
        })
    }

    fn rk(&self) -> Result<Rk4, CliError> {
        Ok(Rk4::new(self.cfg.steps_per_day)?)
    }

    fn environment(&self, env_cfg: &EnvironmentConfig<f64>) -> Result<Environment<f64>, CliError> {
        match (&self.series, self.cfg.data.as_ref().expect("data source resolved")) {
            (Some(series), _) => Ok(Environment::from_weather(series, &self.splines, env_cfg)?),
            (None, DataSource::Constant { temp, k, days }) => {
                env_cfg.capacity.validate()?;
                let k = (1.0 - env_cfg.capacity.mc_level) * k;
                Ok(Environment::constant_at_temperature(*days, &self.splines, *temp, k, env_cfg.epi)?)
            }
            (None, _) => unreachable!("weather sources always carry a series"),
        }
    }

    fn header(&self, env_cfg: &EnvironmentConfig<f64>, env: &Environment<f64>) -> Header {
        let source = match self.cfg.data.as_ref().expect("data source resolved") {
            DataSource::Weather { path } => format!("weather {}", path.display()),
            DataSource::Synth { days, .. } => format!("synthetic, {days} days"),
            DataSource::Constant { temp, k, days } => format!("constant T = {temp}, K = {k}, {days} days"),
        };
        Header::new()
            .with("config_hash", &self.config_hash)
            .with("data_sha256", &self.data_sha256)
            .with("seed", self.cfg.seed)
            .with("source", source)
            .with("variant", env.variant.short_name())
            .with("mc_level", env_cfg.capacity.mc_level)
            .with("evap_k", env_cfg.capacity.evap_k)
            .with("H0", env.h0)
    }

    fn emit(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), CliError> {
        let dir = &self.cfg.out;
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Other(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        std::fs::write(&path, &bytes).map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
        self.outputs.push(OutputRecord {
            file: name.to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Writes `<command>_manifest.json` and returns its path.
    pub fn finish(mut self, command: &str) -> Result<PathBuf, CliError> {
        let outputs = std::mem::take(&mut self.outputs);
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_hash: &self.config_hash,
            data_sha256: &self.data_sha256,
            seed: self.cfg.seed,
            config: &self.cfg,
            outputs: &outputs,
        };
        let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        json.push(b'\n');
        let name = format!("{command}_manifest.json");
        self.emit(&name, json)?;
        Ok(self.cfg.out.join(name))
    }
}

pub fn cmd_weather(run: &mut Run) -> Result<(), CliError> {
    let env_cfg = run.cfg.environment;
    let env = run.environment(&env_cfg)?;
    let header = run.header(&env_cfg, &env).with("H_max", env.h_max);
    let mut buf = Vec::new();
    write_capacity_csv(&env, &header, &mut buf)?;
    run.emit("capacity.csv", buf)?;
    if let (Some(series), Some(DataSource::Synth { .. })) = (&run.series, &run.cfg.data) {
        let mut buf = Vec::new();
        write_weather_csv(series, &mut buf)?;
        run.emit("weather.csv", buf)?;
    }
    Ok(())
}

pub fn cmd_simulate(run: &mut Run) -> Result<(), CliError> {
    let env_cfg = run.cfg.environment;
    let env = run.environment(&env_cfg)?;
    let rk = run.rk()?;
    let scan = &run.cfg.scan;
    let sim = run.cfg.simulate.clone();
    let available = env.len() - 1;
    let days = sim.days.unwrap_or(available);
    if days > available {
        return Err(CliError::Config(format!(
            "{days} simulated days exceed the {available} days available"
        )));
    }
    let schedule = match sim.t0 {
        Some(t0) => ImpulseSchedule::new(t0, scan.tau, sim.massive_count, scan.massive_bolus(), scan.small_bolus())?,
        None => ImpulseSchedule::none(),
    };

    let (start_day, initial) = (0..env.len())
        .find_map(|d| {
            let p = env.day(d);
            match wild_equilibrium(&p.ento, p.mu_a2) {
                Ok(w) if w.persists => Some(Ok((d, w.state))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .transpose()?
        .ok_or_else(|| CliError::Numerical("the wild population cannot persist on any day".into()))?;

    let header = run
        .header(&env_cfg, &env)
        .with("model", format!("{:?}", sim.model).to_lowercase())
        .with("initial", format!("wild equilibrium of day {start_day}"))
        .with("steps_per_day", rk.steps_per_day)
        .with("epsilon", scan.fertility.epsilon)
        .with(
            "releases",
            match sim.t0 {
                Some(t0) => format!(
                    "from day {t0} every {} days, massive {} x {}, small {}",
                    scan.tau,
                    sim.massive_count.map_or("all".to_string(), |n| n.to_string()),
                    scan.massive_bolus(),
                    scan.small_bolus()
                ),
                None => "none".to_string(),
            },
        );

    let females: Vec<f64>;
    match sim.model {
        SimModel::Population => {
            let model = SitModel::new(&env, scan.fertility);
            let mut y0 = initial;
            y0.m_s = 0.0;
            let traj = integrate(&model, &rk, y0.to_array(), 0, days, &schedule)?;
            females = traj.column(2);
            let mut buf = Vec::new();
            write_trajectory_csv(&traj, &header, &mut buf)?;
            run.emit("trajectory.csv", buf)?;
        }
        SimModel::Epi => {
            let model = EpiModel::new(&env, scan.fertility, env.epi)?;
            let mut y0 = EpiState::disease_free(PopulationState { m_s: 0.0, ..initial }, env.epi.n_h);
            let seed = sim.initial_infected.clamp(0.0, y0.s_h);
            y0.s_h -= seed;
            y0.i_h += seed;
            let traj = integrate(&model, &rk, y0.to_array(), 0, days, &schedule)?;
            females = traj.states.iter().map(|y| EpiState::from_array(*y).females()).collect();
            let mut buf = Vec::new();
            write_epi_trajectory_csv(&traj, &header, &mut buf)?;
            run.emit("epi_trajectory.csv", buf)?;
        }
    }
    let mut buf = Vec::new();
    write_epi_csv(&env, &females, &header, &mut buf)?;
    run.emit("epi.csv", buf)?;
    Ok(())
}

fn or_single(values: &[f64], single: f64) -> Vec<f64> {
    if values.is_empty() {
        vec![single]
    } else {
        values.to_vec()
    }
}

/// Rejects a nuisance scan whose residual fertility leaves no day with a
/// lower equilibrium after the burn-in.
fn check_nuisance_reachable(cfg: &ScanConfig<f64>, env: &Environment<f64>) -> Result<(), CliError> {
    if cfg.objective != Objective::Nuisance || cfg.burn_in >= env.len() {
        return Ok(());
    }
    let eps = cfg.fertility.epsilon;
    let mut n_max = f64::NEG_INFINITY;
    for d in cfg.burn_in..env.len() {
        n_max = n_max.max(env.offspring(d)?);
    }
    if eps * n_max >= 1.0 {
        return Err(CliError::Config(format!(
            "residual fertility {eps} is at least 1/N on every day after the burn-in (largest N = {n_max:.2}); \
             released males then keep the wild population at a positive level and the nuisance objective \
             cannot be reached. Use --objective epi or a smaller --eps"
        )));
    }
    Ok(())
}

pub fn cmd_scan(run: &mut Run, all_variants: bool) -> Result<(), CliError> {
    let base = run.cfg.environment;
    let variants = if all_variants {
        WeatherVariant::ALL.to_vec()
    } else {
        vec![base.capacity.variant]
    };
    let eps_list = or_single(&run.cfg.sweep.epsilon, run.cfg.scan.fertility.epsilon);
    let mc_list = or_single(&run.cfg.sweep.mc_level, base.capacity.mc_level);
    let rate_list = or_single(&run.cfg.sweep.massive_rate, run.cfg.scan.massive_rate);
    let rk = run.rk()?;

    for variant in variants {
        let mut groups = Vec::new();
        let mut summary_header = None;
        for &mc in &mc_list {
            let mut env_cfg = base;
            env_cfg.capacity.variant = variant;
            env_cfg.capacity.mc_level = mc;
            let env = run.environment(&env_cfg)?;
            for &eps in &eps_list {
                for &rate in &rate_list {
                    let mut cfg = run.cfg.scan.clone();
                    cfg.fertility.epsilon = eps;
                    cfg.massive_rate = rate;
                    cfg.validate()?;
                    check_nuisance_reachable(&cfg, &env)?;
                    let ctx = StrategyContext::prepare(&cfg, &env, rk)?;
                    let entries = scan_start_dates(&cfg, &env, &ctx)?;
                    let label = format!("eps{eps}_mc{mc}_rate{rate}");
                    let header = run
                        .header(&env_cfg, &env)
                        .with("objective", cfg.objective.short_name())
                        .with("epsilon", eps)
                        .with("massive_rate", rate)
                        .with("small_rate", cfg.small_rate)
                        .with("area", cfg.area)
                        .with("tau", cfg.tau)
                        .with("max_releases", cfg.max_releases)
                        .with("burn_in", cfg.burn_in);
                    let mut buf = Vec::new();
                    write_scan_csv(&env, &entries, &header, &mut buf)?;
                    run.emit(&format!("scan_{}_{label}.csv", variant.short_name()), buf)?;

                    let mut outcomes = Vec::new();
                    for e in entries {
                        match e.outcome {
                            Ok(o) => outcomes.push(o),
                            Err(err) => log::warn!("{label}: start day {} failed: {err}", e.t0),
                        }
                    }
                    groups.push((
                        SummaryCell {
                            label,
                            epsilon: eps,
                            mc_level: mc,
                            massive_rate: rate,
                            area: cfg.area,
                        },
                        outcomes,
                    ));
                    summary_header.get_or_insert_with(|| {
                        Header::new()
                            .with("config_hash", &run.config_hash)
                            .with("data_sha256", &run.data_sha256)
                            .with("seed", run.cfg.seed)
                            .with("variant", variant.short_name())
                            .with("objective", cfg.objective.short_name())
                    });
                }
            }
        }
        let table = summarize(&groups);
        let mut buf = Vec::new();
        write_summary_csv(&table, &summary_header.unwrap_or_default(), &mut buf)?;
        run.emit(&format!("summary_{}.csv", variant.short_name()), buf)?;
    }
    Ok(())
}

pub fn cmd_equilibria(run: &mut Run) -> Result<(), CliError> {
    let env_cfg = run.cfg.environment;
    let env = run.environment(&env_cfg)?;
    let scan = run.cfg.scan.clone();
    let window = if scan.burn_in < env.len() { scan.burn_in..env.len() } else { 0..env.len() };
    let mut header = run
        .header(&env_cfg, &env)
        .with("epsilon", scan.fertility.epsilon)
        .with("beta", scan.fertility.beta)
        .with("small_bolus", scan.small_bolus())
        .with("tau", scan.tau)
        .with("E1_min_window", format!("{}..{}", window.start, window.end));
    header = match e1_min_box(&env, window, &scan.fertility, scan.small_bolus(), scan.tau) {
        Ok(bx) => header
            .with("E1_min_A", bx.a)
            .with("E1_min_M", bx.m)
            .with("E1_min_F", bx.f)
            .with("E1_min_qualifying_days", bx.qualifying_days)
            .with("E1_min_skipped_days", bx.skipped_days),
        Err(sitsim::Error::NoLowerEquilibrium(why)) => header.with("E1_min", format!("none ({why})")),
        Err(e) => return Err(e.into()),
    };
    let mut buf = Vec::new();
    write_equilibria_csv(&env, &scan.fertility, scan.small_bolus(), scan.tau, &header, &mut buf)?;
    run.emit("equilibria.csv", buf)?;
    Ok(())
}

/// Output directory of a run, for messages.
pub fn out_dir(run: &Run) -> &Path {
    &run.cfg.out
}
