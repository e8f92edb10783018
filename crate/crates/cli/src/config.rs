//! Run configuration: a JSON file with flag overrides, resolved once and
//! hashed for the manifest.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sitsim::population::DEFAULT_STEPS_PER_DAY;
use sitsim::{ClimateProfile, EnvironmentConfig, ScanConfig, StartGrid};

use crate::error::CliError;

pub const DATA_DIR_VAR: &str = "SITSIM_DATA_DIR";
const DEFAULT_WEATHER_FILE: &str = "weather.csv";

/// Where the daily coefficients come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Daily weather CSV.
    Weather { path: PathBuf },
    /// Seeded synthetic weather; the seed is the run seed.
    Synth {
        days: usize,
        #[serde(default)]
        profile: ClimateProfile,
    },
    /// Constant temperature and carrying capacity.
    Constant { temp: f64, k: f64, days: usize },
}

impl DataSource {
    pub fn default_synth() -> Self {
        DataSource::Synth {
            days: 3 * 365,
            profile: ClimateProfile::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimModel {
    #[default]
    Population,
    Epi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: SimModel,
    /// First release day; no releases when absent.
    pub t0: Option<usize>,
    /// Massive releases before switching to small ones; all massive when absent.
    pub massive_count: Option<usize>,
    /// Simulated days; the whole window when absent.
    pub days: Option<usize>,
    /// Infectious humans at the start of an epi run.
    pub initial_infected: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            model: SimModel::Population,
            t0: None,
            massive_count: None,
            days: None,
            initial_infected: 1.0,
        }
    }
}

/// Values swept by `scan`; an empty list keeps the single value of `scan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub epsilon: Vec<f64>,
    pub mc_level: Vec<f64>,
    pub massive_rate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<DataSource>,
    pub seed: u64,
    pub environment: EnvironmentConfig<f64>,
    pub scan: ScanConfig,
    pub sweep: Sweep,
    pub simulate: SimulateConfig,
    pub steps_per_day: usize,
    /// Output directory; not part of the config hash.
    #[serde(skip_serializing)]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            seed: 42,
            environment: EnvironmentConfig::default(),
            scan: ScanConfig::default(),
            sweep: Sweep::default(),
            simulate: SimulateConfig::default(),
            steps_per_day: DEFAULT_STEPS_PER_DAY,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fills in the data source: the configured one, else `weather.csv` under
    /// the data directory when present, else the default synthetic series.
    /// Relative weather paths not found in the working directory are looked
    /// up in the data directory.
    pub fn resolve_data(&mut self, data_dir: Option<&Path>) {
        match &mut self.data {
            Some(DataSource::Weather { path }) => {
                if let Some(dir) = data_dir {
                    if path.is_relative() && !path.exists() && dir.join(&*path).exists() {
                        *path = dir.join(&*path);
                    }
                }
            }
            Some(_) => {}
            None => {
                let default = data_dir.map(|d| d.join(DEFAULT_WEATHER_FILE)).filter(|p| p.exists());
                self.data = Some(match default {
                    Some(path) => DataSource::Weather { path },
                    None => DataSource::default_synth(),
                });
            }
        }
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.environment.capacity.validate()?;
        self.environment.epi.validate()?;
        self.scan.validate()?;
        if self.steps_per_day == 0 {
            return Err(CliError::Config("steps_per_day must be at least 1".into()));
        }
        for &e in &self.sweep.epsilon {
            if !(0.0..1.0).contains(&e) {
                return Err(CliError::Config(format!("epsilon {e} outside [0, 1)")));
            }
        }
        for &m in &self.sweep.mc_level {
            if !(0.0..1.0).contains(&m) {
                return Err(CliError::Config(format!("mechanical control level {m} outside [0, 1)")));
            }
        }
        if self.sweep.massive_rate.iter().any(|r| r.is_nan() || *r < 0.0) {
            return Err(CliError::Config("release rates must be non-negative".into()));
        }
        match &self.data {
            Some(DataSource::Synth { days: 0, .. }) | Some(DataSource::Constant { days: 0, .. }) => {
                Err(CliError::Config("data source needs at least one day".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Parses `weekly`, `weekly:FROM:TO` (either bound may be empty),
/// `dates:D1,D2,...`, `days:N1,N2,...` or a bare list of dates.
pub fn parse_start_grid(s: &str) -> Result<StartGrid, CliError> {
    let bad = |msg: String| CliError::Config(format!("start grid `{s}`: {msg}"));
    let date = |d: &str| NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|e| bad(format!("{d}: {e}")));
    let opt_date = |d: &str| if d.trim().is_empty() { Ok(None) } else { date(d).map(Some) };
    if s == "weekly" {
        return Ok(StartGrid::Weekly { from: None, to: None });
    }
    if let Some(rest) = s.strip_prefix("weekly:") {
        let (from, to) = rest.split_once(':').unwrap_or((rest, ""));
        return Ok(StartGrid::Weekly {
            from: opt_date(from)?,
            to: opt_date(to)?,
        });
    }
    if let Some(rest) = s.strip_prefix("days:") {
        let days = rest
            .split(',')
            .map(|d| d.trim().parse::<usize>().map_err(|e| bad(format!("{d}: {e}"))))
            .collect::<Result<_, _>>()?;
        return Ok(StartGrid::Days(days));
    }
    let list = s.strip_prefix("dates:").unwrap_or(s);
    Ok(StartGrid::Dates(list.split(',').map(date).collect::<Result<_, _>>()?))
}
