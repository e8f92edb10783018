//! Massive-small release strategy: weekly massive releases from a start date
//! until the wild population meets the chosen objective, then small
//! maintenance releases.

use chrono::{Datelike, NaiveDate, Weekday};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environment::Environment;
use crate::equilibria::{e1_min_box, NuisanceBox};
use crate::error::{Error, Result};
use crate::population::{integrate, ImpulseSchedule, PopulationState, ResidualFertility, Rk4, SitModel, Trajectory};
use crate::scalar::Scalar;

/// What the massive phase has to achieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Wild `(A, M, F)` strictly inside the box below `E1_min`.
    Nuisance,
    /// Wild females below the level giving an effective reproduction number
    /// of 0.5.
    EpiRisk,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nuisance" => Ok(Objective::Nuisance),
            "epi" | "epi_risk" => Ok(Objective::EpiRisk),
            other => Err(Error::invalid(format!("unknown objective `{other}`"))),
        }
    }
}

impl Objective {
    pub fn short_name(self) -> &'static str {
        match self {
            Objective::Nuisance => "nuisance",
            Objective::EpiRisk => "epi",
        }
    }
}

/// Candidate start days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartGrid {
    /// Every Monday after the burn-in (every 7th day when the environment
    /// has no calendar), optionally bounded.
    Weekly {
        #[serde(default)]
        from: Option<NaiveDate>,
        #[serde(default)]
        to: Option<NaiveDate>,
    },
    Dates(Vec<NaiveDate>),
    Days(Vec<usize>),
}

impl Default for StartGrid {
    fn default() -> Self {
        StartGrid::Weekly { from: None, to: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig<T> {
    pub objective: Objective,
    /// Individuals per hectare per massive release.
    pub massive_rate: T,
    /// Individuals per hectare per small release.
    pub small_rate: T,
    /// Treated area, hectares.
    pub area: T,
    /// Days between releases.
    pub tau: usize,
    pub fertility: ResidualFertility<T>,
    pub max_releases: usize,
    /// Days discarded before the first admissible start.
    pub burn_in: usize,
    pub start_grid: StartGrid,
}

impl<T: Scalar> Default for ScanConfig<T> {
    fn default() -> Self {
        Self {
            objective: Objective::Nuisance,
            massive_rate: T::lit(6000.0),
            small_rate: T::lit(100.0),
            area: T::lit(20.0),
            tau: 7,
            fertility: ResidualFertility::default(),
            max_releases: 400,
            burn_in: 365,
            start_grid: StartGrid::default(),
        }
    }
}

impl<T: Scalar> ScanConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.massive_rate >= T::zero() && self.small_rate >= T::zero()) {
            return Err(Error::invalid("release rates must be non-negative"));
        }
        if !(self.area > T::zero()) {
            return Err(Error::invalid("treated area must be positive"));
        }
        if self.tau == 0 {
            return Err(Error::invalid("release period must be at least one day"));
        }
        self.fertility.validate()
    }

    pub fn massive_bolus(&self) -> T {
        self.massive_rate * self.area
    }

    pub fn small_bolus(&self) -> T {
        self.small_rate * self.area
    }

    /// Start days on the grid, all within the window after the burn-in.
    pub fn start_days(&self, env: &Environment<T>) -> Result<Vec<usize>> {
        let n = env.len();
        if self.burn_in >= n {
            return Err(Error::invalid(format!(
                "burn-in of {} days leaves no start date in a {n}-day window",
                self.burn_in
            )));
        }
        let admissible = |d: usize| d >= self.burn_in && d < n;
        let days: Vec<usize> = match &self.start_grid {
            StartGrid::Weekly { from, to } => {
                let lo = match from {
                    Some(d) => self.day_in(env, *d)?.max(self.burn_in),
                    None => self.burn_in,
                };
                let hi = match to {
                    Some(d) => self.day_in(env, *d)?,
                    None => n - 1,
                };
                (lo..=hi)
                    .filter(|&d| match env.date(d) {
                        Some(date) => date.weekday() == Weekday::Mon,
                        None => (d - lo) % 7 == 0,
                    })
                    .collect()
            }
            StartGrid::Dates(dates) => dates.iter().map(|d| self.day_in(env, *d)).collect::<Result<_>>()?,
            StartGrid::Days(days) => days.clone(),
        };
        if let Some(bad) = days.iter().find(|&&d| !admissible(d)) {
            return Err(Error::invalid(format!(
                "start day {bad} is outside the admissible range {}..{n}",
                self.burn_in
            )));
        }
        if days.is_empty() {
            return Err(Error::invalid("start grid is empty"));
        }
        Ok(days)
    }

    fn day_in(&self, env: &Environment<T>, date: NaiveDate) -> Result<usize> {
        env.day_of(date)
            .ok_or_else(|| Error::invalid(format!("date {date} is outside the weather window")))
    }
}

/// Data shared by every run of a scan.
#[derive(Debug, Clone)]
pub struct StrategyContext<T> {
    /// No-release state on each day.
    pub baseline: Vec<PopulationState<T>>,
    /// Present for the nuisance objective.
    pub nuisance_box: Option<NuisanceBox<T>>,
    pub rk: Rk4,
}

impl<T: Scalar> StrategyContext<T> {
    /// Runs the baseline and, for the nuisance objective, computes `E1_min`
    /// over the window after the burn-in.
    pub fn prepare(cfg: &ScanConfig<T>, env: &Environment<T>, rk: Rk4) -> Result<Self> {
        cfg.validate()?;
        let baseline = env.baseline_states(&rk)?;
        let nuisance_box = match cfg.objective {
            Objective::Nuisance => {
                let from = cfg.burn_in.min(env.len() - 1);
                Some(e1_min_box(env, from..env.len(), &cfg.fertility, cfg.small_bolus(), cfg.tau)?)
            }
            Objective::EpiRisk => None,
        };
        Ok(Self {
            baseline,
            nuisance_box,
            rk,
        })
    }

    /// Whether the objective holds for `state` on `day`.
    pub fn objective_met(&self, cfg: &ScanConfig<T>, env: &Environment<T>, day: usize, state: &PopulationState<T>) -> bool {
        match cfg.objective {
            Objective::Nuisance => self
                .nuisance_box
                .as_ref()
                .is_some_and(|b| b.contains(state.a, state.m, state.f)),
            Objective::EpiRisk => state.f < env.f_threshold(day),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyOutcome<T> {
    pub t0: usize,
    pub t0_date: Option<NaiveDate>,
    /// Massive releases performed before the objective was met.
    pub n_massive: usize,
    pub stop_day: Option<usize>,
    pub stop_date: Option<NaiveDate>,
    pub total_sterile_males: T,
    pub objective_met: bool,
    /// State at the start of the stop day.
    pub stop_state: Option<PopulationState<T>>,
}

impl<T: Scalar> StrategyOutcome<T> {
    /// Release count, `None` (read as infinite) when the objective was not
    /// met.
    pub fn effective_count(&self) -> Option<usize> {
        self.objective_met.then_some(self.n_massive)
    }
}

/// Releases weekly massive boluses from `t0`, checking the objective at
/// every day boundary before that day's release. Stops at the first day the
/// objective holds, after `max_releases` releases, or at the window end.
pub fn run_strategy<T: Scalar>(
    t0: usize,
    cfg: &ScanConfig<T>,
    env: &Environment<T>,
    ctx: &StrategyContext<T>,
) -> Result<StrategyOutcome<T>> {
    if t0 >= env.len() || t0 >= ctx.baseline.len() {
        return Err(Error::invalid(format!("start day {t0} outside the window")));
    }
    let model = SitModel::new(env, cfg.fertility);
    let bolus = cfg.massive_bolus();
    let mut y = ctx.baseline[t0].to_array();
    y[3] = T::zero();
    let mut n = 0usize;
    let finish = |n: usize, stop: Option<(usize, [T; 4])>| StrategyOutcome {
        t0,
        t0_date: env.date(t0),
        n_massive: n,
        stop_day: stop.map(|s| s.0),
        stop_date: stop.and_then(|s| env.date(s.0)),
        total_sterile_males: T::from_usize_lossy(n) * bolus,
        objective_met: stop.is_some(),
        stop_state: stop.map(|s| PopulationState::from_array(s.1)),
    };
    for day in t0..env.len() {
        if ctx.objective_met(cfg, env, day, &PopulationState::from_array(y)) {
            return Ok(finish(n, Some((day, y))));
        }
        if (day - t0).is_multiple_of(cfg.tau) {
            if n == cfg.max_releases {
                log::debug!("t0 = {t0}: release cap of {} reached", cfg.max_releases);
                return Ok(finish(n, None));
            }
            y[3] += bolus;
            n += 1;
        }
        if day + 1 < env.len() {
            ctx.rk.advance_day(&model, day, &mut y)?;
        }
    }
    log::debug!("t0 = {t0}: window ended before the objective was met");
    Ok(finish(n, None))
}

/// One scan entry; a failed run does not abort the scan.
#[derive(Debug)]
pub struct ScanEntry<T> {
    pub t0: usize,
    pub outcome: Result<StrategyOutcome<T>>,
}

/// Runs the strategy from every start day in parallel. Entries are sorted by
/// start day.
pub fn scan_start_dates<T: Scalar>(
    cfg: &ScanConfig<T>,
    env: &Environment<T>,
    ctx: &StrategyContext<T>,
) -> Result<Vec<ScanEntry<T>>> {
    let days = cfg.start_days(env)?;
    let mut entries: Vec<ScanEntry<T>> = days
        .par_iter()
        .map(|&t0| ScanEntry {
            t0,
            outcome: run_strategy(t0, cfg, env, ctx),
        })
        .collect();
    entries.sort_by_key(|e| e.t0);
    Ok(entries)
}

/// One row of a summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow<T> {
    pub label: String,
    pub epsilon: T,
    pub mc_level: T,
    pub massive_rate: T,
    pub area: T,
    pub starts: usize,
    pub met: usize,
    /// Mean release count over the start dates that met the objective.
    pub mean_releases: f64,
    /// Mean release count rounded to the nearest integer.
    pub releases: usize,
    /// `releases * massive_rate * area`.
    pub total_males: T,
}

/// Cell of a summary table: the settings shared by a group of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell<T> {
    pub label: String,
    pub epsilon: T,
    pub mc_level: T,
    pub massive_rate: T,
    pub area: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable<T> {
    pub rows: Vec<SummaryRow<T>>,
    /// Cells omitted because no start date met the objective.
    pub notes: Vec<String>,
}

/// Averages each group over the start dates that met the objective.
pub fn summarize<T: Scalar>(groups: &[(SummaryCell<T>, Vec<StrategyOutcome<T>>)]) -> SummaryTable<T> {
    let mut table = SummaryTable::default();
    for (cell, outcomes) in groups {
        let met: Vec<&StrategyOutcome<T>> = outcomes.iter().filter(|o| o.objective_met).collect();
        if met.is_empty() {
            table.notes.push(format!(
                "{}: none of {} start dates met the objective",
                cell.label,
                outcomes.len()
            ));
            continue;
        }
        let mean = met.iter().map(|o| o.n_massive as f64).sum::<f64>() / met.len() as f64;
        let releases = mean.round() as usize;
        table.rows.push(SummaryRow {
            label: cell.label.clone(),
            epsilon: cell.epsilon,
            mc_level: cell.mc_level,
            massive_rate: cell.massive_rate,
            area: cell.area,
            starts: outcomes.len(),
            met: met.len(),
            mean_releases: mean,
            releases,
            total_males: T::from_usize_lossy(releases) * cell.massive_rate * cell.area,
        });
    }
    table
}

/// Continuation after the massive phase.
#[derive(Debug, Clone)]
pub struct MaintenancePreview<T> {
    pub trajectory: Trajectory<T, 4>,
    /// First day on which the objective no longer holds.
    pub first_exit: Option<usize>,
}

impl<T: Scalar> MaintenancePreview<T> {
    pub fn stays_below(&self) -> bool {
        self.first_exit.is_none()
    }
}

/// Continues from the stop state for `horizon` days: small releases on the
/// weekly schedule for the nuisance objective, no releases for the
/// epidemiological one. The horizon is clipped to the window.
pub fn maintenance_preview<T: Scalar>(
    outcome: &StrategyOutcome<T>,
    cfg: &ScanConfig<T>,
    env: &Environment<T>,
    ctx: &StrategyContext<T>,
    horizon: usize,
) -> Result<MaintenancePreview<T>> {
    let (stop_day, stop_state) = match (outcome.stop_day, outcome.stop_state) {
        (Some(d), Some(s)) if outcome.objective_met => (d, s),
        _ => return Err(Error::invalid("maintenance preview needs a run that met its objective")),
    };
    let available = env.len().saturating_sub(stop_day + 1);
    if horizon > available {
        log::info!("maintenance horizon clipped from {horizon} to {available} days");
    }
    let horizon = horizon.min(available);
    if horizon == 0 {
        return Ok(MaintenancePreview {
            trajectory: Trajectory {
                days: Vec::new(),
                states: Vec::new(),
                releases: Vec::new(),
            },
            first_exit: None,
        });
    }
    let small = match cfg.objective {
        Objective::Nuisance => cfg.small_bolus(),
        Objective::EpiRisk => T::zero(),
    };
    let schedule = ImpulseSchedule::new(outcome.t0, cfg.tau, Some(outcome.n_massive), cfg.massive_bolus(), small)?;
    let model = SitModel::new(env, cfg.fertility);
    let trajectory = integrate(&model, &ctx.rk, stop_state.to_array(), stop_day, horizon, &schedule)?;
    let first_exit = trajectory
        .days
        .iter()
        .zip(&trajectory.states)
        .find(|(&d, s)| !ctx.objective_met(cfg, env, d.min(env.len() - 1), &PopulationState::from_array(**s)))
        .map(|(&d, _)| d);
    Ok(MaintenancePreview { trajectory, first_exit })
}
