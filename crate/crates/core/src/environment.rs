//! Day-indexed model coefficients built from a weather series.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::bio_params::{basic_offspring, EntoParams, RateSplines};
use crate::epi_risk::{f_threshold, EpiParams, EpiRates};
use crate::equilibria::wild_equilibrium;
use crate::error::{Error, Result};
use crate::population::{integrate, DailyParams, ImpulseSchedule, PopulationState, Rk4, Trajectory, WildModel};
use crate::scalar::Scalar;
use crate::weather::{
    carrying_capacity, default_initial_water, density_death_rate, water_balance, CapacityConfig, WeatherSeries,
    WeatherVariant,
};

/// Coefficients of one day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DayParams<T> {
    pub temp: T,
    /// Water level, `NaN` for environments not built from weather.
    pub water: T,
    pub k: T,
    pub ento: EntoParams<T>,
    pub mu_a2: T,
    pub epi: EpiRates<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct EnvironmentConfig<T> {
    pub capacity: CapacityConfig<T>,
    /// Initial water level; half the maximum rainfall when absent.
    pub h0: Option<T>,
    pub epi: EpiParams<T>,
}

impl<T: Scalar> Default for EnvironmentConfig<T> {
    fn default() -> Self {
        Self {
            capacity: CapacityConfig::default(),
            h0: None,
            epi: EpiParams::default(),
        }
    }
}

/// Daily coefficients over a window, with the settings that produced them.
#[derive(Debug, Clone)]
pub struct Environment<T> {
    days: Vec<DayParams<T>>,
    start_date: Option<NaiveDate>,
    pub h0: T,
    pub h_max: T,
    pub epi: EpiParams<T>,
    pub variant: WeatherVariant,
}

fn mean_by<T: Scalar, X>(xs: &[X], f: impl Fn(&X) -> T) -> T {
    xs.iter().fold(T::zero(), |acc, x| acc + f(x)) / T::from_usize_lossy(xs.len())
}

impl<T: Scalar> Environment<T> {
    /// Builds per-day coefficients. Rates follow the daily temperature for
    /// the `full` and `temperature_only` variants and are replaced by their
    /// time means otherwise; the same holds for the transmission rates.
    pub fn from_weather(series: &WeatherSeries<T>, splines: &RateSplines<T>, cfg: &EnvironmentConfig<T>) -> Result<Self> {
        cfg.capacity.validate()?;
        cfg.epi.validate()?;
        let h0 = cfg.h0.unwrap_or_else(|| default_initial_water(series));
        let wb = water_balance(series, h0, cfg.capacity.evap_k)?;
        if wb.is_degenerate() {
            log::warn!("no rainfall in the window: carrying capacity falls back to K_0");
        }
        let temps = series.temps();
        let k = carrying_capacity(&wb, &cfg.capacity, &temps)?;

        let mut ento: Vec<EntoParams<T>> = temps.iter().map(|&t| splines.rates_at(t)).collect();
        let mut epi: Vec<EpiRates<T>> = temps.iter().map(|&t| cfg.epi.rates_at(t)).collect();
        if !cfg.capacity.variant.temperature_driven_rates() {
            let mean = EntoParams {
                phi: mean_by(&ento, |e| e.phi),
                gamma: mean_by(&ento, |e| e.gamma),
                mu_a1: mean_by(&ento, |e| e.mu_a1),
                mu_m: mean_by(&ento, |e| e.mu_m),
                mu_f: mean_by(&ento, |e| e.mu_f),
                mu_s: mean_by(&ento, |e| e.mu_s),
                r: mean_by(&ento, |e| e.r),
            };
            let mean_epi = EpiRates {
                beta_mh: mean_by(&epi, |e| e.beta_mh),
                beta_hm: mean_by(&epi, |e| e.beta_hm),
                nu_m: mean_by(&epi, |e| e.nu_m),
            };
            ento.fill(mean);
            epi.fill(mean_epi);
        }

        let days = (0..series.len())
            .map(|d| {
                Ok(DayParams {
                    temp: temps[d],
                    water: wb.levels[d],
                    k: k[d],
                    ento: ento[d],
                    mu_a2: density_death_rate(k[d], &ento[d])?,
                    epi: epi[d],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            days,
            start_date: Some(series.start_date()),
            h0,
            h_max: wb.h_max,
            epi: cfg.epi,
            variant: cfg.capacity.variant,
        })
    }

    /// The same coefficients for `n_days` days.
    pub fn constant(n_days: usize, ento: EntoParams<T>, k: T, epi_rates: EpiRates<T>, epi: EpiParams<T>) -> Result<Self> {
        if n_days == 0 {
            return Err(Error::invalid("environment needs at least one day"));
        }
        let day = DayParams {
            temp: T::nan(),
            water: T::nan(),
            k,
            ento,
            mu_a2: density_death_rate(k, &ento)?,
            epi: epi_rates,
        };
        Ok(Self {
            days: vec![day; n_days],
            start_date: None,
            h0: T::nan(),
            h_max: T::nan(),
            epi,
            variant: WeatherVariant::ConstantMean,
        })
    }

    /// Constant coefficients at a fixed temperature.
    pub fn constant_at_temperature(
        n_days: usize,
        splines: &RateSplines<T>,
        temp: T,
        k: T,
        epi: EpiParams<T>,
    ) -> Result<Self> {
        let mut env = Self::constant(n_days, splines.rates_at(temp), k, epi.rates_at(temp), epi)?;
        for d in &mut env.days {
            d.temp = temp;
        }
        Ok(env)
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn day(&self, day: usize) -> &DayParams<T> {
        &self.days[day]
    }

    pub fn days(&self) -> &[DayParams<T>] {
        &self.days
    }

    pub fn start_date(&self) -> Option<NaiveDate> {
        self.start_date
    }

    /// Calendar date of `day`, when the environment comes from weather.
    pub fn date(&self, day: usize) -> Option<NaiveDate> {
        self.start_date?.checked_add_days(chrono::Days::new(day as u64))
    }

    pub fn day_of(&self, date: NaiveDate) -> Option<usize> {
        let d = (date - self.start_date?).num_days();
        (d >= 0 && (d as usize) < self.len()).then_some(d as usize)
    }

    pub fn offspring(&self, day: usize) -> Result<T> {
        basic_offspring(&self.days[day].ento)
    }

    /// Female level below which the effective reproduction number is 0.5.
    pub fn f_threshold(&self, day: usize) -> T {
        let d = &self.days[day];
        f_threshold(&d.ento, &d.epi, &self.epi)
    }

    /// No-release trajectory over the whole window, started from the wild
    /// equilibrium of the first day on which the population persists.
    pub fn baseline(&self, rk: &Rk4) -> Result<Trajectory<T, 4>> {
        let mut y0 = None;
        for d in &self.days {
            let w = wild_equilibrium(&d.ento, d.mu_a2)?;
            if w.persists {
                y0 = Some(w.state);
                break;
            }
        }
        let y0 = y0.ok_or_else(|| Error::invalid("the wild population cannot persist on any day"))?;
        let model = WildModel { params: self };
        integrate(&model, rk, y0.to_array(), 0, self.len() - 1, &ImpulseSchedule::none())
    }

    /// Baseline state on each day.
    pub fn baseline_states(&self, rk: &Rk4) -> Result<Vec<PopulationState<T>>> {
        Ok(self.baseline(rk)?.states.into_iter().map(PopulationState::from_array).collect())
    }
}

impl<T: Scalar> DailyParams<T> for Environment<T> {
    fn ento(&self, day: usize) -> EntoParams<T> {
        self.days[day].ento
    }

    fn mu_a2(&self, day: usize) -> T {
        self.days[day].mu_a2
    }

    fn epi_rates(&self, day: usize) -> EpiRates<T> {
        self.days[day].epi
    }

    fn n_days(&self) -> Option<usize> {
        Some(self.days.len())
    }
}
