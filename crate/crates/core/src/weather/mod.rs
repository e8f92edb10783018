//! Daily weather ingestion, breeding-site water balance and the carrying
//! capacity / density-dependent aquatic mortality derived from it.

mod csv_io;
mod synth;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::bio_params::EntoParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use csv_io::{read_weather_csv, write_weather_csv, WEATHER_COLUMNS};
pub use synth::{synth_weather, ClimateProfile};

/// Documented default for the evaporation coefficient.
pub const DEFAULT_EVAP_K: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherRecord<T> {
    pub date: NaiveDate,
    /// mm/day
    pub rain: T,
    /// Daily mean, °C
    pub temp: T,
    /// Relative humidity, %
    pub humidity: T,
}

/// A validated, gap-free daily weather sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries<T> {
    records: Vec<WeatherRecord<T>>,
}

impl<T: Scalar> WeatherSeries<T> {
    pub fn new(records: Vec<WeatherRecord<T>>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptySeries);
        }
        for rec in &records {
            if !(rec.rain >= T::zero()) || !rec.rain.is_finite() {
                return Err(Error::invalid(format!(
                    "{}: rainfall must be finite and >= 0, got {}",
                    rec.date, rec.rain
                )));
            }
            if !(rec.humidity >= T::zero() && rec.humidity <= T::lit(100.0)) {
                return Err(Error::invalid(format!(
                    "{}: humidity must lie in [0, 100], got {}",
                    rec.date, rec.humidity
                )));
            }
            if !rec.temp.is_finite() {
                return Err(Error::invalid(format!("{}: temperature is not finite", rec.date)));
            }
        }
        for w in records.windows(2) {
            if w[0].date.succ_opt() != Some(w[1].date) {
                return Err(Error::NonContiguous {
                    prev: w[0].date,
                    next: w[1].date,
                });
            }
        }
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[WeatherRecord<T>] {
        &self.records
    }

    pub fn start_date(&self) -> NaiveDate {
        self.records[0].date
    }

    pub fn date(&self, day: usize) -> Option<NaiveDate> {
        self.records.get(day).map(|r| r.date)
    }

    /// Day index of `date`, if it falls inside the series.
    pub fn day_of(&self, date: NaiveDate) -> Option<usize> {
        let offset = (date - self.start_date()).num_days();
        usize::try_from(offset).ok().filter(|&d| d < self.len())
    }

    pub fn temps(&self) -> Vec<T> {
        self.records.iter().map(|r| r.temp).collect()
    }

    pub fn rain(&self) -> Vec<T> {
        self.records.iter().map(|r| r.rain).collect()
    }

    /// Largest daily rainfall over the whole series.
    pub fn max_rain(&self) -> T {
        self.records
            .iter()
            .map(|r| r.rain)
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Weather dependence used to build the time-varying parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeatherVariant {
    /// Temperature-driven rates, rainfall-driven capacity.
    Full,
    /// Every parameter replaced by its time mean.
    ConstantMean,
    /// Temperature-driven rates, capacity interpolated in temperature.
    TemperatureOnly,
    /// Time-mean rates, rainfall-driven capacity.
    RainfallOnly,
}

impl WeatherVariant {
    pub const ALL: [WeatherVariant; 4] = [
        WeatherVariant::Full,
        WeatherVariant::ConstantMean,
        WeatherVariant::TemperatureOnly,
        WeatherVariant::RainfallOnly,
    ];

    /// Short name used on the command line and in file names.
    pub fn short_name(self) -> &'static str {
        match self {
            WeatherVariant::Full => "full",
            WeatherVariant::ConstantMean => "mean",
            WeatherVariant::TemperatureOnly => "temp",
            WeatherVariant::RainfallOnly => "rain",
        }
    }

    /// Whether the entomological rates follow daily temperature.
    pub fn temperature_driven_rates(self) -> bool {
        matches!(self, WeatherVariant::Full | WeatherVariant::TemperatureOnly)
    }
}

impl std::str::FromStr for WeatherVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(WeatherVariant::Full),
            "mean" | "constant_mean" => Ok(WeatherVariant::ConstantMean),
            "temp" | "temperature_only" => Ok(WeatherVariant::TemperatureOnly),
            "rain" | "rainfall_only" => Ok(WeatherVariant::RainfallOnly),
            other => Err(Error::invalid(format!("unknown weather variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityConfig<T> {
    /// Natural maximal carrying capacity, individuals.
    pub k_max: T,
    /// Rainfall-independent artificial capacity, individuals.
    pub k_0: T,
    pub evap_k: T,
    /// Fraction of breeding sites removed by mechanical control, in [0, 1).
    pub mc_level: T,
    pub variant: WeatherVariant,
}

impl<T: Scalar> Default for CapacityConfig<T> {
    fn default() -> Self {
        Self {
            k_max: T::lit(20.0 * 10_000.0),
            k_0: T::lit(20.0 * 100.0),
            evap_k: T::lit(DEFAULT_EVAP_K),
            mc_level: T::zero(),
            variant: WeatherVariant::Full,
        }
    }
}

impl<T: Scalar> CapacityConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_max > T::zero()) || !(self.k_0 > T::zero()) {
            return Err(Error::invalid("K_max and K_0 must be positive"));
        }
        if !(self.mc_level >= T::zero() && self.mc_level < T::one()) {
            return Err(Error::invalid("mechanical control level must lie in [0, 1)"));
        }
        if !(self.evap_k >= T::zero()) {
            return Err(Error::invalid("evaporation coefficient must be >= 0"));
        }
        Ok(())
    }

    fn retained(&self) -> T {
        T::one() - self.mc_level
    }
}

/// Daily evaporation `k (25 + temp^2) (100 - humidity)`.
pub fn evaporation<T: Scalar>(temp: T, humidity: T, evap_k: T) -> Result<T> {
    if !(humidity >= T::zero() && humidity <= T::lit(100.0)) {
        return Err(Error::invalid(format!(
            "humidity must lie in [0, 100], got {humidity}"
        )));
    }
    Ok(evap_k * (T::lit(25.0) + temp * temp) * (T::lit(100.0) - humidity))
}

/// Water available in breeding sites.
///
/// `levels[t]` is the water on day `t`; the vector holds one entry more than
/// the series, the last being the level after the final day.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterBalance<T> {
    pub levels: Vec<T>,
    /// Maximum daily rainfall over the window.
    pub h_max: T,
}

impl<T: Scalar> WaterBalance<T> {
    /// Levels for the days of the series, excluding the trailing entry.
    pub fn daily(&self) -> &[T] {
        &self.levels[..self.levels.len() - 1]
    }

    /// True when the window has no rainfall at all.
    pub fn is_degenerate(&self) -> bool {
        self.h_max <= T::zero()
    }
}

/// Initial water level used when none is configured: half the maximum.
pub fn default_initial_water<T: Scalar>(series: &WeatherSeries<T>) -> T {
    series.max_rain() * T::lit(0.5)
}

/// Runs `H(t+1) = clamp(H(t) + Rain(t) - Evap(t), 0, H_max)` over the series.
pub fn water_balance<T: Scalar>(
    series: &WeatherSeries<T>,
    h0: T,
    evap_k: T,
) -> Result<WaterBalance<T>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let h_max = series.max_rain();
    if !(h0 >= T::zero() && h0 <= h_max) {
        return Err(Error::invalid(format!(
            "initial water {h0} outside [0, H_max = {h_max}]"
        )));
    }
    let mut levels = Vec::with_capacity(series.len() + 1);
    let mut h = h0;
    levels.push(h);
    for rec in series.records() {
        let delta = rec.rain - evaporation(rec.temp, rec.humidity, evap_k)?;
        h = (h + delta).max(T::zero()).min(h_max);
        levels.push(h);
    }
    Ok(WaterBalance { levels, h_max })
}

/// Capacity multiplier as a function of temperature: 0.1 at 15 °C, 1 at
/// 27 °C, 0.75 at 35 °C, linear in between and constant outside.
pub fn temperature_capacity_fraction<T: Scalar>(temp: T) -> T {
    let pts = [(15.0, 0.1), (27.0, 1.0), (35.0, 0.75)].map(|(a, b)| (T::lit(a), T::lit(b)));
    if temp <= pts[0].0 {
        return pts[0].1;
    }
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if temp <= x1 {
            return y0 + (y1 - y0) * (temp - x0) / (x1 - x0);
        }
    }
    pts[2].1
}

/// Carrying capacity per day under the configured variant.
///
/// Mechanical control multiplies the whole capacity, `K_0` included, by
/// `1 - mc_level`. A window without rainfall falls back to `(1 - mc) K_0`
/// for the rainfall-driven variants.
pub fn carrying_capacity<T: Scalar>(
    wb: &WaterBalance<T>,
    cfg: &CapacityConfig<T>,
    temps: &[T],
) -> Result<Vec<T>> {
    cfg.validate()?;
    let h = wb.daily();
    if h.len() != temps.len() {
        return Err(Error::invalid(format!(
            "water balance covers {} days but {} temperatures were given",
            h.len(),
            temps.len()
        )));
    }
    if h.is_empty() {
        return Err(Error::EmptySeries);
    }
    let keep = cfg.retained();
    let rain_driven = |h: T| {
        if wb.is_degenerate() {
            keep * cfg.k_0
        } else {
            keep * (cfg.k_max * h / wb.h_max + cfg.k_0)
        }
    };
    let k = match cfg.variant {
        WeatherVariant::Full | WeatherVariant::RainfallOnly => h.iter().map(|&h| rain_driven(h)).collect(),
        WeatherVariant::TemperatureOnly => temps
            .iter()
            .map(|&t| keep * (cfg.k_max * temperature_capacity_fraction(t) + cfg.k_0))
            .collect(),
        WeatherVariant::ConstantMean => {
            let sum = h.iter().fold(T::zero(), |acc, &h| acc + rain_driven(h));
            vec![sum / T::from_usize_lossy(h.len()); h.len()]
        }
    };
    Ok(k)
}

/// Density-dependent aquatic mortality `r gamma phi / (mu_f K)`, chosen so
/// the wild aquatic equilibrium equals `(1 - 1/N) K`.
pub fn density_death_rate<T: Scalar>(k: T, ep: &EntoParams<T>) -> Result<T> {
    if !(k > T::zero()) {
        return Err(Error::invalid(format!("carrying capacity must be positive, got {k}")));
    }
    if !(ep.mu_f > T::zero()) {
        return Err(Error::invalid("female mortality must be positive"));
    }
    Ok(ep.r * ep.gamma * ep.phi / (ep.mu_f * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bio_params::RateSplines;

    fn day(i: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Duration::days(i)
    }

    fn series(rain: &[f64], temp: f64, hum: f64) -> WeatherSeries<f64> {
        WeatherSeries::new(
            rain.iter()
                .enumerate()
                .map(|(i, &r)| WeatherRecord {
                    date: day(i as i64),
                    rain: r,
                    temp,
                    humidity: hum,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn evaporation_values() {
        assert_eq!(evaporation(31.0, 100.0, 1.0).unwrap(), 0.0);
        assert_eq!(evaporation(0.0, 0.0, 1.0).unwrap(), 2500.0);
        assert!((evaporation(25.0f64, 70.0, 1e-3).unwrap() - 19.5).abs() < 1e-12);
        assert!(evaporation(25.0, 101.0, 1e-3).is_err());
        assert!(evaporation(25.0, -1.0, 1e-3).is_err());
    }

    #[test]
    fn dry_series_stays_empty() {
        let s = series(&[0.0; 5], 25.0, 60.0);
        let wb = water_balance(&s, 0.0, 1e-3).unwrap();
        assert!(wb.levels.iter().all(|&h| h == 0.0));
        assert!(wb.is_degenerate());
    }

    #[test]
    fn one_day_hand_step() {
        // temp 0, humidity 99.92 -> Evap = 25 * 0.08 * k; pick k so Evap = 2
        let s = series(&[10.0], 0.0, 96.0);
        let k = 2.0 / (25.0 * 4.0);
        let wb = water_balance(&s, 5.0, k).unwrap();
        assert_eq!(wb.h_max, 10.0);
        assert!((wb.levels[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn two_day_hand_step_without_evaporation() {
        let s = series(&[10.0, 0.0], 25.0, 100.0);
        let wb = water_balance(&s, 0.0, 1e-3).unwrap();
        assert_eq!(wb.levels, vec![0.0, 10.0, 10.0]);
        assert_eq!(wb.daily(), &[0.0, 10.0]);
    }

    #[test]
    fn initial_water_out_of_range() {
        let s = series(&[10.0, 0.0], 25.0, 100.0);
        assert!(water_balance(&s, 11.0, 1e-3).is_err());
        assert!(water_balance(&s, -1.0, 1e-3).is_err());
    }

    #[test]
    fn rejects_gaps_and_bad_values() {
        let mut recs: Vec<_> = series(&[1.0, 2.0, 3.0], 25.0, 80.0).records().to_vec();
        recs[2].date = day(5);
        assert!(matches!(WeatherSeries::new(recs.clone()), Err(Error::NonContiguous { .. })));
        recs[2].date = day(2);
        recs[1].rain = -1.0;
        assert!(WeatherSeries::new(recs.clone()).is_err());
        recs[1].rain = 1.0;
        recs[0].humidity = 120.0;
        assert!(WeatherSeries::new(recs).is_err());
        assert!(matches!(WeatherSeries::<f64>::new(vec![]), Err(Error::EmptySeries)));
    }

    #[test]
    fn capacity_extremes() {
        let wb = WaterBalance {
            levels: vec![10.0, 0.0, 0.0],
            h_max: 10.0,
        };
        let cfg = CapacityConfig::<f64>::default();
        let k = carrying_capacity(&wb, &cfg, &[25.0, 25.0]).unwrap();
        assert_eq!(k[0], cfg.k_max + cfg.k_0);
        assert_eq!(k[1], cfg.k_0);
    }

    #[test]
    fn capacity_degenerate_fallback() {
        let s = series(&[0.0; 3], 25.0, 60.0);
        let wb = water_balance(&s, 0.0, 1e-3).unwrap();
        let cfg = CapacityConfig {
            mc_level: 0.2,
            ..CapacityConfig::<f64>::default()
        };
        let k = carrying_capacity(&wb, &cfg, &s.temps()).unwrap();
        assert!(k.iter().all(|&k| (k - 0.8 * cfg.k_0).abs() < 1e-9));
    }

    #[test]
    fn temperature_capacity_knots() {
        assert!((temperature_capacity_fraction(15.0f64) - 0.1).abs() < 1e-15);
        assert!((temperature_capacity_fraction(27.0f64) - 1.0).abs() < 1e-15);
        assert!((temperature_capacity_fraction(35.0f64) - 0.75).abs() < 1e-15);
        assert!((temperature_capacity_fraction(21.0f64) - 0.55).abs() < 1e-15);
        assert!((temperature_capacity_fraction(31.0f64) - 0.875).abs() < 1e-15);
        assert_eq!(temperature_capacity_fraction(5.0), 0.1);
        assert_eq!(temperature_capacity_fraction(40.0), 0.75);
    }

    #[test]
    fn capacity_variants() {
        let s = series(&[10.0, 0.0, 5.0, 0.0], 27.0, 100.0);
        let wb = water_balance(&s, 5.0, 1e-3).unwrap();
        let temps = s.temps();
        let mut cfg = CapacityConfig::<f64>::default();
        let full = carrying_capacity(&wb, &cfg, &temps).unwrap();
        cfg.variant = WeatherVariant::RainfallOnly;
        assert_eq!(carrying_capacity(&wb, &cfg, &temps).unwrap(), full);
        cfg.variant = WeatherVariant::ConstantMean;
        let mean = carrying_capacity(&wb, &cfg, &temps).unwrap();
        let expected = full.iter().sum::<f64>() / 4.0;
        assert!(mean.iter().all(|&k| (k - expected).abs() < 1e-9));
        cfg.variant = WeatherVariant::TemperatureOnly;
        let t = carrying_capacity(&wb, &cfg, &temps).unwrap();
        assert!(t.iter().all(|&k| k == cfg.k_max + cfg.k_0));
    }

    #[test]
    fn capacity_length_mismatch() {
        let wb = WaterBalance {
            levels: vec![1.0, 1.0],
            h_max: 1.0,
        };
        assert!(carrying_capacity(&wb, &CapacityConfig::default(), &[20.0, 21.0]).is_err());
    }

    #[test]
    fn density_death_rate_25c() {
        let ep = RateSplines::<f64>::published().rates_at(25.0);
        let mu = density_death_rate(202_000.0, &ep).unwrap();
        let expected = 0.5 * 0.0962 * 10.3637 / (0.0453 * 202_000.0);
        assert!((mu - expected).abs() < 1e-18);
        let half = density_death_rate(404_000.0, &ep).unwrap();
        assert!((mu / half - 2.0).abs() < 1e-12);
        assert!(density_death_rate(0.0, &ep).is_err());
    }

    #[test]
    fn density_death_rate_vanishes_without_fecundity() {
        let ep = RateSplines::<f64>::published().rates_at(15.0);
        assert_eq!(density_death_rate(1000.0, &ep).unwrap(), 0.0);
    }

    #[test]
    fn mechanical_control_scales_death_rate() {
        let s = series(&[10.0, 3.0, 0.0, 7.0], 26.0, 80.0);
        let wb = water_balance(&s, 5.0, 1e-3).unwrap();
        let ep = RateSplines::<f64>::published().rates_at(26.0);
        let base = CapacityConfig::<f64>::default();
        let mc = CapacityConfig { mc_level: 0.4, ..base };
        let k0 = carrying_capacity(&wb, &base, &s.temps()).unwrap();
        let k1 = carrying_capacity(&wb, &mc, &s.temps()).unwrap();
        for (a, b) in k0.iter().zip(&k1) {
            let ratio = density_death_rate(*b, &ep).unwrap() / density_death_rate(*a, &ep).unwrap();
            assert!((ratio - 1.0 / 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn variant_parsing() {
        for v in WeatherVariant::ALL {
            assert_eq!(v.short_name().parse::<WeatherVariant>().unwrap(), v);
        }
        assert!("bogus".parse::<WeatherVariant>().is_err());
    }
}
