//! Seeded synthetic daily weather with a southern-hemisphere seasonal cycle.

use std::f64::consts::TAU;

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::{WeatherRecord, WeatherSeries};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Shape of the synthetic climate. Seasonality is a cosine in day of year
/// peaking at `warm_peak_doy` for temperature and at `wet_peak_doy` for rain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClimateProfile {
    pub start: NaiveDate,
    pub temp_mean: f64,
    pub temp_amplitude: f64,
    pub temp_noise_sd: f64,
    pub warm_peak_doy: u32,
    pub wet_peak_doy: u32,
    /// Probability of a rainy day at the height of the wet / dry season.
    pub rain_prob_wet: f64,
    pub rain_prob_dry: f64,
    /// Mean rainfall (mm) on a rainy day at the height of each season.
    pub rain_mean_wet: f64,
    pub rain_mean_dry: f64,
    pub humidity_base: f64,
    pub humidity_seasonal: f64,
    pub humidity_noise_sd: f64,
}

impl Default for ClimateProfile {
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(2009, 1, 1).expect("valid date"),
            temp_mean: 21.5,
            temp_amplitude: 2.0,
            temp_noise_sd: 0.5,
            warm_peak_doy: 40,
            wet_peak_doy: 50,
            rain_prob_wet: 0.7,
            rain_prob_dry: 0.2,
            rain_mean_wet: 25.0,
            rain_mean_dry: 6.0,
            humidity_base: 80.0,
            humidity_seasonal: 8.0,
            humidity_noise_sd: 4.0,
        }
    }
}

impl ClimateProfile {
    /// Wetness in [0, 1]: 1 at the wet-season peak, 0 half a year away.
    pub fn wetness(&self, date: NaiveDate) -> f64 {
        seasonal(date, self.wet_peak_doy)
    }

    pub fn mean_temp(&self, date: NaiveDate) -> f64 {
        self.temp_mean + self.temp_amplitude * (2.0 * seasonal(date, self.warm_peak_doy) - 1.0)
    }
}

fn seasonal(date: NaiveDate, peak_doy: u32) -> f64 {
    let phase = (date.ordinal() as f64 - peak_doy as f64) / 365.25;
    0.5 * (1.0 + (TAU * phase).cos())
}

/// Deterministic synthetic series of `days` records for a given seed.
pub fn synth_weather<T: Scalar>(
    seed: u64,
    days: usize,
    profile: &ClimateProfile,
) -> Result<WeatherSeries<T>> {
    if days == 0 {
        return Err(Error::invalid("synthetic series needs at least one day"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let temp_noise = Normal::new(0.0, profile.temp_noise_sd.max(0.0))
        .map_err(|e| Error::invalid(format!("temperature noise: {e}")))?;
    let hum_noise = Normal::new(0.0, profile.humidity_noise_sd.max(0.0))
        .map_err(|e| Error::invalid(format!("humidity noise: {e}")))?;
    let unit_exp = Exp::new(1.0).expect("unit rate");

    let mut records = Vec::with_capacity(days);
    let mut date = profile.start;
    for _ in 0..days {
        let wet = profile.wetness(date);
        let p_rain = profile.rain_prob_dry + (profile.rain_prob_wet - profile.rain_prob_dry) * wet;
        let mean_rain = profile.rain_mean_dry + (profile.rain_mean_wet - profile.rain_mean_dry) * wet;
        // Draw every variate each day so the stream stays aligned across days.
        let u: f64 = rng.random();
        let amount = unit_exp.sample(&mut rng) * mean_rain;
        let rain = if u < p_rain { amount } else { 0.0 };

        let temp = profile.mean_temp(date) + temp_noise.sample(&mut rng);
        let humidity = profile.humidity_base
            + profile.humidity_seasonal * (2.0 * wet - 1.0)
            + if rain > 0.0 { 8.0 } else { 0.0 }
            + hum_noise.sample(&mut rng);

        records.push(WeatherRecord {
            date,
            rain: T::lit(rain),
            temp: T::lit(temp),
            humidity: T::lit(humidity.clamp(50.0, 100.0)),
        });
        date = date.succ_opt().ok_or_else(|| Error::invalid("date overflow"))?;
    }
    WeatherSeries::new(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_series() {
        let p = ClimateProfile::default();
        let a: WeatherSeries<f64> = synth_weather(7, 400, &p).unwrap();
        let b: WeatherSeries<f64> = synth_weather(7, 400, &p).unwrap();
        assert_eq!(a, b);
        let c: WeatherSeries<f64> = synth_weather(8, 400, &p).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_amplitude_gives_constant_temperature() {
        let p = ClimateProfile {
            temp_amplitude: 0.0,
            temp_noise_sd: 0.0,
            ..ClimateProfile::default()
        };
        let s: WeatherSeries<f64> = synth_weather(1, 365, &p).unwrap();
        assert!(s.records().iter().all(|r| r.temp == p.temp_mean));
    }

    #[test]
    fn warmest_day_in_austral_summer() {
        let s: WeatherSeries<f64> = synth_weather(3, 365, &ClimateProfile::default()).unwrap();
        let hottest = s
            .records()
            .iter()
            .max_by(|a, b| a.temp.total_cmp(&b.temp))
            .unwrap();
        assert!([12, 1, 2, 3].contains(&hottest.date.month()), "{}", hottest.date);
    }

    #[test]
    fn humidity_and_rain_in_range() {
        let s: WeatherSeries<f64> = synth_weather(11, 1000, &ClimateProfile::default()).unwrap();
        assert!(s.records().iter().all(|r| (50.0..=100.0).contains(&r.humidity) && r.rain >= 0.0));
        // wet season is wetter than the dry season
        let month_rain = |m: u32| -> f64 {
            s.records().iter().filter(|r| r.date.month() == m).map(|r| r.rain).sum()
        };
        assert!(month_rain(2) > 2.0 * month_rain(8));
    }

    #[test]
    fn zero_days_rejected() {
        assert!(synth_weather::<f64>(0, 0, &ClimateProfile::default()).is_err());
    }
}
