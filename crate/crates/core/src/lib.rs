//! Weather-driven *Aedes albopictus* population model with impulsive
//! sterile-male releases, equilibrium analysis, dengue risk thresholds and
//! release-strategy scans.
//!
//! Every routine is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the common `f64` instantiation.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bio_params;
pub mod environment;
pub mod epi_risk;
pub mod equilibria;
pub mod error;
pub mod export;
pub mod population;
pub mod scalar;
pub mod spline;
pub mod strategy;
pub mod weather;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use bio_params::{basic_offspring, derive_rates, q_factor};
pub use environment::EnvironmentConfig;
pub use equilibria::{e1_min_box, release_thresholds, sit_equilibria, wild_equilibrium};
pub use population::{integrate, ImpulseSchedule, Rk4};
pub use strategy::{maintenance_preview, run_strategy, scan_start_dates, summarize, Objective, StartGrid};
pub use weather::{synth_weather, ClimateProfile, WeatherVariant};

pub type WeatherRecord = weather::WeatherRecord<f64>;
pub type WeatherSeries = weather::WeatherSeries<f64>;
pub type WaterBalance = weather::WaterBalance<f64>;
pub type CapacityConfig = weather::CapacityConfig<f64>;
pub type LabTableRow = bio_params::LabTableRow<f64>;
pub type EntoParams = bio_params::EntoParams<f64>;
pub type RateSplines = bio_params::RateSplines<f64>;
pub type EpiParams = epi_risk::EpiParams<f64>;
pub type EpiRates = epi_risk::EpiRates<f64>;
pub type PopulationState = population::PopulationState<f64>;
pub type EpiState = population::EpiState<f64>;
pub type ResidualFertility = population::ResidualFertility<f64>;
pub type EquilibriumSet = equilibria::EquilibriumSet<f64>;
pub type ReleaseThresholds = equilibria::ReleaseThresholds<f64>;
pub type NuisanceBox = equilibria::NuisanceBox<f64>;
pub type Environment = environment::Environment<f64>;
pub type ScanConfig = strategy::ScanConfig<f64>;
pub type StrategyOutcome = strategy::StrategyOutcome<f64>;
pub type StrategyContext = strategy::StrategyContext<f64>;
