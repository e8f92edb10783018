//! Property tests over randomized inputs.

use chrono::NaiveDate;
use proptest::prelude::*;
use sitsim::bio_params::{basic_offspring, published_rates, q_factor, RateSplines, KNOT_TEMPERATURES};
use sitsim::environment::{Environment, EnvironmentConfig};
use sitsim::epi_risk::{beta_hm, beta_mh, r_eff, EpiParams};
use sitsim::equilibria::{discriminant, equilibrium_quadratic, release_thresholds, sit_equilibria, threshold_discriminant};
use sitsim::population::{integrate, ImpulseSchedule, ResidualFertility, Rk4, SitModel};
use sitsim::strategy::{run_strategy, Objective, ScanConfig, StrategyContext};
use sitsim::weather::{
    carrying_capacity, density_death_rate, water_balance, CapacityConfig, WeatherRecord, WeatherSeries, WeatherVariant,
};
use sitsim::{wild_equilibrium, StartGrid};

fn series_from(days: &[(f64, f64, f64)]) -> WeatherSeries<f64> {
    let start = NaiveDate::from_ymd_opt(2015, 3, 1).unwrap();
    let records = days
        .iter()
        .enumerate()
        .map(|(i, &(rain, temp, humidity))| WeatherRecord {
            date: start + chrono::Days::new(i as u64),
            rain,
            temp,
            humidity,
        })
        .collect();
    WeatherSeries::new(records).unwrap()
}

fn weather_days() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec(
        (
            prop_oneof![Just(0.0), 0.0..80.0f64],
            10.0..36.0f64,
            30.0..100.0f64,
        ),
        2..120,
    )
}

fn splines() -> RateSplines<f64> {
    RateSplines::published()
}

fn at(temp: f64, k: f64) -> (sitsim::bio_params::EntoParams<f64>, f64) {
    let ep = splines().rates_at(temp);
    let mu = density_death_rate(k, &ep).unwrap();
    (ep, mu)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn water_level_bounded_and_repeatable(days in weather_days(), frac in 0.0..1.0f64, k in 0.0..5e-3f64) {
        let s = series_from(&days);
        let h_max = s.max_rain();
        let wb = water_balance(&s, frac * h_max, k).unwrap();
        prop_assert!(wb.levels.iter().all(|&h| (0.0..=h_max).contains(&h)));
        let again = water_balance(&s, frac * h_max, k).unwrap();
        prop_assert!(wb.levels.iter().zip(&again.levels).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn capacity_within_bounds(days in weather_days(), mc in 0.0..0.9f64) {
        let s = series_from(&days);
        let wb = water_balance(&s, 0.5 * s.max_rain(), 1e-3).unwrap();
        let cfg = CapacityConfig { mc_level: mc, ..CapacityConfig::default() };
        let k = carrying_capacity(&wb, &cfg, &s.temps()).unwrap();
        let lo = (1.0 - mc) * cfg.k_0;
        let hi = (1.0 - mc) * (cfg.k_max + cfg.k_0);
        for &x in &k {
            prop_assert!(x >= lo * (1.0 - 1e-12) && x <= hi * (1.0 + 1e-12));
        }
        if wb.is_degenerate() {
            prop_assert!(k.iter().all(|&x| x == lo));
        }
    }

    #[test]
    fn mechanical_control_scales_death_rate(days in weather_days(), mc in 0.01..0.9f64, v in 0usize..4) {
        let s = series_from(&days);
        let mut cfg = EnvironmentConfig::default();
        cfg.capacity.variant = WeatherVariant::ALL[v];
        let base = Environment::from_weather(&s, &splines(), &cfg).unwrap();
        cfg.capacity.mc_level = mc;
        let reduced = Environment::from_weather(&s, &splines(), &cfg).unwrap();
        for (a, b) in base.days().iter().zip(reduced.days()) {
            if a.mu_a2 > 0.0 {
                prop_assert!((b.mu_a2 / a.mu_a2 * (1.0 - mc) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rates_clamped_outside_table(t in 35.0..60.0f64, u in -20.0..15.0f64) {
        let sp = splines();
        prop_assert_eq!(sp.rates_at(t), sp.rates_at(35.0));
        prop_assert_eq!(sp.rates_at(u), sp.rates_at(15.0));
    }

    #[test]
    fn jumps_only_in_sterile_males(bolus in 1.0..1e6f64, t0 in 0usize..10, tau in 1usize..10) {
        let env = Environment::constant_at_temperature(60, &splines(), 25.0, 202_000.0, EpiParams::default()).unwrap();
        let model = SitModel::new(&env, ResidualFertility::default());
        let e = wild_equilibrium(&env.day(0).ento, env.day(0).mu_a2).unwrap().state;
        let schedule = ImpulseSchedule::periodic(t0, tau, bolus).unwrap();
        let traj = integrate(&model, &Rk4::default(), e.to_array(), 0, 40, &schedule).unwrap();
        prop_assert_eq!(traj.releases.len(), (40 - t0).div_ceil(tau));
        for r in &traj.releases {
            prop_assert_eq!(r.after, r.before + bolus);
        }
    }

    #[test]
    fn more_sterile_males_fewer_females(b1 in 0.0..5e5f64, extra in 0.0..5e5f64, tau in 1usize..15) {
        let env = Environment::constant_at_temperature(121, &splines(), 22.0, 100_000.0, EpiParams::default()).unwrap();
        let model = SitModel::new(&env, ResidualFertility::default());
        let e = wild_equilibrium(&env.day(0).ento, env.day(0).mu_a2).unwrap().state;
        let run = |b: f64| {
            integrate(&model, &Rk4::default(), e.to_array(), 0, 120, &ImpulseSchedule::periodic(0, tau, b).unwrap())
                .unwrap()
        };
        let low = run(b1);
        let high = run(b1 + extra);
        for (x, y) in low.states.iter().zip(&high.states) {
            prop_assert!(y[2] <= x[2] + 1e-9 * e.f.max(1.0));
        }
    }

    #[test]
    fn roots_solve_quadratic_and_are_ordered(t in 18.0..32.0f64, k in 2e4..2e6f64, eps_frac in 0.0..0.95f64, frac in 0.01..0.99f64) {
        let (ep, mu) = at(t, k);
        let n = basic_offspring(&ep).unwrap();
        prop_assume!(n > 1.0);
        let rf = ResidualFertility::new(eps_frac / n, 1.0).unwrap();
        let th = release_thresholds(&ep, mu, &rf).unwrap().unwrap();
        let m_t = frac * th.m_t1();
        let [a, b, c] = equilibrium_quadratic(&ep, mu, &rf, m_t).unwrap();
        let set = sit_equilibria(&ep, mu, &rf, m_t).unwrap();
        let (e1, e2) = (set.e1.unwrap(), set.e2.unwrap());
        let scale = a.abs() * e2.a * e2.a + b.abs() * e2.a + c.abs();
        for root in [e1.a, e2.a] {
            prop_assert!((a * root * root + b * root + c).abs() < 1e-8 * scale);
        }
        // Vieta: both roots positive.
        prop_assert!(-b / a > 0.0 && c / a > 0.0);
        prop_assert!(e1.a <= e2.a && e1.m <= e2.m && e1.f <= e2.f);
    }

    #[test]
    fn discriminant_changes_sign_at_threshold(t in 18.0..32.0f64, k in 2e4..2e6f64, eps_frac in 0.0..0.95f64) {
        let (ep, mu) = at(t, k);
        let n = basic_offspring(&ep).unwrap();
        prop_assume!(n > 1.0);
        let rf = ResidualFertility::new(eps_frac / n, 1.0).unwrap();
        let m1 = release_thresholds(&ep, mu, &rf).unwrap().unwrap().m_t1();
        prop_assert!(discriminant(&ep, mu, &rf, m1 * 1.001).unwrap() < 0.0);
        prop_assert!(discriminant(&ep, mu, &rf, m1 * 0.999).unwrap() > 0.0);
        let q = q_factor(&ep, mu).unwrap();
        prop_assert!(threshold_discriminant(q, n, rf.epsilon) > 0.0);
    }

    #[test]
    fn threshold_inverts_reproduction_number(t in 16.0..34.0f64) {
        let ep = splines().rates_at(t);
        let epi = EpiParams::default();
        let rates = epi.rates_at(t);
        let f = sitsim::epi_risk::f_threshold(&ep, &rates, &epi);
        prop_assume!(f.is_finite());
        prop_assert!((r_eff(f, &ep, &rates, &epi) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn human_infection_probability_increasing(t in 0.1..45.0f64, dt in 0.01..5.0f64) {
        let epi = EpiParams::default();
        prop_assert!(beta_hm(t + dt, &epi) > beta_hm(t, &epi));
    }
}

#[test]
fn spline_reproduces_knots() {
    let sp = splines();
    for (&t, k) in KNOT_TEMPERATURES.iter().zip(published_rates::<f64>()) {
        let e = sp.rates_at(t);
        for (x, y) in [(e.phi, k.phi), (e.mu_a1, k.mu_a1), (e.gamma, k.gamma), (e.mu_m, k.mu_m), (e.mu_f, k.mu_f)] {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn mosquito_infection_vanishes_at_upper_limit() {
    let epi = EpiParams::<f64>::default();
    assert_eq!(beta_mh(epi.lactin.t_max, &epi), 0.0);
}

fn max_rel_change(a: &[[f64; 4]], b: &[[f64; 4]]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| (0..4).map(move |i| (x[i] - y[i]).abs() / y[i].abs().max(1e-9)))
        .fold(0.0, f64::max)
}

#[test]
fn step_halving_on_constant_run() {
    let env = Environment::constant_at_temperature(101, &splines(), 25.0, 202_000.0, EpiParams::default()).unwrap();
    let model = SitModel::new(&env, ResidualFertility::default());
    let e = wild_equilibrium(&env.day(0).ento, env.day(0).mu_a2).unwrap().state;
    let y0 = [0.1 * e.a, 0.1 * e.m, 0.1 * e.f, 0.0];
    let run = |s| integrate(&model, &Rk4::new(s).unwrap(), y0, 0, 100, &ImpulseSchedule::none()).unwrap();
    let change = max_rel_change(&run(20).states, &run(40).states);
    assert!(change < 1e-6, "{change}");
}

#[test]
fn fourth_order_convergence_with_releases() {
    let env = Environment::constant_at_temperature(101, &splines(), 25.0, 202_000.0, EpiParams::default()).unwrap();
    let model = SitModel::new(&env, ResidualFertility::default());
    let e = wild_equilibrium(&env.day(0).ento, env.day(0).mu_a2).unwrap().state;
    let y0 = [0.1 * e.a, 0.1 * e.m, 0.1 * e.f, 0.0];
    let schedule = ImpulseSchedule::periodic(3, 7, 50_000.0).unwrap();
    let run = |s| integrate(&model, &Rk4::new(s).unwrap(), y0, 0, 100, &schedule).unwrap().states;
    let (a, b, c) = (run(10), run(20), run(40));
    let ratio = max_rel_change(&a, &c) / max_rel_change(&b, &c);
    // Errors e(h) ~ h^4 give (e(h) - e(h/4)) / (e(h/2) - e(h/4)) = 17.
    assert!((12.0..22.0).contains(&ratio), "{ratio}");
    assert!(max_rel_change(&b, &c) < 1e-5);
}

fn synthetic_env(mc: f64) -> Environment<f64> {
    let s = sitsim::synth_weather(3, 2 * 365, &sitsim::ClimateProfile::default()).unwrap();
    let mut cfg = EnvironmentConfig::default();
    cfg.capacity.mc_level = mc;
    Environment::from_weather(&s, &splines(), &cfg).unwrap()
}

#[test]
fn stop_rule_is_first_success() {
    let env = synthetic_env(0.0);
    for objective in [Objective::Nuisance, Objective::EpiRisk] {
        let cfg = ScanConfig {
            objective,
            start_grid: StartGrid::Days(vec![400, 450, 500]),
            ..ScanConfig::default()
        };
        let ctx = StrategyContext::prepare(&cfg, &env, Rk4::default()).unwrap();
        for t0 in cfg.start_days(&env).unwrap() {
            let out = run_strategy(t0, &cfg, &env, &ctx).unwrap();
            let Some(stop) = out.stop_day else { continue };
            let mut y0 = ctx.baseline[t0];
            y0.m_s = 0.0;
            let model = SitModel::new(&env, cfg.fertility);
            let schedule = ImpulseSchedule::periodic(t0, cfg.tau, cfg.massive_bolus()).unwrap();
            let traj = integrate(&model, &ctx.rk, y0.to_array(), t0, stop - t0, &schedule).unwrap();
            let state = |d: usize| sitsim::population::PopulationState::from_array(traj.states[d - t0]);
            assert!(ctx.objective_met(&cfg, &env, stop, &state(stop)));
            assert_eq!(state(stop), out.stop_state.unwrap());
            for d in t0..stop {
                assert!(!ctx.objective_met(&cfg, &env, d, &state(d)), "t0 {t0} day {d}");
            }
            assert_eq!(out.n_massive, (stop - t0).div_ceil(cfg.tau));
        }
    }
}

#[test]
fn scans_are_deterministic() {
    let env = synthetic_env(0.2);
    let cfg = ScanConfig::<f64>::default();
    let ctx = StrategyContext::prepare(&cfg, &env, Rk4::default()).unwrap();
    let a = sitsim::scan_start_dates(&cfg, &env, &ctx).unwrap();
    let b = sitsim::scan_start_dates(&cfg, &env, &ctx).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.outcome.as_ref().unwrap(), y.outcome.as_ref().unwrap());
    }
}

