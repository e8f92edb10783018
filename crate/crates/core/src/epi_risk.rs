//! Temperature-dependent dengue transmission and the effective reproduction
//! number used as the epidemiological stop rule.

use serde::{Deserialize, Serialize};

use crate::bio_params::EntoParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lactin-1 coefficients of the mosquito-to-human transmission probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lactin<T> {
    pub alpha: T,
    pub t_max: T,
    pub delta_t: T,
}

/// Quadratic `a T^2 + b T + c` for the extrinsic incubation rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncubationPoly<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

/// DENV constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpiParams<T> {
    /// Bites per mosquito per day.
    pub bite_rate: T,
    /// Human mortality, 1/day.
    pub mu_h: T,
    /// Recovery rate (inverse viremic period), 1/day.
    pub eta_h: T,
    /// Human population size.
    pub n_h: T,
    pub lactin: Lactin<T>,
    /// Half-saturation temperature of the human-to-mosquito probability, °C.
    pub beta_h: T,
    pub nu_m: IncubationPoly<T>,
}

impl<T: Scalar> Default for EpiParams<T> {
    fn default() -> Self {
        Self {
            bite_rate: T::lit(0.2),
            mu_h: T::one() / T::lit(365.0 * 78.0),
            eta_h: T::one() / T::lit(7.0),
            n_h: T::lit(2000.0),
            lactin: Lactin {
                alpha: T::lit(0.20404),
                t_max: T::lit(37.354),
                delta_t: T::lit(4.89694),
            },
            beta_h: T::lit(18.9871),
            nu_m: IncubationPoly {
                a: T::lit(-0.001),
                b: T::lit(0.0670),
                c: T::lit(-0.866),
            },
        }
    }
}

impl<T: Scalar> EpiParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_h > T::zero()) {
            return Err(Error::invalid("human population N_h must be positive"));
        }
        if !(self.bite_rate > T::zero() && self.eta_h > T::zero() && self.mu_h >= T::zero()) {
            return Err(Error::invalid("bite rate and recovery rate must be positive"));
        }
        if !(self.lactin.delta_t > T::zero() && self.beta_h > T::zero()) {
            return Err(Error::invalid("Lactin delta_T and beta_h must be positive"));
        }
        Ok(())
    }

    /// Transmission rates at a temperature.
    pub fn rates_at(&self, temp: T) -> EpiRates<T> {
        EpiRates {
            beta_mh: beta_mh(temp, self),
            beta_hm: beta_hm(temp, self),
            nu_m: nu_m(temp, self),
        }
    }
}

/// Temperature-dependent transmission quantities on one day.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpiRates<T> {
    pub beta_mh: T,
    pub beta_hm: T,
    pub nu_m: T,
}

/// Mosquito-to-human transmission probability (Lactin-1), floored at 0.
pub fn beta_mh<T: Scalar>(temp: T, epi: &EpiParams<T>) -> T {
    let l = &epi.lactin;
    let v = (l.alpha * temp).exp() - (l.alpha * l.t_max - (l.t_max - temp) / l.delta_t).exp();
    v.max(T::zero())
}

/// Human-to-mosquito transmission probability `T^7 / (T^7 + beta_h^7)`;
/// zero for non-positive temperatures.
pub fn beta_hm<T: Scalar>(temp: T, epi: &EpiParams<T>) -> T {
    if temp <= T::zero() {
        return T::zero();
    }
    // ratio form avoids overflow of T^7 in single precision
    let x = (epi.beta_h / temp).powi(7);
    T::one() / (T::one() + x)
}

/// Extrinsic incubation rate, floored at 0.
pub fn nu_m<T: Scalar>(temp: T, epi: &EpiParams<T>) -> T {
    let p = &epi.nu_m;
    (p.a * temp * temp + p.b * temp + p.c).max(T::zero())
}

/// Effective reproduction number for a susceptible female population `f_s`.
/// Zero whenever the incubation rate vanishes.
pub fn r_eff<T: Scalar>(f_s: T, ep: &EntoParams<T>, rates: &EpiRates<T>, epi: &EpiParams<T>) -> T {
    if rates.nu_m <= T::zero() {
        return T::zero();
    }
    let b = epi.bite_rate;
    rates.nu_m / (rates.nu_m + ep.mu_f) * (b * b * rates.beta_mh * rates.beta_hm)
        / (ep.mu_f * (epi.eta_h + epi.mu_h))
        * f_s
        / epi.n_h
}

/// Squared SIT basic reproduction number at a disease-free female level
/// `f_s_star`, written with the two transmission legs kept separate.
pub fn r0_sit_squared<T: Scalar>(
    f_s_star: T,
    ep: &EntoParams<T>,
    rates: &EpiRates<T>,
    epi: &EpiParams<T>,
) -> T {
    if rates.nu_m <= T::zero() {
        return T::zero();
    }
    let b = epi.bite_rate;
    rates.nu_m / (rates.nu_m + ep.mu_f) * (b * rates.beta_mh / ep.mu_f)
        * (b * rates.beta_hm / (epi.eta_h + epi.mu_h))
        * f_s_star
        / epi.n_h
}

/// Operational target for the effective reproduction number.
pub const R_EFF_TARGET: f64 = 0.5;

/// Female population below which `r_eff < 0.5`. Infinite when a
/// transmission factor vanishes, i.e. the risk is already nil.
pub fn f_threshold<T: Scalar>(ep: &EntoParams<T>, rates: &EpiRates<T>, epi: &EpiParams<T>) -> T {
    let b = epi.bite_rate;
    let transmission = b * b * rates.beta_mh * rates.beta_hm;
    if rates.nu_m <= T::zero() || transmission <= T::zero() {
        return T::infinity();
    }
    (rates.nu_m + ep.mu_f) / rates.nu_m * (ep.mu_f * (epi.eta_h + epi.mu_h)) / transmission
        * epi.n_h
        * T::lit(R_EFF_TARGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bio_params::RateSplines;

    fn epi() -> EpiParams<f64> {
        EpiParams::default()
    }

    #[test]
    fn lactin_zero_at_t_max() {
        assert_eq!(beta_mh(37.354, &epi()), 0.0);
        assert_eq!(beta_mh(40.0, &epi()), 0.0);
    }

    #[test]
    fn lactin_at_25c() {
        // direct evaluation in double precision (python math.exp)
        assert!((beta_mh(25.0, &epi()) - 0.34275644549148865).abs() < 1e-9);
    }

    #[test]
    fn lactin_cold_limit() {
        // alpha is close to 1/delta_T, so the two exponentials nearly cancel
        // and the curve stays positive but far below exp(alpha T)
        let e = epi();
        for t in [-30.0, 0.0, 10.0, 20.0, 30.0, 35.0] {
            let v = beta_mh(t, &e);
            assert!(v > 0.0 && v < 0.02 * (0.20404f64 * t).exp(), "{t}: {v}");
        }
        assert!((beta_mh(0.0, &e) - 0.0062988508934541665).abs() < 1e-12);
    }

    #[test]
    fn human_to_mosquito_probability() {
        let e = epi();
        assert!((beta_hm(18.9871, &e) - 0.5).abs() < 1e-15);
        assert!((beta_hm(25.0, &e) - 0.8727851649695783).abs() < 1e-12);
        assert!(beta_hm(500.0, &e) > 0.999_999);
        assert_eq!(beta_hm(0.0, &e), 0.0);
        assert_eq!(beta_hm(-3.0, &e), 0.0);
    }

    #[test]
    fn incubation_rate() {
        let e = epi();
        assert!((nu_m(25.0, &e) - 0.184).abs() < 1e-12);
        assert_eq!(nu_m(10.0, &e), 0.0);
        assert_eq!(nu_m(60.0, &e), 0.0);
        let peak = nu_m(33.5, &e);
        for t in [30.0, 33.0, 33.4, 33.6, 34.0, 37.0] {
            assert!(nu_m(t, &e) <= peak);
        }
    }

    #[test]
    fn threshold_inverts_r_eff() {
        let e = epi();
        let s = RateSplines::<f64>::published();
        for t in [18.0, 21.5, 25.0, 28.0, 31.0] {
            let ep = s.rates_at(t);
            let rates = e.rates_at(t);
            let f = f_threshold(&ep, &rates, &e);
            assert!(f.is_finite());
            assert!((r_eff(f, &ep, &rates, &e) - 0.5).abs() < 1e-12);
            assert!((r_eff(2.0 * f, &ep, &rates, &e) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn r_eff_linear_and_zero() {
        let e = epi();
        let ep = RateSplines::<f64>::published().rates_at(25.0);
        let rates = e.rates_at(25.0);
        assert_eq!(r_eff(0.0, &ep, &rates, &e), 0.0);
        let one = r_eff(100.0, &ep, &rates, &e);
        assert!((r_eff(200.0, &ep, &rates, &e) - 2.0 * one).abs() < 1e-12);
    }

    #[test]
    fn r0_matches_r_eff_form() {
        let e = epi();
        let ep = RateSplines::<f64>::published().rates_at(27.0);
        let rates = e.rates_at(27.0);
        let a = r0_sit_squared(1234.0, &ep, &rates, &e);
        let b = r_eff(1234.0, &ep, &rates, &e);
        assert!((a - b).abs() < 1e-12 * b);
    }

    #[test]
    fn threshold_infinite_without_incubation() {
        let e = epi();
        let ep = RateSplines::<f64>::published().rates_at(15.0);
        let rates = e.rates_at(15.0);
        assert_eq!(rates.nu_m, 0.0);
        assert!(f_threshold(&ep, &rates, &e).is_infinite());
        assert_eq!(r_eff(1e6, &ep, &rates, &e), 0.0);
    }

    #[test]
    fn threshold_scales_with_humans() {
        let e = epi();
        let e2 = EpiParams { n_h: 4000.0, ..e };
        let ep = RateSplines::<f64>::published().rates_at(26.0);
        let r = e.rates_at(26.0);
        assert!((f_threshold(&ep, &r, &e2) / f_threshold(&ep, &r, &e) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn colder_days_raise_threshold() {
        // the incubation rate falls below its vertex at 33.5 °C
        let e = epi();
        let s = RateSplines::<f64>::published();
        let grid: Vec<f64> = (0..=8).map(|i| 20.0 + i as f64).collect();
        let thresholds: Vec<f64> = grid
            .iter()
            .map(|&t| f_threshold(&s.rates_at(t), &e.rates_at(t), &e))
            .collect();
        for w in thresholds.windows(2) {
            assert!(w[0] > w[1], "{thresholds:?}");
        }
    }

    #[test]
    fn validation() {
        assert!(epi().validate().is_ok());
        assert!(EpiParams { n_h: 0.0, ..epi() }.validate().is_err());
    }
}
