//! Laboratory life-history tables for *Aedes albopictus*, the rates derived
//! from them, and temperature interpolation of those rates.
//!
//! The built-in tables cover the five laboratory temperatures 15, 20, 25, 30
//! and 35 °C. Percentages from the laboratory table are stored as proportions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spline::NaturalCubicSpline;

/// Temperature grid of the laboratory tables, °C.
pub const KNOT_TEMPERATURES: [f64; 5] = [15.0, 20.0, 25.0, 30.0, 35.0];

/// Fixed sex ratio at emergence.
pub const SEX_RATIO: f64 = 0.5;

/// One column of the laboratory life-history table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabTableRow<T> {
    /// °C
    pub temp: T,
    /// Proportion of viable eggs.
    pub r_viable: T,
    /// Eggs per deposit.
    pub n_eggs: T,
    /// Gonotrophic cycle length in days; absent when no eggs are laid.
    pub tau_gono: Option<T>,
    /// Days from hatching to emergence.
    pub tau_a: T,
    /// Larva-to-adult survivorship (proportion).
    pub s_a: T,
    /// Adult male half-life, days.
    pub tau_m: T,
    /// Adult female half-life, days.
    pub tau_f: T,
}

/// Entomological rates at one temperature. The density-dependent aquatic
/// mortality is not part of the bundle because it depends on the carrying
/// capacity; see [`crate::weather::density_death_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntoParams<T> {
    /// Effective fecundity, eggs per female per day.
    pub phi: T,
    /// Aquatic-to-adult transition rate, 1/day.
    pub gamma: T,
    /// Density-independent aquatic mortality, 1/day.
    pub mu_a1: T,
    /// Wild male mortality, 1/day.
    pub mu_m: T,
    /// Female mortality, 1/day.
    pub mu_f: T,
    /// Sterile male mortality, 1/day. Equal to `mu_m`.
    pub mu_s: T,
    /// Sex ratio.
    pub r: T,
}

/// The five temperature-dependent rates at a laboratory knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotRates<T> {
    pub phi: T,
    pub mu_a1: T,
    pub gamma: T,
    pub mu_m: T,
    pub mu_f: T,
}

impl<T: Scalar> KnotRates<T> {
    pub fn into_params(self) -> EntoParams<T> {
        EntoParams {
            phi: self.phi,
            gamma: self.gamma,
            mu_a1: self.mu_a1,
            mu_m: self.mu_m,
            mu_f: self.mu_f,
            mu_s: self.mu_m,
            r: T::lit(SEX_RATIO),
        }
    }
}

/// Laboratory table, one row per knot temperature.
pub fn lab_table<T: Scalar>() -> [LabTableRow<T>; 5] {
    // (temp, r_viable %, N_eggs, tau_gono, tau_A, s_A %, tau_M, tau_F)
    #[allow(clippy::type_complexity)]
    const RAW: [(f64, f64, f64, Option<f64>, f64, f64, f64, f64); 5] = [
        (15.0, 8.2, 0.0, None, 35.0, 50.0, 15.45, 19.65),
        (20.0, 66.9, 50.8, Some(8.1), 14.4, 77.5, 10.25, 15.15),
        (25.0, 49.2, 65.3, Some(3.1), 10.4, 76.3, 9.6, 15.3),
        (30.0, 51.4, 74.2, Some(3.9), 8.8, 67.5, 8.55, 16.9),
        (35.0, 10.0, 48.7, Some(1.3), 12.3, 2.5, 7.4, 10.0),
    ];
    RAW.map(|(temp, rv, ne, tg, ta, sa, tm, tf)| LabTableRow {
        temp: T::lit(temp),
        r_viable: T::lit(rv / 100.0),
        n_eggs: T::lit(ne),
        tau_gono: tg.map(T::lit),
        tau_a: T::lit(ta),
        s_a: T::lit(sa / 100.0),
        tau_m: T::lit(tm),
        tau_f: T::lit(tf),
    })
}

/// Published rate values at each knot, rounded to four decimals. These are
/// the interpolation data used by [`RateSplines::published`].
pub fn published_rates<T: Scalar>() -> [KnotRates<T>; 5] {
    const PHI: [f64; 5] = [0.0, 4.1957, 10.3637, 9.7792, 3.7462];
    const MU_A1: [f64; 5] = [0.0198, 0.0177, 0.0260, 0.0447, 0.2999];
    const GAMMA: [f64; 5] = [0.0286, 0.0694, 0.0962, 0.1136, 0.0813];
    const MU_M: [f64; 5] = [0.0449, 0.0676, 0.0722, 0.0811, 0.0937];
    const MU_F: [f64; 5] = [0.0353, 0.0458, 0.0453, 0.0413, 0.0693];
    std::array::from_fn(|i| KnotRates {
        phi: T::lit(PHI[i]),
        mu_a1: T::lit(MU_A1[i]),
        gamma: T::lit(GAMMA[i]),
        mu_m: T::lit(MU_M[i]),
        mu_f: T::lit(MU_F[i]),
    })
}

/// Rates implied by one laboratory table column.
///
/// A missing gonotrophic cycle (or zero eggs) means no oviposition and
/// `phi = 0`.
pub fn derive_rates<T: Scalar>(row: &LabTableRow<T>) -> Result<KnotRates<T>> {
    let zero = T::zero();
    let one = T::one();
    if !(row.s_a > zero && row.s_a <= one) {
        return Err(Error::invalid(format!(
            "survivorship must lie in (0, 1], got {}",
            row.s_a
        )));
    }
    if !(zero..=one).contains(&row.r_viable) {
        return Err(Error::invalid("viable-egg proportion must lie in [0, 1]"));
    }
    for (name, d) in [("tau_A", row.tau_a), ("tau_M", row.tau_m), ("tau_F", row.tau_f)] {
        if !(d > zero) {
            return Err(Error::invalid(format!("{name} must be positive")));
        }
    }
    let phi = match row.tau_gono {
        Some(g) if !(g > zero) => return Err(Error::invalid("tau_gono must be positive")),
        Some(g) if row.n_eggs > zero => row.r_viable * row.n_eggs / g,
        _ => zero,
    };
    let ln2 = T::lit(std::f64::consts::LN_2);
    Ok(KnotRates {
        phi,
        mu_a1: -row.s_a.ln() / row.tau_a,
        gamma: one / row.tau_a,
        mu_m: ln2 / row.tau_m,
        mu_f: ln2 / row.tau_f,
    })
}

/// One natural cubic spline per rate over the knot temperatures.
#[derive(Debug, Clone)]
pub struct RateSplines<T> {
    phi: NaturalCubicSpline<T>,
    gamma: NaturalCubicSpline<T>,
    mu_a1: NaturalCubicSpline<T>,
    mu_m: NaturalCubicSpline<T>,
    mu_f: NaturalCubicSpline<T>,
}

impl<T: Scalar> RateSplines<T> {
    pub fn from_knots(temps: &[T], rates: &[KnotRates<T>]) -> Result<Self> {
        let col = |f: fn(&KnotRates<T>) -> T| -> Result<NaturalCubicSpline<T>> {
            let ys: Vec<T> = rates.iter().map(f).collect();
            NaturalCubicSpline::new(temps, &ys)
        };
        Ok(Self {
            phi: col(|k| k.phi)?,
            gamma: col(|k| k.gamma)?,
            mu_a1: col(|k| k.mu_a1)?,
            mu_m: col(|k| k.mu_m)?,
            mu_f: col(|k| k.mu_f)?,
        })
    }

    /// Splines through the published four-decimal knot values.
    pub fn published() -> Self {
        let temps = KNOT_TEMPERATURES.map(T::lit);
        Self::from_knots(&temps, &published_rates::<T>()).expect("built-in table is valid")
    }

    /// Splines through rates derived from a laboratory table.
    pub fn from_lab_table(rows: &[LabTableRow<T>]) -> Result<Self> {
        let temps: Vec<T> = rows.iter().map(|r| r.temp).collect();
        let rates = rows.iter().map(derive_rates).collect::<Result<Vec<_>>>()?;
        Self::from_knots(&temps, &rates)
    }

    /// Rates at temperature `temp`, clamped to the knot range and floored at 0.
    pub fn rates_at(&self, temp: T) -> EntoParams<T> {
        let z = T::zero();
        KnotRates {
            phi: self.phi.eval(temp).max(z),
            gamma: self.gamma.eval(temp).max(z),
            mu_a1: self.mu_a1.eval(temp).max(z),
            mu_m: self.mu_m.eval(temp).max(z),
            mu_f: self.mu_f.eval(temp).max(z),
        }
        .into_params()
    }
}

/// Basic offspring number `r phi gamma / ((gamma + mu_a1) mu_f)`.
pub fn basic_offspring<T: Scalar>(ep: &EntoParams<T>) -> Result<T> {
    let denom = (ep.gamma + ep.mu_a1) * ep.mu_f;
    if !(denom > T::zero()) {
        return Err(Error::invalid(
            "basic offspring number undefined: (gamma + mu_A1) * mu_F is not positive",
        ));
    }
    Ok(ep.r * ep.phi * ep.gamma / denom)
}

/// Male-equilibrium scale `Q = (1-r) gamma (gamma + mu_a1) / (mu_a2 mu_m)`,
/// so that the wild male equilibrium is `Q (N - 1)`.
pub fn q_factor<T: Scalar>(ep: &EntoParams<T>, mu_a2: T) -> Result<T> {
    if !(mu_a2 > T::zero()) {
        return Err(Error::invalid("Q undefined: mu_A2 must be positive"));
    }
    if !(ep.mu_m > T::zero()) {
        return Err(Error::invalid("Q undefined: mu_M must be positive"));
    }
    Ok((T::one() - ep.r) * ep.gamma * (ep.gamma + ep.mu_a1) / (mu_a2 * ep.mu_m))
}
