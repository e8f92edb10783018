//! Mosquito population dynamics: the wild system, the SIT system with
//! residual fertility, and the coupled SEI (females) / SIR (humans) dengue
//! system. Parameters are supplied per day through [`DailyParams`].

mod integrate;

use serde::{Deserialize, Serialize};

use crate::bio_params::EntoParams;
use crate::epi_risk::{EpiParams, EpiRates};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use integrate::{integrate, ImpulseSchedule, ReleaseEvent, Rk4, Trajectory, DEFAULT_STEPS_PER_DAY};

/// Source of day-indexed model coefficients. Coefficients are constant
/// within a day.
pub trait DailyParams<T>: Sync {
    fn ento(&self, day: usize) -> EntoParams<T>;
    fn mu_a2(&self, day: usize) -> T;
    fn epi_rates(&self, day: usize) -> EpiRates<T>;
    /// Number of days covered, `None` when unbounded.
    fn n_days(&self) -> Option<usize>;
}

/// The same coefficients on every day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantParams<T> {
    pub ento: EntoParams<T>,
    pub mu_a2: T,
    pub epi: EpiRates<T>,
}

impl<T: Scalar> DailyParams<T> for ConstantParams<T> {
    fn ento(&self, _day: usize) -> EntoParams<T> {
        self.ento
    }
    fn mu_a2(&self, _day: usize) -> T {
        self.mu_a2
    }
    fn epi_rates(&self, _day: usize) -> EpiRates<T> {
        self.epi
    }
    fn n_days(&self) -> Option<usize> {
        None
    }
}

/// Aquatic stage, wild males, females and sterile males (absolute counts).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PopulationState<T> {
    pub a: T,
    pub m: T,
    pub f: T,
    pub m_s: T,
}

impl<T: Scalar> PopulationState<T> {
    pub fn wild(a: T, m: T, f: T) -> Self {
        Self { a, m, f, m_s: T::zero() }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.a, self.m, self.f, self.m_s]
    }

    pub fn from_array([a, m, f, m_s]: [T; 4]) -> Self {
        Self { a, m, f, m_s }
    }
}

/// Coupled entomological / epidemiological state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpiState<T> {
    pub a: T,
    pub m: T,
    pub m_s: T,
    pub f_s: T,
    pub f_e: T,
    pub f_i: T,
    pub s_h: T,
    pub i_h: T,
    pub r_h: T,
}

impl<T: Scalar> EpiState<T> {
    pub fn to_array(self) -> [T; 9] {
        [
            self.a, self.m, self.m_s, self.f_s, self.f_e, self.f_i, self.s_h, self.i_h, self.r_h,
        ]
    }

    pub fn from_array([a, m, m_s, f_s, f_e, f_i, s_h, i_h, r_h]: [T; 9]) -> Self {
        Self { a, m, m_s, f_s, f_e, f_i, s_h, i_h, r_h }
    }

    /// Disease-free state with every female susceptible.
    pub fn disease_free(pop: PopulationState<T>, n_h: T) -> Self {
        Self {
            a: pop.a,
            m: pop.m,
            m_s: pop.m_s,
            f_s: pop.f,
            f_e: T::zero(),
            f_i: T::zero(),
            s_h: n_h,
            i_h: T::zero(),
            r_h: T::zero(),
        }
    }

    pub fn females(&self) -> T {
        self.f_s + self.f_e + self.f_i
    }

    pub fn humans(&self) -> T {
        self.s_h + self.i_h + self.r_h
    }
}

/// Residual fertility `epsilon` of released males and their mating
/// competitiveness `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualFertility<T> {
    pub epsilon: T,
    pub beta: T,
}

impl<T: Scalar> Default for ResidualFertility<T> {
    fn default() -> Self {
        Self {
            epsilon: T::zero(),
            beta: T::one(),
        }
    }
}

impl<T: Scalar> ResidualFertility<T> {
    pub fn new(epsilon: T, beta: T) -> Result<Self> {
        let rf = Self { epsilon, beta };
        rf.validate()?;
        Ok(rf)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= T::zero() && self.epsilon < T::one()) {
            return Err(Error::invalid("residual fertility must lie in [0, 1)"));
        }
        if !(self.beta > T::zero()) {
            return Err(Error::invalid("competitiveness beta must be positive"));
        }
        Ok(())
    }

    /// Fraction of matings producing viable offspring,
    /// `(M + eps beta M_S) / (M + beta M_S)`; 1 when both male classes vanish.
    pub fn fertile_fraction(&self, m: T, m_s: T) -> T {
        let denom = m + self.beta * m_s;
        if denom <= T::zero() {
            return T::one();
        }
        (m + self.epsilon * self.beta * m_s) / denom
    }
}

/// Wild system. The sterile component of the returned derivative is zero.
pub fn rhs_wild<T: Scalar>(s: &PopulationState<T>, ep: &EntoParams<T>, mu_a2: T) -> PopulationState<T> {
    PopulationState {
        a: ep.phi * s.f - (ep.gamma + ep.mu_a1 + mu_a2 * s.a) * s.a,
        m: (T::one() - ep.r) * ep.gamma * s.a - ep.mu_m * s.m,
        f: ep.r * ep.gamma * s.a - ep.mu_f * s.f,
        m_s: T::zero(),
    }
}

/// SIT system between releases; sterile males only decay.
pub fn rhs_sit<T: Scalar>(
    s: &PopulationState<T>,
    ep: &EntoParams<T>,
    mu_a2: T,
    rf: &ResidualFertility<T>,
) -> PopulationState<T> {
    let frac = rf.fertile_fraction(s.m, s.m_s);
    PopulationState {
        a: ep.phi * s.f - (ep.gamma + ep.mu_a1 + mu_a2 * s.a) * s.a,
        m: (T::one() - ep.r) * ep.gamma * s.a - ep.mu_m * s.m,
        f: ep.r * ep.gamma * frac * s.a - ep.mu_f * s.f,
        m_s: -ep.mu_s * s.m_s,
    }
}

/// Coupled SEI-SIR system. Mosquitoes are infected through bites on
/// infectious humans with probability `beta_hm`; humans through bites of
/// infectious females with probability `beta_mh`.
pub fn rhs_epi<T: Scalar>(
    s: &EpiState<T>,
    ep: &EntoParams<T>,
    mu_a2: T,
    rf: &ResidualFertility<T>,
    rates: &EpiRates<T>,
    epi: &EpiParams<T>,
) -> Result<EpiState<T>> {
    if !(epi.n_h > T::zero()) {
        return Err(Error::invalid("human population N_h must be positive"));
    }
    let b = epi.bite_rate;
    let frac = rf.fertile_fraction(s.m, s.m_s);
    let mosquito_infection = b * rates.beta_hm * s.f_s * s.i_h / epi.n_h;
    let human_infection = b * rates.beta_mh * s.f_i * s.s_h / epi.n_h;
    Ok(EpiState {
        a: ep.phi * s.females() - (ep.gamma + ep.mu_a1 + mu_a2 * s.a) * s.a,
        m: (T::one() - ep.r) * ep.gamma * s.a - ep.mu_m * s.m,
        m_s: -ep.mu_s * s.m_s,
        f_s: ep.r * ep.gamma * frac * s.a - mosquito_infection - ep.mu_f * s.f_s,
        f_e: mosquito_infection - (rates.nu_m + ep.mu_f) * s.f_e,
        f_i: rates.nu_m * s.f_e - ep.mu_f * s.f_i,
        s_h: epi.mu_h * epi.n_h - human_infection - epi.mu_h * s.s_h,
        i_h: human_infection - (epi.eta_h + epi.mu_h) * s.i_h,
        r_h: epi.eta_h * s.i_h - epi.mu_h * s.r_h,
    })
}

/// A system of `N` ODEs driven by daily coefficients.
pub trait Dynamics<T: Scalar, const N: usize>: Sync {
    /// Component that receives release impulses.
    const STERILE_INDEX: usize;

    fn derivative(&self, day: usize, y: &[T; N]) -> [T; N];

    /// Number of days with coefficients, `None` when unbounded.
    fn n_days(&self) -> Option<usize> {
        None
    }

    /// Upper estimate of the fastest local decay rate (1/day), used to split
    /// integration steps that would otherwise be unstable.
    fn stiffness(&self, _day: usize, _y: &[T; N]) -> T {
        T::zero()
    }
}

/// Largest diagonal Jacobian magnitude of the entomological block.
fn ento_stiffness<T: Scalar>(ep: &EntoParams<T>, mu_a2: T, a: T) -> T {
    (ep.gamma + ep.mu_a1 + T::lit(2.0) * mu_a2 * a)
        .max(ep.mu_m)
        .max(ep.mu_f)
        .max(ep.mu_s)
}

/// Wild population without sterile males.
pub struct WildModel<'a, T> {
    pub params: &'a dyn DailyParams<T>,
}

impl<T: Scalar> Dynamics<T, 4> for WildModel<'_, T> {
    const STERILE_INDEX: usize = 3;

    fn derivative(&self, day: usize, y: &[T; 4]) -> [T; 4] {
        let s = PopulationState::from_array(*y);
        rhs_wild(&s, &self.params.ento(day), self.params.mu_a2(day)).to_array()
    }

    fn n_days(&self) -> Option<usize> {
        self.params.n_days()
    }

    fn stiffness(&self, day: usize, y: &[T; 4]) -> T {
        ento_stiffness(&self.params.ento(day), self.params.mu_a2(day), y[0])
    }
}

/// SIT system, optionally with a continuous sterile-male release rate on
/// top of impulsive releases.
pub struct SitModel<'a, T> {
    pub params: &'a dyn DailyParams<T>,
    pub rf: ResidualFertility<T>,
    /// Individuals per day.
    pub continuous_release: T,
}

impl<'a, T: Scalar> SitModel<'a, T> {
    pub fn new(params: &'a dyn DailyParams<T>, rf: ResidualFertility<T>) -> Self {
        Self {
            params,
            rf,
            continuous_release: T::zero(),
        }
    }
}

impl<T: Scalar> Dynamics<T, 4> for SitModel<'_, T> {
    const STERILE_INDEX: usize = 3;

    fn derivative(&self, day: usize, y: &[T; 4]) -> [T; 4] {
        let s = PopulationState::from_array(*y);
        let mut d = rhs_sit(&s, &self.params.ento(day), self.params.mu_a2(day), &self.rf);
        d.m_s += self.continuous_release;
        d.to_array()
    }

    fn n_days(&self) -> Option<usize> {
        self.params.n_days()
    }

    fn stiffness(&self, day: usize, y: &[T; 4]) -> T {
        ento_stiffness(&self.params.ento(day), self.params.mu_a2(day), y[0])
    }
}

/// Coupled dengue model. Build with [`EpiModel::new`], which validates the
/// constants once so the right-hand side cannot fail.
pub struct EpiModel<'a, T> {
    params: &'a dyn DailyParams<T>,
    rf: ResidualFertility<T>,
    epi: EpiParams<T>,
}

impl<'a, T: Scalar> EpiModel<'a, T> {
    pub fn new(params: &'a dyn DailyParams<T>, rf: ResidualFertility<T>, epi: EpiParams<T>) -> Result<Self> {
        epi.validate()?;
        rf.validate()?;
        Ok(Self { params, rf, epi })
    }
}

impl<T: Scalar> Dynamics<T, 9> for EpiModel<'_, T> {
    const STERILE_INDEX: usize = 2;

    fn derivative(&self, day: usize, y: &[T; 9]) -> [T; 9] {
        let s = EpiState::from_array(*y);
        rhs_epi(
            &s,
            &self.params.ento(day),
            self.params.mu_a2(day),
            &self.rf,
            &self.params.epi_rates(day),
            &self.epi,
        )
        .expect("constants validated at construction")
        .to_array()
    }

    fn n_days(&self) -> Option<usize> {
        self.params.n_days()
    }

    fn stiffness(&self, day: usize, y: &[T; 9]) -> T {
        ento_stiffness(&self.params.ento(day), self.params.mu_a2(day), y[0])
    }
}
