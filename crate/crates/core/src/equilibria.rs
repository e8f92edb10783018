//! Equilibria of the frozen-coefficient system, with and without a standing
//! sterile-male population, the release thresholds, and the lower-equilibrium
//! box used as the nuisance stop rule.

use std::ops::Range;

use serde::Serialize;

use crate::bio_params::{basic_offspring, q_factor, EntoParams};
use crate::error::{Error, Result};
use crate::population::{DailyParams, PopulationState, ResidualFertility};
use crate::scalar::Scalar;

/// Positive wild equilibrium, or the extinction state when `N <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WildEquilibrium<T> {
    pub offspring: T,
    pub persists: bool,
    pub state: PopulationState<T>,
}

/// Wild equilibrium `E*`. When the basic offspring number does not exceed 1
/// only the extinction equilibrium exists; this is flagged, not an error.
pub fn wild_equilibrium<T: Scalar>(ep: &EntoParams<T>, mu_a2: T) -> Result<WildEquilibrium<T>> {
    let n = basic_offspring(ep)?;
    if n <= T::one() {
        return Ok(WildEquilibrium {
            offspring: n,
            persists: false,
            state: PopulationState::default(),
        });
    }
    if !(mu_a2 > T::zero()) {
        return Err(Error::invalid("wild equilibrium needs a positive mu_A2"));
    }
    let a = (ep.gamma + ep.mu_a1) * (n - T::one()) / mu_a2;
    Ok(WildEquilibrium {
        offspring: n,
        persists: true,
        state: PopulationState::wild(
            a,
            (T::one() - ep.r) * ep.gamma * a / ep.mu_m,
            ep.r * ep.gamma * a / ep.mu_f,
        ),
    })
}

/// Position of the residual fertility relative to `1 / N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FertilityRegime {
    /// `eps < 1/N`: releases above the threshold drive the population extinct.
    BelowInverseOffspring,
    /// `eps = 1/N`.
    AtInverseOffspring,
    /// `eps > 1/N`: a positive equilibrium survives any release size.
    AboveInverseOffspring,
}

/// Equilibria under a constant standing sterile population `m_t`.
///
/// `e1` is the lower (unstable) positive equilibrium and `e2` the upper
/// (stable) one. With a single positive root (no releases, or
/// `eps >= 1/N`) it is stored in `e2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumSet<T> {
    pub wild: WildEquilibrium<T>,
    pub regime: FertilityRegime,
    pub discriminant: T,
    pub e1: Option<PopulationState<T>>,
    pub e2: Option<PopulationState<T>>,
}

impl<T: Scalar> EquilibriumSet<T> {
    /// True when no positive equilibrium exists.
    pub fn extinction_only(&self) -> bool {
        self.e1.is_none() && self.e2.is_none()
    }
}

/// Coefficients `[a, b, c]` of `a A^2 + b A + c = 0` whose positive roots are
/// the aquatic components of the positive equilibria:
/// `a = (1-r) gamma / mu_M`, `b = beta M_T - M*`,
/// `c = beta M_T (gamma + mu_A1) / mu_A2 (1 - eps N)`.
pub fn equilibrium_quadratic<T: Scalar>(
    ep: &EntoParams<T>,
    mu_a2: T,
    rf: &ResidualFertility<T>,
    m_t: T,
) -> Result<[T; 3]> {
    let n = basic_offspring(ep)?;
    let q = q_factor(ep, mu_a2)?;
    let m_star = q * (n - T::one());
    let bm = rf.beta * m_t;
    Ok([
        (T::one() - ep.r) * ep.gamma / ep.mu_m,
        bm - m_star,
        bm * (ep.gamma + ep.mu_a1) / mu_a2 * (T::one() - rf.epsilon * n),
    ])
}

/// `Delta(eps) = (M* - beta M_T)^2 - 4 Q beta M_T (1 - eps N)`.
pub fn discriminant<T: Scalar>(ep: &EntoParams<T>, mu_a2: T, rf: &ResidualFertility<T>, m_t: T) -> Result<T> {
    let n = basic_offspring(ep)?;
    let q = q_factor(ep, mu_a2)?;
    let bm = rf.beta * m_t;
    let gap = q * (n - T::one()) - bm;
    Ok(gap * gap - T::lit(4.0) * q * bm * (T::one() - rf.epsilon * n))
}

/// Lifts an aquatic level to `(A, M, F)`: males from their balance, females
/// from the aquatic balance.
fn lift<T: Scalar>(a: T, ep: &EntoParams<T>, mu_a2: T, rf: &ResidualFertility<T>, m_t: T) -> PopulationState<T> {
    let m = (T::one() - ep.r) * ep.gamma * a / ep.mu_m;
    let f = if ep.phi > T::zero() {
        (ep.gamma + ep.mu_a1 + mu_a2 * a) * a / ep.phi
    } else {
        ep.r * ep.gamma * rf.fertile_fraction(m, m_t) * a / ep.mu_f
    };
    PopulationState::wild(a, m, f)
}

/// Positive equilibria of the SIT system with a constant standing sterile
/// population `m_t`.
pub fn sit_equilibria<T: Scalar>(
    ep: &EntoParams<T>,
    mu_a2: T,
    rf: &ResidualFertility<T>,
    m_t: T,
) -> Result<EquilibriumSet<T>> {
    if !(m_t >= T::zero()) {
        return Err(Error::invalid("standing sterile population must be non-negative"));
    }
    let wild = wild_equilibrium(ep, mu_a2)?;
    let n = wild.offspring;
    let en = rf.epsilon * n;
    let regime = if en < T::one() {
        FertilityRegime::BelowInverseOffspring
    } else if en > T::one() {
        FertilityRegime::AboveInverseOffspring
    } else {
        FertilityRegime::AtInverseOffspring
    };
    if !(mu_a2 > T::zero()) {
        // no density regulation: only reachable with N <= 1, no positive root
        return Ok(EquilibriumSet {
            wild,
            regime,
            discriminant: T::nan(),
            e1: None,
            e2: None,
        });
    }
    let [qa, qb, qc] = equilibrium_quadratic(ep, mu_a2, rf, m_t)?;
    let disc = discriminant(ep, mu_a2, rf, m_t)?;
    let mut set = EquilibriumSet {
        wild,
        regime,
        discriminant: disc,
        e1: None,
        e2: None,
    };
    // a c = Q beta M_T (1 - eps N), so b^2 - 4ac equals Delta(eps)
    let d = qb * qb - T::lit(4.0) * qa * qc;
    if d < T::zero() {
        return Ok(set);
    }
    // cancellation-free root pair
    let sq = d.sqrt();
    let qq = -(qb + qb.signum() * sq) / T::lit(2.0);
    let (r1, r2) = if qq == T::zero() {
        (T::zero(), T::zero())
    } else {
        let (x, y) = (qq / qa, qc / qq);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    let positive: Vec<T> = [r1, r2].into_iter().filter(|r| *r > T::zero()).collect();
    match positive.as_slice() {
        [lo, hi] => {
            set.e1 = Some(lift(*lo, ep, mu_a2, rf, m_t));
            set.e2 = Some(lift(*hi, ep, mu_a2, rf, m_t));
        }
        [only] => set.e2 = Some(lift(*only, ep, mu_a2, rf, m_t)),
        _ => {}
    }
    Ok(set)
}

/// Release thresholds `beta M_T1` and `beta M_T2` (roots of `Delta(eps) = 0`
/// in `beta M_T`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReleaseThresholds<T> {
    pub beta: T,
    pub beta_m_t1: T,
    pub beta_m_t2: T,
}

impl<T: Scalar> ReleaseThresholds<T> {
    /// Standing sterile population above which no positive equilibrium
    /// remains.
    pub fn m_t1(&self) -> T {
        self.beta_m_t1 / self.beta
    }

    pub fn m_t2(&self) -> T {
        self.beta_m_t2 / self.beta
    }
}

/// `delta(eps) = 16 (1 - eps N)(1 - eps) Q^2 N`, the discriminant of
/// `Delta(eps)` seen as a quadratic in `beta M_T`.
pub fn threshold_discriminant<T: Scalar>(q: T, n: T, epsilon: T) -> T {
    T::lit(16.0) * (T::one() - epsilon * n) * (T::one() - epsilon) * q * q * n
}

/// Thresholds for `eps < 1/N`; `None` when `eps >= 1/N` or `N <= 1` (no
/// threshold exists).
pub fn release_thresholds<T: Scalar>(
    ep: &EntoParams<T>,
    mu_a2: T,
    rf: &ResidualFertility<T>,
) -> Result<Option<ReleaseThresholds<T>>> {
    rf.validate()?;
    let n = basic_offspring(ep)?;
    if n <= T::one() || rf.epsilon * n >= T::one() {
        return Ok(None);
    }
    let q = q_factor(ep, mu_a2)?;
    let two = T::lit(2.0);
    let centre = n + T::one() - two * rf.epsilon * n;
    let root = two * ((T::one() - rf.epsilon * n) * (T::one() - rf.epsilon) * n).sqrt();
    // centre - root rewritten as a ratio to avoid cancellation
    let lower = (centre * centre - root * root) / (centre + root);
    Ok(Some(ReleaseThresholds {
        beta: rf.beta,
        beta_m_t1: q * lower,
        beta_m_t2: q * (centre + root),
    }))
}

/// Standing sterile population at the post-release peak of the periodic
/// regime reached by releasing `bolus` every `tau` days.
pub fn standing_sterile<T: Scalar>(bolus: T, mu_s: T, tau: T) -> Result<T> {
    if !(mu_s > T::zero() && tau > T::zero()) {
        return Err(Error::invalid("standing population needs mu_S > 0 and tau > 0"));
    }
    Ok(bolus / (T::one() - (-mu_s * tau).exp()))
}

/// Componentwise minimum of the daily lower equilibria `E1(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuisanceBox<T> {
    pub a: T,
    pub m: T,
    pub f: T,
    /// Days contributing to the minimum.
    pub qualifying_days: usize,
    /// Days without a lower equilibrium.
    pub skipped_days: usize,
}

impl<T: Scalar> NuisanceBox<T> {
    /// Strict componentwise test `(a, m, f) < E1_min`.
    pub fn contains(&self, a: T, m: T, f: T) -> bool {
        a < self.a && m < self.m && f < self.f
    }
}

/// Lower equilibrium for the frozen coefficients of `day` under periodic
/// small releases, or `None` when it does not exist.
pub fn lower_equilibrium_on_day<T: Scalar>(
    params: &dyn DailyParams<T>,
    day: usize,
    rf: &ResidualFertility<T>,
    small_bolus: T,
    tau: usize,
) -> Result<Option<PopulationState<T>>> {
    let ep = params.ento(day);
    let mu_a2 = params.mu_a2(day);
    let n = basic_offspring(&ep)?;
    if n <= T::one() || rf.epsilon * n >= T::one() {
        return Ok(None);
    }
    let m_bar = standing_sterile(small_bolus, ep.mu_s, T::from_usize_lossy(tau))?;
    Ok(sit_equilibria(&ep, mu_a2, rf, m_bar)?.e1)
}

/// `E1_min` over `window`. Days where `eps >= 1/N(t)`, where the population
/// cannot persist, or where the small releases alone exceed the extinction
/// threshold have no `E1(t)` and are skipped.
pub fn e1_min_box<T: Scalar>(
    params: &dyn DailyParams<T>,
    window: Range<usize>,
    rf: &ResidualFertility<T>,
    small_bolus: T,
    tau: usize,
) -> Result<NuisanceBox<T>> {
    rf.validate()?;
    if window.is_empty() {
        return Err(Error::invalid("E1_min window is empty"));
    }
    let inf = T::infinity();
    let mut bx = NuisanceBox {
        a: inf,
        m: inf,
        f: inf,
        qualifying_days: 0,
        skipped_days: 0,
    };
    for day in window.clone() {
        match lower_equilibrium_on_day(params, day, rf, small_bolus, tau)? {
            Some(e1) => {
                bx.a = bx.a.min(e1.a);
                bx.m = bx.m.min(e1.m);
                bx.f = bx.f.min(e1.f);
                bx.qualifying_days += 1;
            }
            None => {
                log::debug!("day {day}: no lower equilibrium, skipped in E1_min");
                bx.skipped_days += 1;
            }
        }
    }
    if bx.qualifying_days == 0 {
        return Err(Error::NoLowerEquilibrium(format!(
            "days {}..{}: residual fertility {} too large or population not persistent",
            window.start, window.end, rf.epsilon
        )));
    }
    if bx.skipped_days > 0 {
        log::info!("E1_min: {} of {} days skipped", bx.skipped_days, window.len());
    }
    Ok(bx)
}
