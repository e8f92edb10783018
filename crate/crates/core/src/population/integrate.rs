use serde::{Deserialize, Serialize};

use super::Dynamics;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_STEPS_PER_DAY: usize = 20;

/// Negative values above this are rounding noise and are clamped to 0.
const NEGATIVE_TOLERANCE: f64 = -1e-9;

/// Largest `h * lambda` taken in one substep; RK4 is stable on the negative
/// real axis up to about 2.78.
const MAX_STEP_STIFFNESS: f64 = 1.0;

const MAX_SUBSTEPS: usize = 100_000;

/// Classical fourth-order Runge-Kutta with a fixed step of
/// `1 / steps_per_day` days, so day boundaries (and release instants) lie on
/// the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rk4 {
    pub steps_per_day: usize,
}

impl Default for Rk4 {
    fn default() -> Self {
        Self {
            steps_per_day: DEFAULT_STEPS_PER_DAY,
        }
    }
}

impl Rk4 {
    pub fn new(steps_per_day: usize) -> Result<Self> {
        if steps_per_day == 0 {
            return Err(Error::invalid("steps per day must be at least 1"));
        }
        Ok(Self { steps_per_day })
    }

    pub fn dt<T: Scalar>(&self) -> T {
        T::one() / T::from_usize_lossy(self.steps_per_day)
    }

    /// Advances `y` from the start of `day` to the start of `day + 1`.
    ///
    /// A mesh step whose stiffness estimate exceeds the stable range is
    /// split into equal substeps, so the mesh itself never moves.
    pub fn advance_day<T: Scalar, const N: usize, D: Dynamics<T, N> + ?Sized>(
        &self,
        sys: &D,
        day: usize,
        y: &mut [T; N],
    ) -> Result<()> {
        let h = self.dt::<T>();
        for step in 0..self.steps_per_day {
            let time = day as f64 + step as f64 / self.steps_per_day as f64;
            let lambda = sys.stiffness(day, y).as_f64();
            let split = (h.as_f64() * lambda / MAX_STEP_STIFFNESS).ceil();
            if !split.is_finite() || split > MAX_SUBSTEPS as f64 {
                return Err(Error::Numerical {
                    time,
                    message: format!("stiffness estimate {lambda:e} per day is out of range"),
                });
            }
            let split = (split as usize).max(1);
            let sub = h / T::from_usize_lossy(split);
            for _ in 0..split {
                rk4_step(sys, day, y, sub);
            }
            sanitize(y, time + 1.0 / self.steps_per_day as f64)?;
        }
        Ok(())
    }
}

fn rk4_step<T: Scalar, const N: usize, D: Dynamics<T, N> + ?Sized>(sys: &D, day: usize, y: &mut [T; N], h: T) {
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let k1 = sys.derivative(day, y);
    let k2 = sys.derivative(day, &axpy(y, half, &k1));
    let k3 = sys.derivative(day, &axpy(y, half, &k2));
    let k4 = sys.derivative(day, &axpy(y, h, &k3));
    for i in 0..N {
        y[i] += sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
}

fn axpy<T: Scalar, const N: usize>(y: &[T; N], a: T, x: &[T; N]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * x[i];
    }
    out
}

fn sanitize<T: Scalar, const N: usize>(y: &mut [T; N], time: f64) -> Result<()> {
    let tol = T::lit(NEGATIVE_TOLERANCE);
    for (i, v) in y.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::Numerical {
                time,
                message: format!("component {i} is not finite"),
            });
        }
        if *v < T::zero() {
            if *v < tol {
                return Err(Error::Numerical {
                    time,
                    message: format!("component {i} went negative ({v:e})"),
                });
            }
            *v = T::zero();
        }
    }
    Ok(())
}

/// Periodic releases starting on day `t0`: the first `massive_count` releases
/// carry `bolus` individuals, later ones `small_bolus`. With
/// `massive_count = None` every release is massive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulseSchedule<T> {
    pub t0: usize,
    pub tau: usize,
    pub massive_count: Option<usize>,
    pub bolus: T,
    pub small_bolus: T,
}

impl<T: Scalar> ImpulseSchedule<T> {
    pub fn new(t0: usize, tau: usize, massive_count: Option<usize>, bolus: T, small_bolus: T) -> Result<Self> {
        let s = Self {
            t0,
            tau,
            massive_count,
            bolus,
            small_bolus,
        };
        s.validate()?;
        Ok(s)
    }

    /// No releases at all.
    pub fn none() -> Self {
        Self {
            t0: 0,
            tau: 7,
            massive_count: Some(0),
            bolus: T::zero(),
            small_bolus: T::zero(),
        }
    }

    /// Constant bolus every `tau` days from `t0` onwards.
    pub fn periodic(t0: usize, tau: usize, bolus: T) -> Result<Self> {
        Self::new(t0, tau, None, bolus, T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(Error::invalid("release period tau must be at least one day"));
        }
        if !(self.bolus >= T::zero() && self.small_bolus >= T::zero()) {
            return Err(Error::invalid("release sizes must be non-negative"));
        }
        Ok(())
    }

    /// Index of the release falling on `day`, if any.
    pub fn release_index(&self, day: usize) -> Option<usize> {
        if day < self.t0 || !(day - self.t0).is_multiple_of(self.tau) {
            return None;
        }
        Some((day - self.t0) / self.tau)
    }

    /// Individuals released at the start of `day` (zero off-schedule).
    pub fn bolus_on(&self, day: usize) -> T {
        match self.release_index(day) {
            None => T::zero(),
            Some(k) if self.massive_count.is_none_or(|n| k < n) => self.bolus,
            Some(_) => self.small_bolus,
        }
    }
}

/// A release instant with the sterile compartment just before and after.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReleaseEvent<T> {
    pub day: usize,
    pub before: T,
    pub after: T,
}

/// Daily samples taken at day boundaries before any release of that day,
/// plus the release events.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T, const N: usize> {
    pub days: Vec<usize>,
    pub states: Vec<[T; N]>,
    pub releases: Vec<ReleaseEvent<T>>,
}

impl<T: Scalar, const N: usize> Trajectory<T, N> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&[T; N]> {
        self.states.last()
    }

    pub fn column(&self, i: usize) -> Vec<T> {
        self.states.iter().map(|s| s[i]).collect()
    }
}

/// Integrates `sys` from the start of `start_day` for `n_days` days,
/// applying the schedule's releases at day boundaries. Returns `n_days + 1`
/// samples.
pub fn integrate<T: Scalar, const N: usize, D: Dynamics<T, N> + ?Sized>(
    sys: &D,
    rk: &Rk4,
    y0: [T; N],
    start_day: usize,
    n_days: usize,
    schedule: &ImpulseSchedule<T>,
) -> Result<Trajectory<T, N>> {
    schedule.validate()?;
    if let Some(avail) = sys.n_days() {
        if start_day + n_days > avail {
            return Err(Error::invalid(format!(
                "integration to day {} exceeds the {avail} days of coefficients",
                start_day + n_days
            )));
        }
    }
    let mut y = y0;
    sanitize(&mut y, start_day as f64)?;
    let mut traj = Trajectory {
        days: Vec::with_capacity(n_days + 1),
        states: Vec::with_capacity(n_days + 1),
        releases: Vec::new(),
    };
    for day in start_day..start_day + n_days {
        traj.days.push(day);
        traj.states.push(y);
        let bolus = schedule.bolus_on(day);
        if bolus > T::zero() {
            let before = y[D::STERILE_INDEX];
            y[D::STERILE_INDEX] = before + bolus;
            traj.releases.push(ReleaseEvent {
                day,
                before,
                after: y[D::STERILE_INDEX],
            });
        }
        rk.advance_day(sys, day, &mut y)?;
    }
    traj.days.push(start_day + n_days);
    traj.states.push(y);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay(f64);

    impl Dynamics<f64, 2> for Decay {
        const STERILE_INDEX: usize = 1;
        fn derivative(&self, _day: usize, y: &[f64; 2]) -> [f64; 2] {
            [-self.0 * y[0], -self.0 * y[1]]
        }
    }

    struct Blowup;

    impl Dynamics<f64, 1> for Blowup {
        const STERILE_INDEX: usize = 0;
        fn derivative(&self, _day: usize, y: &[f64; 1]) -> [f64; 1] {
            [y[0] * y[0]]
        }
    }

    struct Sink;

    impl Dynamics<f64, 1> for Sink {
        const STERILE_INDEX: usize = 0;
        fn derivative(&self, _day: usize, _y: &[f64; 1]) -> [f64; 1] {
            [-1.0]
        }
    }

    #[test]
    fn exponential_decay_is_accurate() {
        let traj = integrate(&Decay(0.3), &Rk4::default(), [1.0, 2.0], 0, 10, &ImpulseSchedule::none()).unwrap();
        assert_eq!(traj.len(), 11);
        let exact = (-3.0f64).exp();
        assert!((traj.last().unwrap()[0] - exact).abs() < 1e-9);
    }

    #[test]
    fn release_is_an_exact_jump() {
        let sched = ImpulseSchedule::periodic(3, 7, 100.0).unwrap();
        let traj = integrate(&Decay(0.1), &Rk4::default(), [1.0, 0.0], 0, 20, &sched).unwrap();
        let days: Vec<usize> = traj.releases.iter().map(|e| e.day).collect();
        assert_eq!(days, vec![3, 10, 17]);
        for e in &traj.releases {
            assert_eq!(e.after, e.before + 100.0);
        }
        assert_eq!(traj.states[3][1], 0.0);
    }

    #[test]
    fn massive_then_small() {
        let s = ImpulseSchedule::new(10, 7, Some(2), 50.0, 5.0).unwrap();
        assert_eq!(s.bolus_on(9), 0.0);
        assert_eq!(s.bolus_on(10), 50.0);
        assert_eq!(s.bolus_on(11), 0.0);
        assert_eq!(s.bolus_on(17), 50.0);
        assert_eq!(s.bolus_on(24), 5.0);
        assert!(ImpulseSchedule::new(0, 0, None, 1.0, 0.0).is_err());
        assert!(ImpulseSchedule::new(0, 7, None, -1.0, 0.0).is_err());
    }

    #[test]
    fn blowup_reports_time() {
        match integrate(&Blowup, &Rk4::default(), [10.0], 5, 10, &ImpulseSchedule::none()) {
            Err(Error::Numerical { time, .. }) => assert!((5.0..6.0).contains(&time), "{time}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn large_negative_is_an_error() {
        assert!(integrate(&Sink, &Rk4::default(), [0.5], 0, 2, &ImpulseSchedule::none()).is_err());
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(Rk4::new(0).is_err());
    }
}
