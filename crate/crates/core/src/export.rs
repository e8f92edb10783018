//! Plot-ready CSV writers. Every file starts with `# key: value` comment
//! lines carrying the run metadata.

use std::io::Write;

use crate::environment::Environment;
use crate::epi_risk::r_eff;
use crate::equilibria::{release_thresholds, sit_equilibria, standing_sterile};
use crate::error::Result;
use crate::population::{PopulationState, ResidualFertility, Trajectory};
use crate::scalar::Scalar;
use crate::strategy::{ScanEntry, SummaryTable};

/// Metadata written as leading comment lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header {
    pub entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn write<W: Write>(&self, out: &mut W) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }
}

fn day_label<T: Scalar>(env: &Environment<T>, day: usize) -> String {
    env.date(day).map_or_else(|| day.to_string(), |d| d.to_string())
}

fn opt<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// `date,H,K,mu_A2` per day.
pub fn write_capacity_csv<T: Scalar, W: Write>(env: &Environment<T>, header: &Header, mut out: W) -> Result<()> {
    header.write(&mut out)?;
    writeln!(out, "date,H,K,mu_A2")?;
    for (d, p) in env.days().iter().enumerate() {
        writeln!(out, "{},{},{},{}", day_label(env, d), p.water, p.k, p.mu_a2)?;
    }
    Ok(())
}

/// `t,A,M,F,M_S` per sample.
pub fn write_trajectory_csv<T: Scalar, W: Write>(traj: &Trajectory<T, 4>, header: &Header, mut out: W) -> Result<()> {
    header.write(&mut out)?;
    writeln!(out, "t,A,M,F,M_S")?;
    for (t, y) in traj.days.iter().zip(&traj.states) {
        writeln!(out, "{t},{},{},{},{}", y[0], y[1], y[2], y[3])?;
    }
    Ok(())
}

/// `t,A,M,F,M_S,F_S,F_E,F_I,S_h,I_h,R_h` for the coupled model, `F` being
/// the total of the three female classes.
pub fn write_epi_trajectory_csv<T: Scalar, W: Write>(traj: &Trajectory<T, 9>, header: &Header, mut out: W) -> Result<()> {
    header.write(&mut out)?;
    writeln!(out, "t,A,M,F,M_S,F_S,F_E,F_I,S_h,I_h,R_h")?;
    for (t, y) in traj.days.iter().zip(&traj.states) {
        let [a, m, m_s, f_s, f_e, f_i, s_h, i_h, r_h] = *y;
        writeln!(
            out,
            "{t},{a},{m},{},{m_s},{f_s},{f_e},{f_i},{s_h},{i_h},{r_h}",
            f_s + f_e + f_i
        )?;
    }
    Ok(())
}

/// `date,A1,M1,F1,A2,M2,F2,MT1,MT2` per day for the standing sterile
/// population left by periodic releases of `small_bolus`. Missing
/// equilibria and thresholds are written as empty fields.
pub fn write_equilibria_csv<T: Scalar, W: Write>(
    env: &Environment<T>,
    rf: &ResidualFertility<T>,
    small_bolus: T,
    tau: usize,
    header: &Header,
    mut out: W,
) -> Result<()> {
    header.write(&mut out)?;
    writeln!(out, "date,A1,M1,F1,A2,M2,F2,MT1,MT2")?;
    for (d, p) in env.days().iter().enumerate() {
        let m_bar = standing_sterile(small_bolus, p.ento.mu_s, T::from_usize_lossy(tau))?;
        let persists = env.offspring(d)? > T::one();
        let (e1, e2, th) = if persists {
            let set = sit_equilibria(&p.ento, p.mu_a2, rf, m_bar)?;
            (set.e1, set.e2, release_thresholds(&p.ento, p.mu_a2, rf)?)
        } else {
            (None, None, None)
        };
        let triple = |e: Option<PopulationState<T>>| {
            format!("{},{},{}", opt(e.map(|s| s.a)), opt(e.map(|s| s.m)), opt(e.map(|s| s.f)))
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            day_label(env, d),
            triple(e1),
            triple(e2),
            opt(th.map(|t| t.m_t1())),
            opt(th.map(|t| t.m_t2()))
        )?;
    }
    Ok(())
}

/// `date,beta_mh,beta_hm,nu_m,F_threshold,R_eff`, with the effective
/// reproduction number evaluated at the supplied female levels (one per day).
pub fn write_epi_csv<T: Scalar, W: Write>(env: &Environment<T>, females: &[T], header: &Header, mut out: W) -> Result<()> {
    header.write(&mut out)?;
    writeln!(out, "date,beta_mh,beta_hm,nu_m,F_threshold,R_eff")?;
    for (d, p) in env.days().iter().enumerate() {
        let r = females.get(d).map(|&f| r_eff(f, &p.ento, &p.epi, &env.epi));
        writeln!(
            out,
            "{},{},{},{},{},{}",
            day_label(env, d),
            p.epi.beta_mh,
            p.epi.beta_hm,
            p.epi.nu_m,
            env.f_threshold(d),
            opt(r)
        )?;
    }
    Ok(())
}

/// `t0,n_massive,stop_date,total_males,objective_met`. Failed runs keep
/// their start date with empty fields and are listed in the header.
pub fn write_scan_csv<T: Scalar, W: Write>(
    env: &Environment<T>,
    entries: &[ScanEntry<T>],
    header: &Header,
    mut out: W,
) -> Result<()> {
    let mut header = header.clone();
    for e in entries {
        if let Err(err) = &e.outcome {
            header = header.with(format!("failed {}", day_label(env, e.t0)), err);
        }
    }
    header.write(&mut out)?;
    writeln!(out, "t0,n_massive,stop_date,total_males,objective_met")?;
    for e in entries {
        match &e.outcome {
            Ok(o) => writeln!(
                out,
                "{},{},{},{},{}",
                day_label(env, o.t0),
                o.n_massive,
                o.stop_day.map_or_else(String::new, |d| day_label(env, d)),
                o.total_sterile_males,
                o.objective_met
            )?,
            Err(_) => writeln!(out, "{},,,,", day_label(env, e.t0))?,
        }
    }
    Ok(())
}

/// One row per cell: mean release count over the start dates that met the
/// objective, its rounding, and the implied total of released males.
pub fn write_summary_csv<T: Scalar, W: Write>(table: &SummaryTable<T>, header: &Header, mut out: W) -> Result<()> {
    let mut header = header.clone();
    for note in &table.notes {
        header = header.with("omitted", note);
    }
    header.write(&mut out)?;
    writeln!(
        out,
        "cell,epsilon,mc_level,massive_rate,area,starts,met,mean_releases,releases,total_males"
    )?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.3},{},{}",
            r.label, r.epsilon, r.mc_level, r.massive_rate, r.area, r.starts, r.met, r.mean_releases, r.releases, r.total_males
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bio_params::RateSplines;
    use crate::environment::EnvironmentConfig;
    use crate::weather::read_weather_csv;

    fn env3() -> Environment<f64> {
        let src = "date,rain_mm,temp_c,humidity_pct\n2020-01-01,1.5,25,80\n2020-01-02,0,24.5,70\n2020-01-03,12,26,95\n";
        let s = read_weather_csv(src.as_bytes()).unwrap();
        Environment::from_weather(&s, &RateSplines::published(), &EnvironmentConfig::default()).unwrap()
    }

    #[test]
    fn capacity_rows_and_header() {
        let mut buf = Vec::new();
        let h = Header::new().with("evap_k", 0.001).with("H0", 6);
        write_capacity_csv(&env3(), &h, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# evap_k: 0.001");
        assert_eq!(lines[2], "date,H,K,mu_A2");
        assert_eq!(lines.len(), 6);
        assert!(lines[3].starts_with("2020-01-01,6,"));
    }

    #[test]
    fn equilibria_and_epi_rows() {
        let env = env3();
        let mut buf = Vec::new();
        write_equilibria_csv(&env, &ResidualFertility::default(), 2000.0, 7, &Header::new(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 9));

        let mut buf = Vec::new();
        write_epi_csv(&env, &[100.0, 100.0, 100.0], &Header::new(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 6 && !l.ends_with(',')));
    }
}
