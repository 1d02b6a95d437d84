use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::multiscale::{initial_period, run_multiscale, Method, ObservableSeries, ProjectiveConfig};

use super::reference::run_reference;

/// Right-hand-side evaluation counts of a direct and a multiscale run over
/// the same horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub rhs_evals_direct: u64,
    pub rhs_evals_multiscale: u64,
    /// `rhs_evals_direct / rhs_evals_multiscale`.
    pub speedup: f64,
    pub horizon: f64,
    /// Largest relative difference in `v_2..` between the multiscale series
    /// and the direct one, over the multiscale time points.
    pub max_rel_deviation: f64,
}

impl CostReport {
    pub fn render(&self) -> String {
        format!(
            "horizon {:.2}: direct {} rhs evals, multiscale {} rhs evals, speedup {:.2}, \
             max relative deviation {:.3e}",
            self.horizon,
            self.rhs_evals_direct,
            self.rhs_evals_multiscale,
            self.speedup,
            self.max_rel_deviation
        )
    }
}

pub fn cost_report(reference: &ObservableSeries, multiscale: &ObservableSeries) -> Result<CostReport> {
    let (tr, tm) = (reference.end_time(), multiscale.end_time());
    if reference.is_empty() || multiscale.is_empty() || (tr - tm).abs() > 1e-9 * tr.abs().max(1.0) {
        return Err(Error::HorizonMismatch {
            reference: tr,
            multiscale: tm,
        });
    }
    let (direct, ms) = (reference.rhs_eval_count(), multiscale.rhs_eval_count());
    if ms == 0 {
        return Err(Error::InvalidArgument(
            "multiscale series records no right-hand-side evaluations".into(),
        ));
    }
    let mut dev: f64 = 0.0;
    for (t, v) in multiscale.times.iter().zip(&multiscale.values) {
        if let Some(r) = reference.value_at(*t) {
            for (a, b) in v.as_slice()[1..].iter().zip(&r.as_slice()[1..]) {
                dev = dev.max((a - b).abs() / b.abs());
            }
        }
    }
    Ok(CostReport {
        rhs_evals_direct: direct,
        rhs_evals_multiscale: ms,
        speedup: direct as f64 / ms as f64,
        horizon: tr,
        max_rel_deviation: dev,
    })
}

/// Time for the slowest diffusive lattice mode, decay rate
/// `nu (2 - 2 cos(2 pi / N))`, to shrink by `factor`.
pub fn decay_horizon(n: usize, nu: f64, factor: f64) -> f64 {
    let lambda = 2.0 - 2.0 * (2.0 * PI / n as f64).cos();
    factor.ln() / (nu * lambda)
}

/// Cost comparison of direct integration against Young-measure projective
/// integration until diffusion has decayed by `decay_factor`.
///
/// Both sides resolve a fast period with `steps_per_period` RK4 steps. The
/// projective side takes at most `max_projective_steps` Euler steps, each
/// averaging over `averaging_periods` periods; period detection is charged
/// to it as well.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupScenario {
    pub state0: State,
    pub nu: f64,
    pub decay_factor: f64,
    pub steps_per_period: usize,
    pub max_projective_steps: usize,
    pub averaging_periods: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRun {
    pub scenario: SpeedupScenario,
    pub period: f64,
    pub target_horizon: f64,
    pub euler_step_periods: usize,
    pub projective_steps: usize,
    pub report: CostReport,
}

impl SpeedupScenario {
    /// Decay by `1e5` at 50 steps per period with under 100 projective steps,
    /// from `[1,1,1,3,2,1]`.
    pub fn worked_example(nu: f64) -> Self {
        Self {
            state0: State::new(vec![1., 1., 1., 3., 2., 1.]).expect("valid state"),
            nu,
            decay_factor: 1e5,
            steps_per_period: 50,
            max_projective_steps: 100,
            averaging_periods: 1,
        }
    }

    pub fn run(&self) -> Result<SpeedupRun> {
        if self.max_projective_steps == 0 || !(self.decay_factor > 1.0) {
            return Err(Error::InvalidArgument(
                "need a positive step budget and a decay factor above 1".into(),
            ));
        }
        let mut cfg = ProjectiveConfig {
            averaging_periods: self.averaging_periods,
            steps_per_period: self.steps_per_period,
            substeps: 1,
            nu: self.nu,
            ..ProjectiveConfig::default()
        };
        let period = initial_period(&self.state0, &cfg)?.period;
        let target = decay_horizon(self.state0.len(), self.nu, self.decay_factor);
        let total = (target / period).ceil() as usize;
        let k = total.div_ceil(self.max_projective_steps).max(1);
        cfg.euler_step_periods = k;
        let steps = total.div_ceil(k);

        let ms = run_multiscale(Method::YoungMeasure, &self.state0, &cfg, steps * k)?;
        let dt = period / self.steps_per_period as f64;
        let direct = run_reference(&self.state0, self.nu, ms.end_time(), dt, self.steps_per_period)?;
        Ok(SpeedupRun {
            scenario: self.clone(),
            period,
            target_horizon: target,
            euler_step_periods: k,
            projective_steps: steps,
            report: cost_report(&direct, &ms)?,
        })
    }
}

impl SpeedupRun {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let s = &self.scenario;
        let _ = writeln!(
            out,
            "nu = {:e}, decay by {:e} needs t = {:.1}; period {:.4}, {} steps/period",
            s.nu, s.decay_factor, self.target_horizon, self.period, s.steps_per_period
        );
        let _ = writeln!(
            out,
            "{} projective steps of {} periods, {} averaging period(s) each",
            self.projective_steps, self.euler_step_periods, s.averaging_periods
        );
        out.push_str(&self.report.render());
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::ObservableVector;

    fn series(method: Method, pts: &[(f64, u64)]) -> ObservableSeries {
        let mut s = ObservableSeries::new(method);
        for &(t, e) in pts {
            s.push(t, ObservableVector::new(vec![6.0, 12.0 + t, 40.0, 1.0]), e, 0.0, 0.0);
        }
        s
    }

    #[test]
    fn identical_series_break_even() {
        let a = series(Method::YoungMeasure, &[(0.0, 10), (5.0, 90)]);
        let r = cost_report(&a, &a).unwrap();
        assert_eq!(r.speedup, 1.0);
        assert_eq!(r.max_rel_deviation, 0.0);
    }

    #[test]
    fn speedup_is_the_count_ratio() {
        let d = series(Method::Reference, &[(0.0, 0), (2.5, 500), (5.0, 1000)]);
        let m = series(Method::YoungMeasure, &[(0.0, 20), (5.0, 250)]);
        let r = cost_report(&d, &m).unwrap();
        assert_eq!(r.speedup, 4.0);
        assert_eq!(r.horizon, 5.0);
    }

    #[test]
    fn horizons_must_match() {
        let d = series(Method::Reference, &[(0.0, 0), (4.0, 1000)]);
        let m = series(Method::YoungMeasure, &[(0.0, 20), (5.0, 250)]);
        assert!(matches!(cost_report(&d, &m), Err(Error::HorizonMismatch { .. })));
    }

    #[test]
    fn decay_horizon_for_six_sites() {
        // the slowest mode of a six-site ring decays at rate nu
        assert!((decay_horizon(6, 1e-3, 1e5) - 1e5f64.ln() * 1e3).abs() < 1e-6);
    }
}
