//! Empirical invariant measures sampled along fast orbits.

use crate::dynamics::{Field, State};
use crate::error::{Error, Result};
use crate::integrate::{integrate_with, PeriodSearch};
use crate::invariants::{drift_integrands, observable_vector, ObservableVector};

use super::ProjectiveConfig;

/// Equally weighted states at uniform `sigma` spacing along one fast orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    samples: Vec<State>,
    /// Fast period the sampling window was built from.
    pub period: f64,
    /// Spacing between samples.
    pub dt: f64,
    /// Right-hand-side evaluations spent building the measure, including any
    /// period estimation.
    pub rhs_evals: u64,
}

impl EmpiricalMeasure {
    pub fn samples(&self) -> &[State] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    pub fn last(&self) -> &State {
        self.samples.last().expect("measure has at least two samples")
    }

    /// Largest relative deviation of any sample's observables from the first
    /// sample's.
    pub fn observable_spread(&self) -> f64 {
        let v0 = observable_vector(&self.samples[0]);
        self.samples
            .iter()
            .map(|s| observable_vector(s).max_rel_diff(&v0))
            .fold(0.0, f64::max)
    }

    /// Uniform average of `f` over the samples.
    pub fn average<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&State) -> Vec<f64>,
    {
        let mut acc: Vec<f64> = Vec::new();
        for s in &self.samples {
            let x = f(s);
            if acc.is_empty() {
                acc = vec![0.0; x.len()];
            }
            for (a, b) in acc.iter_mut().zip(&x) {
                *a += b;
            }
        }
        let w = self.weight();
        acc.iter_mut().for_each(|a| *a *= w);
        acc
    }
}

/// Samples `averaging_periods * steps_per_period` states of the fast flow
/// from `state0`, estimating the period first.
pub fn build_measure(state0: &State, cfg: &ProjectiveConfig) -> Result<EmpiricalMeasure> {
    let mut search = PeriodSearch::for_state(state0);
    search.threshold = cfg.period_threshold;
    let est = search.run(state0)?;
    let mut m = build_measure_with_period(
        state0,
        est.period,
        cfg.averaging_periods,
        cfg.steps_per_period,
        cfg.substeps,
    )?;
    m.rhs_evals += est.rhs_evals;
    Ok(m)
}

/// As [`build_measure`] with a known period. Samples are `period /
/// steps_per_period` apart; the fast flow between samples is integrated with
/// `substeps` RK4 steps.
pub fn build_measure_with_period(
    state0: &State,
    period: f64,
    averaging_periods: usize,
    steps_per_period: usize,
    substeps: usize,
) -> Result<EmpiricalMeasure> {
    let count = averaging_periods * steps_per_period;
    if count < 2 || substeps == 0 || !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "measure needs >= 2 samples, >= 1 substep and a positive period \
             (got {count} samples, {substeps} substeps, period {period})"
        )));
    }
    let dt = period / steps_per_period as f64;
    let h = dt / substeps as f64;
    let mut samples = Vec::with_capacity(count);
    // left Riemann sum: sigma = 0, dt, ..., (count - 1) dt
    let (_, rhs_evals) = integrate_with(Field::Fast, state0, h, (count - 1) * substeps, |i, _, u| {
        if i % substeps == 0 {
            samples.push(State::new(u.to_vec()).expect("stepper keeps states positive"));
        }
    })?;
    Ok(EmpiricalMeasure {
        samples,
        period,
        dt,
        rhs_evals,
    })
}

/// Measure average of `grad v_j . D` for every `j`, without the `nu` factor.
/// Entry 1 is exactly zero.
pub fn average_drift(measure: &EmpiricalMeasure) -> Vec<f64> {
    measure.average(drift_integrands)
}

/// Observable vector averaged over the measure.
pub fn average_observables(measure: &EmpiricalMeasure) -> ObservableVector {
    ObservableVector::new(measure.average(|s| observable_vector(s).into_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(u: &[f64]) -> State {
        State::new(u.to_vec()).unwrap()
    }

    #[test]
    fn constant_state_has_no_measure() {
        let cfg = ProjectiveConfig::default();
        assert!(matches!(
            build_measure(&st(&[1.0; 6]), &cfg),
            Err(Error::FixedPoint { .. })
        ));
    }

    #[test]
    fn samples_lie_on_one_invariant_set() {
        let cfg = ProjectiveConfig {
            averaging_periods: 1,
            steps_per_period: 50,
            ..ProjectiveConfig::default()
        };
        let m = build_measure(&st(&[1., 1., 1., 3., 2., 1.]), &cfg).unwrap();
        assert_eq!(m.len(), 50);
        assert!((m.weight() - 0.02).abs() < 1e-15);
        assert!(m.observable_spread() < 1e-6, "{}", m.observable_spread());
    }

    #[test]
    fn drift_of_mass_is_exactly_zero() {
        let m = build_measure_with_period(&st(&[1., 1., 1., 1., 4., 1.]), 2.63, 2, 50, 8).unwrap();
        let d = average_drift(&m);
        assert_eq!(d.len(), 4);
        assert_eq!(d[0], 0.0);
        assert!(d.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn refining_the_quadrature_barely_moves_the_drift() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let coarse = average_drift(&build_measure_with_period(&s, 2.494, 1, 50, 8).unwrap());
        let fine = average_drift(&build_measure_with_period(&s, 2.494, 1, 100, 8).unwrap());
        for j in 1..4 {
            let rel = (coarse[j] - fine[j]).abs() / fine[j].abs();
            assert!(rel < 0.01, "j={} {} vs {}", j + 1, coarse[j], fine[j]);
        }
    }

    #[test]
    fn richer_quadrature_agrees() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let base = average_drift(&build_measure_with_period(&s, 2.494, 1, 50, 8).unwrap());
        let rich = average_drift(&build_measure_with_period(&s, 2.494, 4, 200, 2).unwrap());
        for j in 1..4 {
            let rel = (base[j] - rich[j]).abs() / rich[j].abs();
            assert!(rel < 0.02, "j={} {} vs {}", j + 1, base[j], rich[j]);
        }
    }

    #[test]
    fn rejects_degenerate_windows() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        assert!(build_measure_with_period(&s, 2.5, 1, 1, 8).is_err());
        assert!(build_measure_with_period(&s, -1.0, 1, 50, 8).is_err());
        assert!(build_measure_with_period(&s, 2.5, 1, 50, 0).is_err());
    }
}
