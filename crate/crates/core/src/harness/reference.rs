use crate::dynamics::{Field, State};
use crate::error::{Error, Result};
use crate::integrate::{integrate_with, step_count, RHS_PER_STEP};
use crate::invariants::observable_vector;
use crate::multiscale::{Method, ObservableSeries};

/// Direct RK4 integration of the full system, recording observables every
/// `sample_every` steps and after the last step.
///
/// Runs the whole number of `dt` steps that fit in `t_end`; the series ends
/// at that time.
pub fn run_reference(
    state0: &State,
    nu: f64,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<ObservableSeries> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "reference runs need nu > 0, got {nu}"
        )));
    }
    reference_series(state0, nu, t_end, dt, sample_every)
}

/// [`run_reference`] without the `nu > 0` precondition, so that a `nu = 0`
/// table still has something to compare against.
pub(crate) fn reference_series(
    state0: &State,
    nu: f64,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<ObservableSeries> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {t_end}")));
    }
    if sample_every == 0 {
        return Err(Error::InvalidArgument("sample_every must be >= 1".into()));
    }
    let steps = if dt > 0.0 { step_count(t_end, dt) } else { 0 };
    let mut series = ObservableSeries::new(Method::Reference);
    let mut push = |i: usize, u: &[f64]| {
        let s = State::new(u.to_vec()).expect("stepper keeps states positive");
        series.push(i as f64 * dt, observable_vector(&s), i as u64 * RHS_PER_STEP, 0.0, 0.0);
    };
    integrate_with(Field::Full { nu }, state0, dt, steps, |i, _, u| {
        if i % sample_every == 0 || i == steps {
            push(i, u);
        }
    })?;
    Ok(series)
}
