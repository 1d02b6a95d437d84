use std::fmt;

use crate::dynamics::{Field, State};
use crate::error::{Error, Result};
use crate::integrate::{integrate_with, linear_period_guess, PeriodEstimate, PeriodSearch};
use crate::invariants::{observable_vector, ObservableVector};

use super::lift::{lift_rotating, LiftConfig, Lifted};
use super::measure::{average_drift, build_measure_with_period};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Reference,
    YoungMeasure,
    EquationFree,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Reference => "reference",
            Method::YoungMeasure => "young_measure",
            Method::EquationFree => "equation_free",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveConfig {
    /// Fast orbits sampled for the Young-measure average.
    pub averaging_periods: usize,
    /// Quadrature samples per fast period for the measure; the
    /// equation-free burst records at the same spacing.
    pub steps_per_period: usize,
    /// RK4 steps between consecutive samples.
    pub substeps: usize,
    /// Projective Euler step, in fast periods.
    pub euler_step_periods: usize,
    pub nu: f64,
    pub lift: LiftConfig,
    /// Re-estimate the fast period from every lifted state. When false the
    /// period found at the initial state is reused.
    pub reestimate_period: bool,
    pub period_threshold: f64,
}

impl Default for ProjectiveConfig {
    fn default() -> Self {
        Self {
            averaging_periods: 1,
            steps_per_period: 50,
            substeps: 8,
            euler_step_periods: 3,
            nu: 1e-4,
            lift: LiftConfig::default(),
            reestimate_period: true,
            period_threshold: PeriodSearch::DEFAULT_THRESHOLD,
        }
    }
}

impl ProjectiveConfig {
    /// Number of lattice components carried over by lifting.
    pub fn lift_fixed_count(n: usize) -> usize {
        n / 2 - 1
    }

    fn validate(&self) -> Result<()> {
        if self.averaging_periods == 0
            || self.steps_per_period < 2
            || self.substeps == 0
            || self.euler_step_periods == 0
        {
            return Err(Error::InvalidArgument(
                "averaging periods, steps per period, substeps and Euler step must be positive"
                    .into(),
            ));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu must be >= 0, got {}", self.nu)));
        }
        Ok(())
    }

    /// RK4 steps per fast period.
    pub fn integration_steps_per_period(&self) -> usize {
        self.steps_per_period * self.substeps
    }

    /// Search used for the first period estimate of a run.
    fn initial_search(&self, state: &State) -> PeriodSearch {
        let guess = linear_period_guess(state);
        PeriodSearch {
            horizon: 3.0 * guess,
            dt: guess / self.integration_steps_per_period() as f64,
            threshold: self.period_threshold,
        }
    }

    fn search_around(&self, period: f64) -> PeriodSearch {
        PeriodSearch {
            threshold: self.period_threshold,
            ..PeriodSearch::around(period, self.integration_steps_per_period())
        }
    }
}

/// Outcome of one projective step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveStep {
    /// Lifted state consistent with `observables`.
    pub state: State,
    /// Projected observables.
    pub observables: ObservableVector,
    /// Estimated `d v / dt` used for the projection.
    pub rate: Vec<f64>,
    /// Projective time step.
    pub dt: f64,
    /// Fast period used for averaging or the chord.
    pub period: f64,
    pub rhs_evals: u64,
    pub lift_iterations: usize,
    pub lift_residual: f64,
    /// Orbit samples passed over before one served as a lifting template;
    /// 0 when the final sample did.
    pub template_fallbacks: usize,
}

/// Lifts `v_old + step * rate`, trying `templates` in order until one lifts.
/// The first template's error is reported if none does. Returns the number
/// of templates passed over as well.
fn project_and_lift<'a>(
    v_old: &ObservableVector,
    rate: &[f64],
    step: f64,
    templates: impl IntoIterator<Item = &'a State>,
    cfg: &ProjectiveConfig,
) -> Result<(ObservableVector, Lifted, usize)> {
    let v_new = v_old.advanced(rate, step);
    let mut first_err = None;
    for (i, template) in templates.into_iter().enumerate() {
        match lift_rotating(&v_new, template, &cfg.lift) {
            Ok(lifted) => return Ok((v_new, lifted, i)),
            Err(e @ Error::InfeasibleTarget(_)) => return Err(e),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| Error::InvalidArgument("no lifting template".into())))
}

/// Young-measure projective step with a known period: the measure is built
/// over `averaging_periods * period` and the Euler step has length `step`.
///
/// The last orbit sample is the lifting template. Over long steps the torus
/// can shrink past the values it carries over, in which case the latest
/// earlier sample that lifts is used instead.
pub fn ym_projective_step_with(
    state: &State,
    cfg: &ProjectiveConfig,
    step: f64,
    period: f64,
) -> Result<ProjectiveStep> {
    cfg.validate()?;
    let v_old = observable_vector(state);
    let measure = build_measure_with_period(
        state,
        period,
        cfg.averaging_periods,
        cfg.steps_per_period,
        cfg.substeps,
    )?;
    let rate: Vec<f64> = average_drift(&measure).iter().map(|d| cfg.nu * d).collect();
    let (observables, lifted, fallbacks) =
        project_and_lift(&v_old, &rate, step, measure.samples().iter().rev(), cfg)?;
    Ok(ProjectiveStep {
        state: lifted.state,
        observables,
        rate,
        dt: step,
        period,
        rhs_evals: measure.rhs_evals,
        lift_iterations: lifted.iterations,
        lift_residual: lifted.residual,
        template_fallbacks: fallbacks,
    })
}

/// Equation-free projective step with a known period: the full system runs
/// for one `period` and the chord slope is projected over `step`. Lifting
/// starts from the end of the burst and falls back to earlier burst states
/// the same way as [`ym_projective_step_with`].
pub fn ef_projective_step_with(
    state: &State,
    cfg: &ProjectiveConfig,
    step: f64,
    period: f64,
) -> Result<ProjectiveStep> {
    cfg.validate()?;
    let v_start = observable_vector(state);
    let steps = cfg.integration_steps_per_period();
    let mut samples = Vec::with_capacity(cfg.steps_per_period);
    let (end, rhs_evals) = integrate_with(
        Field::Full { nu: cfg.nu },
        state,
        period / steps as f64,
        steps,
        |i, _, u| {
            if i > 0 && i < steps && i % cfg.substeps == 0 {
                samples.push(State::new(u.to_vec()).expect("stepper keeps states positive"));
            }
        },
    )?;
    let v_end = observable_vector(&end);
    let rate: Vec<f64> = v_end
        .as_slice()
        .iter()
        .zip(v_start.as_slice())
        .map(|(e, s)| (e - s) / period)
        .collect();
    let templates = std::iter::once(&end).chain(samples.iter().rev());
    let (observables, lifted, fallbacks) = project_and_lift(&v_start, &rate, step, templates, cfg)?;
    Ok(ProjectiveStep {
        state: lifted.state,
        observables,
        rate,
        dt: step,
        period,
        rhs_evals,
        lift_iterations: lifted.iterations,
        lift_residual: lifted.residual,
        template_fallbacks: fallbacks,
    })
}

/// The period estimate a run starting at `state` uses for its time grid.
pub fn initial_period(state: &State, cfg: &ProjectiveConfig) -> Result<PeriodEstimate> {
    cfg.initial_search(state).run(state)
}

fn estimate_initial_period(state: &State, cfg: &ProjectiveConfig) -> Result<(f64, u64)> {
    let est = initial_period(state, cfg)?;
    Ok((est.period, est.rhs_evals))
}

/// One Young-measure step of `euler_step_periods` periods, estimating the
/// period at `state`.
pub fn ym_projective_step(state: &State, cfg: &ProjectiveConfig) -> Result<ProjectiveStep> {
    let (period, evals) = estimate_initial_period(state, cfg)?;
    let mut out = ym_projective_step_with(state, cfg, cfg.euler_step_periods as f64 * period, period)?;
    out.rhs_evals += evals;
    Ok(out)
}

/// One equation-free step of `euler_step_periods` periods, estimating the
/// period at `state`.
pub fn ef_projective_step(state: &State, cfg: &ProjectiveConfig) -> Result<ProjectiveStep> {
    let (period, evals) = estimate_initial_period(state, cfg)?;
    let mut out = ef_projective_step_with(state, cfg, cfg.euler_step_periods as f64 * period, period)?;
    out.rhs_evals += evals;
    Ok(out)
}

/// Time-stamped observable vectors from one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub method: Method,
    pub times: Vec<f64>,
    pub values: Vec<ObservableVector>,
    /// Cumulative right-hand-side evaluations up to each entry.
    pub rhs_evals: Vec<u64>,
    /// Lifting residual per entry (zero where no lift happened).
    pub lift_residuals: Vec<f64>,
    /// Fast period in use at each entry (zero where not applicable).
    pub periods: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            times: Vec::new(),
            values: Vec::new(),
            rhs_evals: Vec::new(),
            lift_residuals: Vec::new(),
            periods: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, v: ObservableVector, rhs_evals: u64, lift_residual: f64, period: f64) {
        self.times.push(t);
        self.values.push(v);
        self.rhs_evals.push(rhs_evals);
        self.lift_residuals.push(lift_residual);
        self.periods.push(period);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn rhs_eval_count(&self) -> u64 {
        self.rhs_evals.last().copied().unwrap_or(0)
    }

    pub fn end_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Observables at `t` by linear interpolation between entries. Linear is
    /// the natural continuous extension of forward Euler.
    pub fn value_at(&self, t: f64) -> Option<ObservableVector> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        let tol = 1e-9 * last.abs().max(1.0);
        if t < first - tol || t > last + tol {
            return None;
        }
        let i = self.times.partition_point(|&x| x < t);
        if i < self.len() && (self.times[i] - t).abs() <= tol {
            return Some(self.values[i].clone());
        }
        if i == 0 {
            return Some(self.values[0].clone());
        }
        if i >= self.len() {
            return Some(self.values[self.len() - 1].clone());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        let a = self.values[i - 1].as_slice();
        let b = self.values[i].as_slice();
        Some(ObservableVector::new(
            a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect(),
        ))
    }
}

/// Runs `ceil(total_periods / euler_step_periods)` projective steps from
/// `state0`.
///
/// The projective time grid uses the period `P0` found at `state0`, so
/// checkpoints sit at whole multiples of `euler_step_periods * P0`. The
/// averaging window or chord follows the current period when
/// `cfg.reestimate_period` is set; a failed re-estimate keeps the previous
/// value. On a failed step the partial series is returned inside
/// [`Error::RunAborted`].
pub fn run_multiscale(
    method: Method,
    state0: &State,
    cfg: &ProjectiveConfig,
    total_periods: usize,
) -> Result<ObservableSeries> {
    cfg.validate()?;
    if method == Method::Reference {
        return Err(Error::InvalidArgument(
            "run_multiscale takes a projective method".into(),
        ));
    }
    let mut series = ObservableSeries::new(method);
    if total_periods == 0 {
        series.push(0.0, observable_vector(state0), 0, 0.0, 0.0);
        return Ok(series);
    }
    let (p0, mut evals) = estimate_initial_period(state0, cfg)?;
    series.push(0.0, observable_vector(state0), evals, 0.0, p0);

    let steps = total_periods.div_ceil(cfg.euler_step_periods);
    let dt = cfg.euler_step_periods as f64 * p0;
    let mut state = state0.clone();
    let mut period = p0;
    for k in 0..steps {
        let attempt = (|| {
            if cfg.reestimate_period && k > 0 {
                match cfg.search_around(period).run(&state) {
                    Ok(est) => {
                        period = est.period;
                        evals += est.rhs_evals;
                    }
                    Err(Error::NoReturnFound { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            match method {
                Method::YoungMeasure => ym_projective_step_with(&state, cfg, dt, period),
                _ => ef_projective_step_with(&state, cfg, dt, period),
            }
        })();
        match attempt {
            Ok(step) => {
                evals += step.rhs_evals;
                series.push((k + 1) as f64 * dt, step.observables, evals, step.lift_residual, period);
                state = step.state;
            }
            Err(source) => {
                return Err(Error::RunAborted {
                    step: k,
                    partial: Box::new(series),
                    source: Box::new(source),
                })
            }
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(u: &[f64]) -> State {
        State::new(u.to_vec()).unwrap()
    }

    #[test]
    fn zero_drift_keeps_observables() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let cfg = ProjectiveConfig {
            nu: 0.0,
            ..ProjectiveConfig::default()
        };
        let v0 = observable_vector(&s);
        let step = ym_projective_step(&s, &cfg).unwrap();
        assert_eq!(step.observables, v0);
        assert!(observable_vector(&step.state).max_rel_diff(&v0) <= 1e-10);

        let step = ef_projective_step(&s, &cfg).unwrap();
        assert!(step.rate.iter().all(|r| r.abs() < 1e-6), "{:?}", step.rate);
        assert!(step.observables.max_rel_diff(&v0) < 1e-6);
    }

    #[test]
    fn mass_is_never_projected() {
        let s = st(&[1., 1., 1., 1., 4., 1.]);
        let cfg = ProjectiveConfig {
            nu: 1e-3,
            ..ProjectiveConfig::default()
        };
        let step = ym_projective_step(&s, &cfg).unwrap();
        assert_eq!(step.rate[0], 0.0);
        assert_eq!(step.observables.v(1), observable_vector(&s).v(1));
        let step = ef_projective_step(&s, &cfg).unwrap();
        assert!(step.rate[0].abs() < 1e-12);
    }

    #[test]
    fn young_measure_step_tracks_the_full_system() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let cfg = ProjectiveConfig::default();
        let step = ym_projective_step(&s, &cfg).unwrap();
        let n = 3 * cfg.integration_steps_per_period();
        let (end, _) = integrate_with(Field::Full { nu: cfg.nu }, &s, step.dt / n as f64, n, |_, _, _| {}).unwrap();
        let (v0, vr) = (observable_vector(&s), observable_vector(&end));
        for j in 2..=4 {
            let want = vr.v(j) - v0.v(j);
            let got = step.observables.v(j) - v0.v(j);
            assert!((got - want).abs() < 0.1 * want.abs(), "v_{j}: {got} vs {want}");
        }
        assert!(observable_vector(&step.state).max_rel_diff(&step.observables) <= 1e-10);
    }

    #[test]
    fn chord_slope_matches_averaged_drift() {
        let s = st(&[1., 1., 1., 1., 4., 1.]);
        let cfg = ProjectiveConfig::default();
        let ef = ef_projective_step(&s, &cfg).unwrap();
        let ym = ym_projective_step(&s, &cfg).unwrap();
        assert!((ef.rate[2] - ym.rate[2]).abs() < 0.15 * ym.rate[2].abs(), "{} vs {}", ef.rate[2], ym.rate[2]);
    }

    #[test]
    fn zero_periods_gives_initial_point_only() {
        let s = st(&[1., 1., 1., 1., 4., 1.]);
        let series = run_multiscale(Method::YoungMeasure, &s, &ProjectiveConfig::default(), 0).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series.values[0], observable_vector(&s));
        assert_eq!(series.rhs_eval_count(), 0);
    }

    #[test]
    fn runs_are_deterministic() {
        let s = st(&[1., 1., 1., 1., 4., 1.]);
        let cfg = ProjectiveConfig::default();
        let a = run_multiscale(Method::EquationFree, &s, &cfg, 30).unwrap();
        let b = run_multiscale(Method::EquationFree, &s, &cfg, 30).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 11);
        assert!(a.rhs_evals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn series_interpolation() {
        let mut s = ObservableSeries::new(Method::YoungMeasure);
        s.push(0.0, ObservableVector::new(vec![1.0, 2.0]), 0, 0.0, 0.0);
        s.push(2.0, ObservableVector::new(vec![3.0, 2.0]), 0, 0.0, 0.0);
        assert_eq!(s.value_at(1.0).unwrap().as_slice(), &[2.0, 2.0]);
        assert_eq!(s.value_at(2.0).unwrap().as_slice(), &[3.0, 2.0]);
        assert!(s.value_at(2.5).is_none());
    }

    #[test]
    fn reference_is_not_a_projective_method() {
        let s = st(&[1., 1., 1., 1., 4., 1.]);
        assert!(run_multiscale(Method::Reference, &s, &ProjectiveConfig::default(), 3).is_err());
    }
}
