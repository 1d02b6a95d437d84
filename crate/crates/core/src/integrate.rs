//! Fixed-step classical RK4, trajectory recording and fast-period detection.

use std::f64::consts::PI;

use crate::dynamics::{check_positive, Field, State};
use crate::error::{Error, Result};

/// Right-hand-side evaluations per RK4 step.
pub const RHS_PER_STEP: u64 = 4;

/// Reusable RK4 stepper working on plain slices.
#[derive(Debug, Clone)]
pub struct Rk4 {
    field: Field,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
    rhs_evals: u64,
}

impl Rk4 {
    pub fn new(field: Field, n: usize) -> Self {
        Self {
            field,
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
            rhs_evals: 0,
        }
    }

    pub fn rhs_evals(&self) -> u64 {
        self.rhs_evals
    }

    /// Advances `u` in place by one step. Positivity is not checked here.
    pub fn step(&mut self, u: &mut [f64], dt: f64) {
        let n = u.len();
        self.field.eval_into(u, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = u[i] + 0.5 * dt * self.k1[i];
        }
        self.field.eval_into(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = u[i] + 0.5 * dt * self.k2[i];
        }
        self.field.eval_into(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = u[i] + dt * self.k3[i];
        }
        self.field.eval_into(&self.tmp, &mut self.k4);
        for i in 0..n {
            u[i] += dt / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        self.rhs_evals += RHS_PER_STEP;
    }

    /// Like [`Rk4::step`], then re-validates positivity.
    pub fn checked_step(&mut self, u: &mut [f64], dt: f64, t_after: f64) -> Result<()> {
        self.step(u, dt);
        check_positive(u).map_err(|e| match e {
            Error::NonPositive { index, value } => Error::PositivityLost {
                time: t_after,
                index,
                value,
            },
            other => other,
        })
    }
}

/// One RK4 step of `field` from `state`.
pub fn rk4_step(field: Field, state: &State, dt: f64) -> Result<State> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let mut u = state.as_slice().to_vec();
    Rk4::new(field, u.len()).checked_step(&mut u, dt, dt)?;
    State::new(u)
}

/// Integrates `steps` fixed steps, calling `visit(step_index, time, u)` for
/// the initial point and after every step. Returns the final state and the
/// number of right-hand-side evaluations.
pub fn integrate_with<F>(
    field: Field,
    state0: &State,
    dt: f64,
    steps: usize,
    mut visit: F,
) -> Result<(State, u64)>
where
    F: FnMut(usize, f64, &[f64]),
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let mut u = state0.as_slice().to_vec();
    let mut rk = Rk4::new(field, u.len());
    visit(0, 0.0, &u);
    for i in 1..=steps {
        let t = i as f64 * dt;
        rk.checked_step(&mut u, dt, t)?;
        visit(i, t, &u);
    }
    Ok((State::new(u)?, rk.rhs_evals()))
}

/// Sampled solution of one integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub dt: f64,
    pub field: Field,
    /// State after the last step, which need not coincide with a sample.
    pub final_state: State,
    pub final_time: f64,
    pub rhs_evals: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Number of whole steps of size `dt` that fit in `t_end`, tolerating
/// roundoff in `t_end / dt`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    let r = t_end / dt;
    (r + 1e-9 * r.max(1.0)).floor() as usize
}

pub fn integrate_record(
    field: Field,
    state0: &State,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {t_end}")));
    }
    if sample_every == 0 {
        return Err(Error::InvalidArgument("sample_every must be >= 1".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let steps = step_count(t_end, dt);
    let mut times = Vec::with_capacity(steps / sample_every + 1);
    let mut states = Vec::with_capacity(steps / sample_every + 1);
    let (final_state, rhs_evals) = integrate_with(field, state0, dt, steps, |i, t, u| {
        if i % sample_every == 0 {
            times.push(t);
            // positivity was checked by the stepper
            states.push(State::new(u.to_vec()).expect("positive state"));
        }
    })?;
    Ok(Trajectory {
        times,
        states,
        dt,
        field,
        final_state,
        final_time: steps as f64 * dt,
        rhs_evals,
    })
}

/// Approximate return time of a fast orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate {
    pub period: f64,
    /// `|A(period) - A(0)| / |A(0)|` at the refined minimum, `A = sqrt(U)`.
    pub return_distance: f64,
    /// Set when the return distance is under half the threshold.
    pub confident: bool,
    pub rhs_evals: u64,
}

/// Search settings for [`estimate_fast_period`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodSearch {
    pub horizon: f64,
    pub dt: f64,
    pub threshold: f64,
}

impl PeriodSearch {
    pub const DEFAULT_THRESHOLD: f64 = 0.1;

    /// Settings scaled to the small-oscillation period of the lowest lattice
    /// mode about the mean, `2 pi / (2 mean sin(2 pi / N))`.
    pub fn for_state(state: &State) -> Self {
        let guess = linear_period_guess(state);
        Self {
            horizon: 3.0 * guess,
            dt: guess / 1000.0,
            threshold: Self::DEFAULT_THRESHOLD,
        }
    }

    /// Settings around a known period, resolved with `steps_per_period`.
    pub fn around(period: f64, steps_per_period: usize) -> Self {
        Self {
            horizon: 1.6 * period,
            dt: period / steps_per_period as f64,
            threshold: Self::DEFAULT_THRESHOLD,
        }
    }

    pub fn run(&self, state0: &State) -> Result<PeriodEstimate> {
        estimate_fast_period(state0, self.horizon, self.dt, self.threshold)
    }
}

pub fn linear_period_guess(state: &State) -> f64 {
    let n = state.len() as f64;
    2.0 * PI / (2.0 * state.mean() * (2.0 * PI / n).sin())
}

/// Nearest-return period of the fast flow through `state0`.
///
/// Distances are measured in the Lax coordinates `A = sqrt(U)`, so
/// `d(sigma) = |A(sigma) - A(0)| / |A(0)|` is the relative Frobenius distance
/// between `L(sigma)` and `L(0)`. Skips the first `10 dt`, takes the first
/// local minimum below `threshold` and refines it with a parabola through the
/// squared distances of the three neighbouring samples.
pub fn estimate_fast_period(
    state0: &State,
    search_horizon: f64,
    dt: f64,
    threshold: f64,
) -> Result<PeriodEstimate> {
    if !(dt > 0.0 && search_horizon > 0.0 && threshold > 0.0) {
        return Err(Error::InvalidArgument(
            "period search needs positive horizon, dt and threshold".into(),
        ));
    }
    let u0 = state0.as_slice();
    let f = Field::Fast.eval(state0);
    let rhs_norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    if rhs_norm <= 1e-12 * state0.norm().powi(2) {
        return Err(Error::FixedPoint { rhs_norm });
    }

    let exclusion = 10;
    let steps = step_count(search_horizon, dt);
    let a0: Vec<f64> = u0.iter().map(|x| x.sqrt()).collect();
    let a_norm_sq: f64 = u0.iter().sum();
    let mut u = u0.to_vec();
    let mut rk = Rk4::new(Field::Fast, u.len());
    let sq_dist = |u: &[f64]| {
        u.iter()
            .zip(&a0)
            .map(|(x, a)| (x.sqrt() - a).powi(2))
            .sum::<f64>()
            / a_norm_sq
    };
    // squared distances at steps i-2, i-1, i
    let mut q = [f64::INFINITY; 3];
    let mut best = f64::INFINITY;
    for i in 1..=steps {
        rk.checked_step(&mut u, dt, i as f64 * dt)?;
        q = [q[1], q[2], sq_dist(&u)];
        let centre = i - 1;
        if centre <= exclusion {
            continue;
        }
        best = best.min(q[1]);
        if q[0] > q[1] && q[1] <= q[2] && q[1].sqrt() < threshold {
            let curvature = q[0] - 2.0 * q[1] + q[2];
            let (offset, q_min) = if curvature > 0.0 {
                let off = 0.5 * (q[0] - q[2]) / curvature;
                (off, q[1] - 0.25 * (q[0] - q[2]) * off)
            } else {
                (0.0, q[1])
            };
            let return_distance = q_min.max(0.0).sqrt();
            return Ok(PeriodEstimate {
                period: (centre as f64 + offset) * dt,
                return_distance,
                confident: return_distance <= 0.5 * threshold,
                rhs_evals: rk.rhs_evals(),
            });
        }
    }
    Err(Error::NoReturnFound {
        horizon: search_horizon,
        threshold,
        best: best.sqrt(),
    })
}

/// Mean spacing between successive maxima of `U_1` over `horizon`.
/// Diagnostic only: a projection of a torus winding, so it may disagree with
/// the nearest-return period.
pub fn peak_period_u1(state0: &State, horizon: f64, dt: f64) -> Result<Option<f64>> {
    let mut window = [f64::NAN; 3];
    let mut peaks = Vec::new();
    integrate_with(Field::Fast, state0, dt, step_count(horizon, dt), |i, _, u| {
        window = [window[1], window[2], u[0]];
        if i >= 2 && window[0] < window[1] && window[1] >= window[2] {
            let curvature = window[0] - 2.0 * window[1] + window[2];
            let off = if curvature < 0.0 {
                0.5 * (window[0] - window[2]) / curvature
            } else {
                0.0
            };
            peaks.push(((i - 1) as f64 + off) * dt);
        }
    })?;
    if peaks.len() < 2 {
        return Ok(None);
    }
    Ok(Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::observable_vector;
    use proptest::prelude::*;

    fn st(u: &[f64]) -> State {
        State::new(u.to_vec()).unwrap()
    }

    #[test]
    fn constant_state_is_stationary() {
        let s = st(&[1.7; 6]);
        assert_eq!(rk4_step(Field::Fast, &s, 0.3).unwrap(), s);
        assert_eq!(rk4_step(Field::Full { nu: 0.2 }, &s, 0.3).unwrap(), s);
    }

    #[test]
    fn rk4_local_error_is_fifth_order() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let reference = |h: f64| {
            let fine = h / 8.0;
            let mut u = s.clone();
            for _ in 0..8 {
                u = rk4_step(Field::Fast, &u, fine).unwrap();
            }
            u
        };
        let err = |h: f64| {
            let a = rk4_step(Field::Fast, &s, h).unwrap();
            let b = reference(h);
            a.as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 32.0).abs() < 0.25 * 32.0, "ratio {ratio}");
    }

    #[test]
    fn full_step_conserves_mass() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let next = rk4_step(Field::Full { nu: 0.3 }, &s, 0.01).unwrap();
        assert!((next.mass() - s.mass()).abs() <= 1e-13 * s.mass());
    }

    #[test]
    fn positivity_loss_is_reported() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let err = rk4_step(Field::Fast, &s, 5.0).unwrap_err();
        assert!(matches!(err, Error::PositivityLost { .. }), "{err}");
        assert!(rk4_step(Field::Fast, &s, 0.0).is_err());
    }

    #[test]
    fn zero_length_request() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let tr = integrate_record(Field::Fast, &s, 0.0005, 0.001, 1).unwrap();
        assert_eq!(tr.states, vec![s.clone()]);
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.final_state, s);
        assert_eq!(tr.rhs_evals, 0);
    }

    #[test]
    fn sampling_layout() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let tr = integrate_record(Field::Fast, &s, 1.0, 0.01, 10).unwrap();
        assert_eq!(tr.len(), 11);
        assert!((tr.final_time - 1.0).abs() < 1e-12);
        assert_eq!(tr.rhs_evals, 400);
        for w in tr.times.windows(2) {
            assert!((w[1] - w[0] - 0.1).abs() < 1e-12);
        }
        assert_eq!(tr.states.last().unwrap(), &tr.final_state);
    }

    #[test]
    fn period_of_torus_orbit() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let p = estimate_fast_period(&s, 6.0, 1e-3, 0.05).unwrap();
        assert!((p.period - 2.4868).abs() < 0.01, "{p:?}");
        assert!(p.return_distance <= 0.05);
    }

    #[test]
    fn fixed_points_have_no_period() {
        for s in [st(&[1.0; 6]), st(&[1., 2., 1., 2., 1., 2.])] {
            assert!(matches!(
                estimate_fast_period(&s, 6.0, 1e-3, 0.05),
                Err(Error::FixedPoint { .. })
            ));
        }
    }

    #[test]
    fn short_horizon_finds_no_return() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        assert!(matches!(
            estimate_fast_period(&s, 1.0, 1e-3, 0.05),
            Err(Error::NoReturnFound { .. })
        ));
    }

    #[test]
    fn default_search_finds_the_period() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let p = PeriodSearch::for_state(&s).run(&s).unwrap();
        assert!((p.period - 2.4868).abs() < 0.01, "{p:?}");
    }

    #[test]
    fn observables_conserved_over_ten_periods() {
        let s = st(&[1., 1., 1., 3., 2., 1.]);
        let v0 = observable_vector(&s);
        let tr = integrate_record(Field::Fast, &s, 10.0 * 2.4868, 1e-3, 100).unwrap();
        for state in &tr.states {
            assert!(observable_vector(state).max_rel_diff(&v0) < 1e-6);
        }
    }

    fn positive_state() -> impl Strategy<Value = State> {
        (3usize..=5)
            .prop_flat_map(|half| proptest::collection::vec(0.3f64..3.0, 2 * half))
            .prop_map(|u| State::new(u).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn fast_flow_keeps_every_observable(s in positive_state()) {
            let v0 = observable_vector(&s);
            let tr = integrate_record(Field::Fast, &s, 2.0, 1e-3, 500).unwrap();
            for u in &tr.states {
                prop_assert!(observable_vector(u).max_rel_diff(&v0) < 1e-9);
            }
        }

        #[test]
        fn diffusion_keeps_mass_and_raises_the_product(s in positive_state(), nu in 0.01f64..1.0) {
            let mass = s.mass();
            let mut prev: f64 = s.as_slice().iter().product();
            let tr = integrate_record(Field::Full { nu }, &s, 2.0, 1e-3, 100).unwrap();
            for u in &tr.states {
                prop_assert!(u.as_slice().iter().all(|&x| x > 0.0));
                prop_assert!((u.mass() - mass).abs() < 1e-12 * mass);
                let p: f64 = u.as_slice().iter().product();
                prop_assert!(p >= prev * (1.0 - 1e-12));
                prev = p;
            }
        }
    }
}
