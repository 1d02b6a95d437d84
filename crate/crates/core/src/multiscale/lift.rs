//! Lifting: reconstructing a lattice state with prescribed slow observables.
//!
//! `N/2 + 1` equations in `N` unknowns leave `N/2 - 1` components free to
//! choose. Those are carried over from a template state, and damped Newton
//! solves for the remaining ones. Equations are scaled by the target
//! magnitudes so that traces and the product enter with comparable weight.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{check_lattice_size, State};
use crate::error::{Error, Result};
use crate::invariants::{observable_count, observables_with_gradients, ObservableVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftConfig {
    /// Largest accepted relative residual per observable.
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iters: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lifted {
    pub state: State,
    pub iterations: usize,
    /// Max relative residual `|v_j(state) - target_j| / |target_j|`.
    pub residual: f64,
    pub fixed: Vec<usize>,
}

/// The first `N/2 - 1` lattice indices.
pub fn default_fixed_indices(n: usize) -> Vec<usize> {
    (0..n / 2 - 1).collect()
}

/// Fixed-index sets in the order the rotating solver tries them: contiguous
/// blocks starting at `0, 1, ..., N-1`, then every remaining combination in
/// lexicographic order.
pub fn fixed_index_candidates(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let m = n / 2 - 1;
    let blocks: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            let mut b: Vec<usize> = (0..m).map(|i| (s + i) % n).collect();
            b.sort_unstable();
            b
        })
        .collect();
    let rest = Combinations::new(n, m).filter({
        let blocks = blocks.clone();
        move |c| !blocks.contains(c)
    });
    blocks.into_iter().chain(rest)
}

struct Combinations {
    n: usize,
    idx: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            idx: (m <= n).then(|| (0..m).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.idx.clone()?;
        let m = cur.len();
        let mut nxt = cur.clone();
        let mut i = m;
        loop {
            if i == 0 {
                self.idx = None;
                break;
            }
            i -= 1;
            if nxt[i] < self.n - m + i {
                nxt[i] += 1;
                for k in i + 1..m {
                    nxt[k] = nxt[k - 1] + 1;
                }
                self.idx = Some(nxt);
                break;
            }
        }
        Some(cur)
    }
}

fn check_target(v: &ObservableVector) -> Result<usize> {
    if v.len() < 2 {
        return Err(Error::InfeasibleTarget("observable vector too short".into()));
    }
    let n = v.lattice_size();
    check_lattice_size(n)?;
    if v.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::InfeasibleTarget("non-finite entry".into()));
    }
    if v.v(1) <= 0.0 {
        return Err(Error::InfeasibleTarget(format!("v_1 = {} is not positive", v.v(1))));
    }
    let prod = v.v(v.len());
    if prod <= 0.0 {
        return Err(Error::InfeasibleTarget(format!("product entry {prod} is not positive")));
    }
    Ok(n)
}

fn scaled_residual(v: &ObservableVector, target: &ObservableVector) -> DVector<f64> {
    DVector::from_iterator(
        v.len(),
        v.as_slice()
            .iter()
            .zip(target.as_slice())
            .map(|(a, b)| (a - b) / b.abs()),
    )
}

/// Damped Newton solve for a state with observables `target`, keeping
/// `template` at `fixed_indices`.
pub fn lift(
    target: &ObservableVector,
    template: &State,
    fixed_indices: &[usize],
    cfg: &LiftConfig,
) -> Result<Lifted> {
    let n = check_target(target)?;
    if template.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: template.len(),
        });
    }
    let m = observable_count(n);
    let mut fixed = fixed_indices.to_vec();
    fixed.sort_unstable();
    fixed.dedup();
    if fixed.len() != n / 2 - 1 || fixed.len() != fixed_indices.len() || fixed.iter().any(|&i| i >= n) {
        return Err(Error::InvalidArgument(format!(
            "need {} distinct fixed indices below {n}, got {fixed_indices:?}",
            n / 2 - 1
        )));
    }
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    debug_assert_eq!(free.len(), m);

    let mut u = template.as_slice().to_vec();
    let scales: Vec<f64> = target.as_slice().iter().map(|x| x.abs()).collect();
    let (v0, mut grads) = observables_with_gradients(template);
    let mut r = scaled_residual(&v0, target);
    let mut iterations = 0;

    loop {
        let res = r.amax();
        if res <= cfg.tolerance {
            return Ok(Lifted {
                state: State::new(u)?,
                iterations,
                residual: res,
                fixed,
            });
        }
        if iterations >= cfg.max_iters {
            return Err(Error::MaxItersExceeded {
                iters: iterations,
                residual: res,
            });
        }
        iterations += 1;

        let jac = DMatrix::from_fn(m, m, |row, col| grads[(row, free[col])] / scales[row]);
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-12 * smax) {
            return Err(Error::SingularJacobian { fixed });
        }
        let step = svd
            .solve(&(-&r), 0.0)
            .map_err(|_| Error::SingularJacobian { fixed: fixed.clone() })?;

        // backtrack until positive and the residual norm decreases
        let norm0 = r.norm();
        let mut alpha = 1.0;
        let mut accepted = None;
        let mut any_positive = false;
        for _ in 0..40 {
            let mut trial = u.clone();
            for (c, &k) in free.iter().enumerate() {
                trial[k] += alpha * step[c];
            }
            if trial.iter().all(|x| *x > 0.0 && x.is_finite()) {
                any_positive = true;
                let s = State::new(trial).expect("checked positive");
                let (tv, tg) = observables_with_gradients(&s);
                let tr = scaled_residual(&tv, target);
                if tr.norm() < (1.0 - 1e-4 * alpha) * norm0 {
                    accepted = Some((s, tg, tr));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((s, tg, tr)) => {
                u = s.into_vec();
                grads = tg;
                r = tr;
            }
            None if !any_positive => return Err(Error::LeftPositiveOrthant),
            None => {
                return Err(Error::MaxItersExceeded {
                    iters: iterations,
                    residual: r.amax(),
                })
            }
        }
    }
}

/// [`lift`] starting from the default fixed set, moving on to the next
/// candidate set whenever a solve fails numerically.
pub fn lift_rotating(target: &ObservableVector, template: &State, cfg: &LiftConfig) -> Result<Lifted> {
    let n = check_target(target)?;
    let mut first_err = None;
    for fixed in fixed_index_candidates(n) {
        match lift(target, template, &fixed, cfg) {
            Ok(l) => return Ok(l),
            Err(e @ (Error::SingularJacobian { .. }
            | Error::MaxItersExceeded { .. }
            | Error::LeftPositiveOrthant)) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(first_err.expect("at least one candidate set"))
}
