//! Lax pair and the slow observables.
//!
//! With `A_k = sqrt(U_k)` the symmetric matrix `L` carries `A_k` on the
//! periodic off-diagonals and the antisymmetric `B` carries `A_k A_{k+1}` on
//! the `+2` band. Along the fast flow `dL/dsigma = -1/2 [B, L]`, so every
//! `tr L^p` is conserved. The observable vector is
//!
//! ```text
//! v = [tr L^2, tr L^4, ..., tr L^N, U_1 U_2 ... U_N]
//! ```
//!
//! Observable indices `j` are 1-based throughout, matching the usual
//! `v_1 .. v_{N/2+1}` labelling.

use nalgebra::DMatrix;

use crate::dynamics::{diffusion_stencil, State};
use crate::error::{Error, Result};

/// Symmetric periodic tridiagonal matrix `L = A T + A_- T^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxMatrix(pub DMatrix<f64>);

/// Antisymmetric matrix `B = A A_+ T^2 - A_- A_-- T^{-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BMatrix(pub DMatrix<f64>);

pub fn lax_matrix(state: &State) -> LaxMatrix {
    let n = state.len();
    let mut l = DMatrix::zeros(n, n);
    for k in 0..n {
        let a = state[k].sqrt();
        let k1 = (k + 1) % n;
        l[(k, k1)] = a;
        l[(k1, k)] = a;
    }
    LaxMatrix(l)
}

pub fn b_matrix(state: &State) -> BMatrix {
    let n = state.len();
    let a: Vec<f64> = state.as_slice().iter().map(|x| x.sqrt()).collect();
    let mut b = DMatrix::zeros(n, n);
    for k in 0..n {
        b[(k, (k + 2) % n)] = a[k] * a[(k + 1) % n];
        b[(k, (k + n - 2) % n)] = -a[(k + n - 1) % n] * a[(k + n - 2) % n];
    }
    BMatrix(b)
}

impl LaxMatrix {
    pub fn commutator_with(&self, b: &BMatrix) -> DMatrix<f64> {
        &b.0 * &self.0 - &self.0 * &b.0
    }
}

/// `tr L^p` for even `p` in `[2, N]`, from explicit matrix powers.
pub fn trace_power(state: &State, p: usize) -> Result<f64> {
    let n = state.len();
    if p < 2 || p > n || !p.is_multiple_of(2) {
        return Err(Error::InvalidTracePower { p, n });
    }
    Ok(raw_trace_power(&lax_matrix(state).0, p))
}

/// `tr L^p` for any `p >= 1`, without range checks.
pub(crate) fn raw_trace_power(l: &DMatrix<f64>, p: usize) -> f64 {
    let mut m = l.clone();
    for _ in 1..p {
        m = &m * l;
    }
    m.trace()
}

/// Products of all, even-indexed (`U_2 U_4 ...`) and odd-indexed
/// (`U_1 U_3 ...`) components, using 1-based lattice labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductInvariants {
    pub all: f64,
    pub even: f64,
    pub odd: f64,
}

pub fn product_invariants(state: &State) -> ProductInvariants {
    let u = state.as_slice();
    let odd: f64 = u.iter().step_by(2).product();
    let even: f64 = u.iter().skip(1).step_by(2).product();
    ProductInvariants {
        all: u.iter().product(),
        even,
        odd,
    }
}

/// The `N/2 + 1` slow observables of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableVector(Vec<f64>);

impl ObservableVector {
    pub fn new(v: Vec<f64>) -> Self {
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// 1-based access, `v(1) = tr L^2`.
    pub fn v(&self, j: usize) -> f64 {
        self.0[j - 1]
    }

    /// Lattice size this vector belongs to.
    pub fn lattice_size(&self) -> usize {
        2 * (self.0.len() - 1)
    }

    /// `self + scale * rate`, entry by entry.
    pub fn advanced(&self, rate: &[f64], scale: f64) -> Self {
        Self(self.0.iter().zip(rate).map(|(v, r)| v + scale * r).collect())
    }

    /// Largest entrywise relative difference `|a - b| / |b|`.
    pub fn max_rel_diff(&self, other: &ObservableVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

pub fn observable_count(n: usize) -> usize {
    n / 2 + 1
}

pub fn observable_vector(state: &State) -> ObservableVector {
    let l = lax_matrix(state).0;
    let l2 = &l * &l;
    let mut v = Vec::with_capacity(observable_count(state.len()));
    let mut m = l2.clone();
    v.push(m.trace());
    for _ in 1..state.len() / 2 {
        m = &m * &l2;
        v.push(m.trace());
    }
    v.push(product_invariants(state).all);
    ObservableVector(v)
}

/// Observables together with the `(N/2+1) x N` matrix of their gradients
/// with respect to `U`. Row `j - 1` holds `grad v_j`.
///
/// For a trace observable, `d tr(L^p) / dU_k = p (L^{p-1})_{k,k+1} / A_k`;
/// for the product, `d prod(U) / dU_k = prod(U) / U_k`.
pub fn observables_with_gradients(state: &State) -> (ObservableVector, DMatrix<f64>) {
    let n = state.len();
    let m = observable_count(n);
    let u = state.as_slice();
    let l = lax_matrix(state).0;
    let l2 = &l * &l;
    let mut values = Vec::with_capacity(m);
    let mut grads = DMatrix::zeros(m, n);
    // odd = L^{p-1}, even = L^p
    let mut odd = l.clone();
    let mut even = l2.clone();
    for row in 0..n / 2 {
        let p = 2 * (row + 1);
        values.push(even.trace());
        for k in 0..n {
            let a = u[k].sqrt();
            grads[(row, k)] = p as f64 * odd[(k, (k + 1) % n)] / a;
        }
        if row + 1 < n / 2 {
            odd = &odd * &l2;
            even = &even * &l2;
        }
    }
    let prod = product_invariants(state).all;
    values.push(prod);
    for k in 0..n {
        grads[(m - 1, k)] = prod / u[k];
    }
    (ObservableVector(values), grads)
}

pub fn observable_gradient(state: &State, j: usize) -> Result<Vec<f64>> {
    let count = observable_count(state.len());
    if j == 0 || j > count {
        return Err(Error::ObservableIndex { j, count });
    }
    let (_, g) = observables_with_gradients(state);
    Ok(g.row(j - 1).iter().copied().collect())
}

/// `grad v_j(U) . D(U)` with the bare diffusion stencil (no `nu`).
pub fn drift_integrand(state: &State, j: usize) -> Result<f64> {
    let g = observable_gradient(state, j)?;
    let d = diffusion_stencil(state);
    Ok(dot(&g, &d))
}

/// All drift integrands at once.
pub fn drift_integrands(state: &State) -> Vec<f64> {
    let (_, g) = observables_with_gradients(state);
    let d = diffusion_stencil(state);
    let mut out: Vec<f64> = (0..g.nrows())
        .map(|r| g.row(r).iter().zip(&d).map(|(a, b)| a * b).sum())
        .collect();
    // grad v_1 = 2 everywhere and the stencil telescopes: exactly zero
    out[0] = 0.0;
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{fast_rhs, State};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn st(u: &[f64]) -> State {
        State::new(u.to_vec()).unwrap()
    }

    fn central_difference(state: &State, j: usize) -> Vec<f64> {
        let u = state.as_slice();
        (0..u.len())
            .map(|k| {
                let h = 1e-6 * u[k];
                let mut up = u.to_vec();
                let mut dn = u.to_vec();
                up[k] += h;
                dn[k] -= h;
                (observable_vector(&st(&up)).v(j) - observable_vector(&st(&dn)).v(j)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn lax_matrix_layout() {
        let l = lax_matrix(&st(&[1.0; 6])).0;
        for i in 0..6 {
            for k in 0..6 {
                let adjacent = (i + 1) % 6 == k || (k + 1) % 6 == i;
                assert_eq!(l[(i, k)], if adjacent { 1.0 } else { 0.0 });
            }
        }
        let l = lax_matrix(&st(&[1., 4., 1., 4., 1., 4.])).0;
        let sup: Vec<f64> = (0..5).map(|k| l[(k, k + 1)]).collect();
        assert_eq!(sup, vec![1., 2., 1., 2., 1.]);
        assert_eq!(l[(0, 5)], 2.0);
        assert_eq!(l[(5, 0)], 2.0);
        assert_eq!((&l - l.transpose()).amax(), 0.0);
        assert_eq!(l.iter().filter(|x| **x != 0.0).count(), 12);
    }

    #[test]
    fn b_matrix_layout() {
        let b = b_matrix(&st(&[1.0; 6])).0;
        for k in 0..6 {
            assert_eq!(b[(k, (k + 2) % 6)], 1.0);
            assert_eq!(b[(k, (k + 4) % 6)], -1.0);
        }
        let b = b_matrix(&st(&[1., 4., 1., 4., 1., 4.])).0;
        assert_eq!(b[(0, 2)], 2.0);
        assert_eq!((&b + b.transpose()).amax(), 0.0);
        let b = b_matrix(&st(&[1.3, 0.4, 2.0, 5.0, 0.7, 1.1, 3.0, 0.9])).0;
        assert_eq!((&b + b.transpose()).amax(), 0.0);
    }

    #[test]
    fn trace_examples() {
        let ones = st(&[1.0; 6]);
        assert_relative_eq!(trace_power(&ones, 2).unwrap(), 12.0);
        assert_relative_eq!(trace_power(&ones, 4).unwrap(), 36.0);
        assert_relative_eq!(trace_power(&ones, 6).unwrap(), 132.0);
        assert!(matches!(trace_power(&ones, 3), Err(Error::InvalidTracePower { .. })));
        assert!(trace_power(&ones, 8).is_err());
        assert!(trace_power(&ones, 0).is_err());
    }

    #[test]
    fn products() {
        let p = product_invariants(&st(&[1., 2., 3., 4., 5., 6.]));
        assert_eq!((p.all, p.even, p.odd), (720.0, 48.0, 15.0));
        let p = product_invariants(&st(&[2.0; 6]));
        assert_eq!((p.all, p.even, p.odd), (64.0, 8.0, 8.0));
        let p = product_invariants(&st(&[1.0; 6]));
        assert_eq!((p.all, p.even, p.odd), (1.0, 1.0, 1.0));
    }

    #[test]
    fn observable_vector_examples() {
        let v = observable_vector(&st(&[1.0; 6]));
        for (a, b) in v.as_slice().iter().zip([12.0, 36.0, 132.0, 1.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        let v = observable_vector(&st(&[2.0; 6]));
        for (a, b) in v.as_slice().iter().zip([24.0, 144.0, 1056.0, 64.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        assert_eq!(v.lattice_size(), 6);
    }

    #[test]
    fn gradient_examples() {
        let s = st(&[1.3, 0.4, 2.0, 5.0, 0.7, 1.1]);
        for g in observable_gradient(&s, 1).unwrap() {
            assert_relative_eq!(g, 2.0, max_relative = 1e-14);
        }
        assert_eq!(observable_gradient(&st(&[1.0; 6]), 4).unwrap(), vec![1.0; 6]);
        assert!(matches!(
            observable_gradient(&s, 5),
            Err(Error::ObservableIndex { j: 5, count: 4 })
        ));
        assert!(observable_gradient(&s, 0).is_err());
    }

    #[test]
    fn drift_integrand_examples() {
        let s = st(&[1.3, 0.4, 2.0, 5.0, 0.7, 1.1]);
        assert!(drift_integrand(&s, 1).unwrap().abs() < 1e-13);
        assert_eq!(drift_integrands(&s)[0], 0.0);
        for j in 1..=4 {
            assert_eq!(drift_integrand(&st(&[1.7; 6]), j).unwrap(), 0.0);
        }
        let all = drift_integrands(&s);
        for j in 2..=4 {
            assert_relative_eq!(all[j - 1], drift_integrand(&s, j).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn fast_flow_preserves_observables_infinitesimally() {
        // grad v_j . F(U) = 0 for every observable
        let s = st(&[1.3, 0.4, 2.0, 5.0, 0.7, 1.1, 0.2, 3.3]);
        let f = fast_rhs(&s);
        let (v, g) = observables_with_gradients(&s);
        for j in 0..v.len() {
            let rate: f64 = g.row(j).iter().zip(&f).map(|(a, b)| a * b).sum();
            let scale: f64 = g.row(j).iter().zip(&f).map(|(a, b)| (a * b).abs()).sum();
            assert!(rate.abs() <= 1e-12 * scale, "j={} rate={rate}", j + 1);
        }
    }

    fn positive_state() -> impl Strategy<Value = State> {
        (3usize..=6)
            .prop_flat_map(|half| proptest::collection::vec(0.2f64..5.0, 2 * half))
            .prop_map(|u| State::new(u).unwrap())
    }

    proptest! {
        #[test]
        fn gradients_match_central_differences(s in positive_state()) {
            let (_, g) = observables_with_gradients(&s);
            for j in 1..=observable_count(s.len()) {
                let fd = central_difference(&s, j);
                let scale = fd.iter().map(|x| x.abs()).fold(0.0, f64::max);
                for k in 0..s.len() {
                    prop_assert!((g[(j - 1, k)] - fd[k]).abs() <= 1e-6 * scale,
                        "j={} k={} {} vs {}", j, k, g[(j - 1, k)], fd[k]);
                }
            }
        }

        #[test]
        fn odd_traces_vanish(s in positive_state()) {
            let l = lax_matrix(&s).0;
            for p in (1..=s.len()).step_by(2) {
                let t = raw_trace_power(&l, p);
                prop_assert!(t.abs() <= 1e-10 * raw_trace_power(&l, p + 1));
            }
        }

        #[test]
        fn first_observable_is_twice_mass(s in positive_state()) {
            let v = observable_vector(&s);
            prop_assert!((v.v(1) - 2.0 * s.mass()).abs() <= 1e-13 * v.v(1));
        }

        #[test]
        fn scaling_law(s in positive_state(), c in 0.3f64..3.0) {
            let scaled = State::new(s.as_slice().iter().map(|x| c * x).collect()).unwrap();
            let v = observable_vector(&s);
            let w = observable_vector(&scaled);
            let n = s.len();
            for j in 1..=n / 2 {
                let expect = v.v(j) * c.powi(j as i32);
                prop_assert!((w.v(j) - expect).abs() <= 1e-12 * expect);
            }
            let expect = v.v(n / 2 + 1) * c.powi(n as i32);
            prop_assert!((w.v(n / 2 + 1) - expect).abs() <= 1e-12 * expect);
        }

        #[test]
        fn even_times_odd_is_all(s in positive_state()) {
            let p = product_invariants(&s);
            prop_assert!((p.even * p.odd - p.all).abs() <= 1e-13 * p.all);
            prop_assert!(p.all > 0.0 && p.even > 0.0 && p.odd > 0.0);
        }

        #[test]
        fn tr_l4_matches_closed_form(s in positive_state()) {
            let u = s.as_slice();
            let n = u.len();
            let closed: f64 = (0..n)
                .map(|k| {
                    let prev = u[(k + n - 1) % n];
                    2.0 * u[k] * u[(k + 1) % n] + (u[k] + prev).powi(2)
                })
                .sum();
            let t = trace_power(&s, 4).unwrap();
            prop_assert!((t - closed).abs() <= 1e-12 * closed);
        }
    }
}
