//! Vector fields of the periodic fast-slow lattice
//!
//! ```text
//! dU_k/dt = U_k (U_{k-1} - U_{k+1}) + nu (U_{k+1} - 2 U_k + U_{k-1}),   k = 1..N
//! ```
//!
//! with periodic indexing. The first term is the fast (Volterra-type) field,
//! the second the slow diffusion stencil. All time variables use the unit of
//! this equation: the fast time `sigma` and `t` coincide, and the small
//! parameter enters only through `nu = eps / (2h)`.

use std::f64::consts::PI;
use std::ops::Index;

use crate::error::{Error, Result};

/// Lattice values `U_1..U_N`, strictly positive, periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    u: Vec<f64>,
}

impl State {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        check_lattice_size(u.len())?;
        check_positive(&u)?;
        Ok(Self { u })
    }

    /// Uniform state `c, c, ..., c`.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.u
    }

    /// Total mass `sum U_k`, conserved by both fields.
    pub fn mass(&self) -> f64 {
        self.u.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.mass() / self.u.len() as f64
    }

    /// `max_k |U_k - c|`.
    pub fn max_deviation_from(&self, c: f64) -> f64 {
        self.u.iter().map(|x| (x - c).abs()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.u.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Index<usize> for State {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.u[k]
    }
}

impl TryFrom<Vec<f64>> for State {
    type Error = Error;

    fn try_from(u: Vec<f64>) -> Result<Self> {
        State::new(u)
    }
}

pub(crate) fn check_lattice_size(n: usize) -> Result<()> {
    if n < 6 || !n.is_multiple_of(2) {
        return Err(Error::InvalidLatticeSize { n });
    }
    Ok(())
}

pub(crate) fn check_positive(u: &[f64]) -> Result<()> {
    match u.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        Some(index) => Err(Error::NonPositive {
            index,
            value: u[index],
        }),
        None => Ok(()),
    }
}

/// Lattice parameters. `h = 2 pi / N`, `nu = eps / (2h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub n: usize,
    pub h: f64,
    pub nu: f64,
}

impl SystemParams {
    pub fn new(n: usize, nu: f64) -> Result<Self> {
        check_lattice_size(n)?;
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu must be >= 0, got {nu}")));
        }
        Ok(Self {
            n,
            h: 2.0 * PI / n as f64,
            nu,
        })
    }

    /// Parameters from the PDE viscosity `eps`.
    pub fn from_epsilon(n: usize, eps: f64) -> Result<Self> {
        let h = 2.0 * PI / n as f64;
        Self::new(n, eps / (2.0 * h))
    }

    pub fn epsilon(&self) -> f64 {
        2.0 * self.h * self.nu
    }

    /// Converts a time in equation units to the slow time `tau = eps * t`.
    pub fn slow_time(&self, t: f64) -> f64 {
        self.epsilon() * t
    }

    pub fn is_fast_only(&self) -> bool {
        self.nu == 0.0
    }
}

/// Square roots `A_k = sqrt(U_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AVector {
    a: Vec<f64>,
}

impl AVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        check_lattice_size(a.len())?;
        check_positive(&a)?;
        Ok(Self { a })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

pub fn to_a(state: &State) -> AVector {
    AVector {
        a: state.u.iter().map(|x| x.sqrt()).collect(),
    }
}

pub fn from_a(a: &AVector) -> State {
    State {
        u: a.a.iter().map(|x| x * x).collect(),
    }
}

/// Which right-hand side to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    /// `nu = 0`.
    Fast,
    /// Fast field plus `nu` times the diffusion stencil.
    Full { nu: f64 },
}

impl Field {
    pub fn nu(&self) -> f64 {
        match *self {
            Field::Fast => 0.0,
            Field::Full { nu } => nu,
        }
    }

    /// Evaluates into `out`; both slices must have the same length.
    pub fn eval_into(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let nu = self.nu();
        for k in 0..n {
            let prev = u[(k + n - 1) % n];
            let next = u[(k + 1) % n];
            let mut du = u[k] * (prev - next);
            if nu != 0.0 {
                du += nu * (next - 2.0 * u[k] + prev);
            }
            out[k] = du;
        }
    }

    pub fn eval(&self, state: &State) -> Vec<f64> {
        let mut out = vec![0.0; state.len()];
        self.eval_into(state.as_slice(), &mut out);
        out
    }
}

/// `dU_k/dsigma = -U_k (U_{k+1} - U_{k-1})`.
pub fn fast_rhs(state: &State) -> Vec<f64> {
    Field::Fast.eval(state)
}

/// `D_k = U_{k+1} - 2 U_k + U_{k-1}`.
pub fn diffusion_stencil(state: &State) -> Vec<f64> {
    let u = state.as_slice();
    let n = u.len();
    (0..n)
        .map(|k| u[(k + 1) % n] - 2.0 * u[k] + u[(k + n - 1) % n])
        .collect()
}

pub fn full_rhs(state: &State, params: &SystemParams) -> Result<Vec<f64>> {
    if state.len() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: state.len(),
        });
    }
    Ok(Field::Full { nu: params.nu }.eval(state))
}

/// Parses a comma-separated list such as `1,1,1,3,2,1` into a state.
pub fn parse_state(s: &str) -> Result<State> {
    let u = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad component {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    State::new(u)
}
