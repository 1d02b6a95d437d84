//! Periodic KdV-Burgers lattice `dU_k/dt = U_k (U_{k-1} - U_{k+1}) + nu (U_{k+1} - 2 U_k + U_{k-1})`
//! with a slow diffusive drift on top of fast integrable oscillation.
//!
//! - [`dynamics`]: states, the fast and full vector fields.
//! - [`invariants`]: Lax pair, the slow observables `v` and their gradients.
//! - [`integrate`]: RK4 and fast-period detection.
//! - [`multiscale`]: Young-measure and equation-free projective integration, lifting.
//! - [`harness`]: direct reference runs, error tables, cost accounting, figure data, CSV.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod integrate;
pub mod invariants;
pub mod multiscale;
