//! Projective integration of the slow observables.
//!
//! Two ways of estimating `d v / dt` feed the same forward Euler projective
//! step:
//!
//! * Young-measure averaging: sample the `nu = 0` orbit through the current
//!   state, average `grad v_j . D` over the samples and multiply by `nu`.
//! * Equation-free: run the full `nu > 0` system for one fast period and
//!   take the chord slope of each `v_j` between the two near-return points.
//!
//! After each projective step a new lattice state is lifted from the
//! projected observables.

mod lift;
mod measure;
mod projective;

pub use lift::{
    default_fixed_indices, fixed_index_candidates, lift, lift_rotating, LiftConfig, Lifted,
};
pub use measure::{
    average_drift, average_observables, build_measure, build_measure_with_period,
    EmpiricalMeasure,
};
pub use projective::{
    ef_projective_step, ef_projective_step_with, initial_period, run_multiscale, ym_projective_step,
    ym_projective_step_with, Method, ObservableSeries, ProjectiveConfig, ProjectiveStep,
};
