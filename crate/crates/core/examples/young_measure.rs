//! Young-measure averaging: sample one fast orbit, average grad v_j . D over
//! it, and take one projective Euler step. Also shows how little the averaged
//! drift depends on the number of orbits sampled.

use lattice_multiscale::dynamics::State;
use lattice_multiscale::invariants::observable_vector;
use lattice_multiscale::multiscale::{
    average_drift, build_measure, build_measure_with_period, ym_projective_step, ProjectiveConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = State::new(vec![1., 1., 1., 3., 2., 1.])?;
    let cfg = ProjectiveConfig::default();

    let m = build_measure(&s, &cfg)?;
    println!(
        "{} samples over one period {:.4}; observable spread {:.1e}",
        m.len(),
        m.period,
        m.observable_spread()
    );
    println!("bare drift <grad v_j . D> = {:.4?}", average_drift(&m));
    for periods in 1..=4 {
        let d = average_drift(&build_measure_with_period(&s, m.period, periods, 50, 8)?);
        println!("  averaged over {periods} period(s): {:.4?}", &d[1..]);
    }

    let step = ym_projective_step(&s, &cfg)?;
    println!("projective step of {:.3} time units at nu = {:e}", step.dt, cfg.nu);
    println!("  v before {:?}", observable_vector(&s).as_slice());
    println!("  v after  {:?}", step.observables.as_slice());
    println!(
        "  lifted state {:.6?} ({} Newton iterations, residual {:.1e})",
        step.state.as_slice(),
        step.lift_iterations,
        step.lift_residual
    );
    Ok(())
}
