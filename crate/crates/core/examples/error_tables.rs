//! Checkpoint error tables for both projective methods against a direct run,
//! 600 fast periods from [1,1,1,1,4,1] (or the state given as argument).

use lattice_multiscale::dynamics::{parse_state, State};
use lattice_multiscale::harness::{make_error_table, TABLE_STEPS};
use lattice_multiscale::multiscale::{Method, ProjectiveConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = match std::env::args().nth(1) {
        Some(arg) => parse_state(&arg)?,
        None => State::new(vec![1., 1., 1., 1., 4., 1.])?,
    };
    let cfg = ProjectiveConfig::default();
    for method in [Method::YoungMeasure, Method::EquationFree] {
        let t = make_error_table(method, &s, 1e-4, 600, &TABLE_STEPS, &cfg)?;
        print!("{}", t.render());
        for r in &t.rows {
            println!("  step {:>2}: signed {:+.3?}, {} rhs evals", r.euler_step_periods, r.signed, r.rhs_evals);
        }
        println!("  direct run: {} rhs evals", t.reference_rhs_evals);
    }
    Ok(())
}
