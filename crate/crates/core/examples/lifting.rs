//! Lifting: find a lattice state with prescribed slow observables, keeping
//! N/2 - 1 components from a template. A mirror-symmetric template makes the
//! default choice singular; the rotating solver picks another index set.

use lattice_multiscale::dynamics::State;
use lattice_multiscale::invariants::observable_vector;
use lattice_multiscale::multiscale::{default_fixed_indices, lift, lift_rotating, LiftConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = LiftConfig::default();

    let template = State::new(vec![1., 1.2, 0.9, 1.1, 4., 1.3])?;
    let target = observable_vector(&State::new(vec![1.001, 1.199, 0.9005, 1.1, 3.998, 1.302])?);
    let l = lift(&target, &template, &default_fixed_indices(6), &cfg)?;
    println!("target   {:?}", target.as_slice());
    println!("lifted   {:.6?}", l.state.as_slice());
    println!("         {} iterations, residual {:.1e}, fixed {:?}", l.iterations, l.residual, l.fixed);

    let symmetric = State::new(vec![1., 1., 1., 1., 4., 1.])?;
    let target = observable_vector(&State::new(vec![1.001, 0.999, 1.0005, 1.0, 3.998, 1.002])?);
    match lift(&target, &symmetric, &[0, 1], &cfg) {
        Ok(_) => println!("fixed {{0, 1}} lifted the symmetric template"),
        Err(e) => println!("fixed {{0, 1}} on [1,1,1,1,4,1]: {e}"),
    }
    let l = lift_rotating(&target, &symmetric, &cfg)?;
    println!("rotating solver settled on fixed {:?}: {:.6?}", l.fixed, l.state.as_slice());
    Ok(())
}
