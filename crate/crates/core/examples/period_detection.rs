//! Nearest-return period of the fast orbit, how it depends on resolution,
//! and the U_1 peak-spacing diagnostic for comparison.

use lattice_multiscale::dynamics::{parse_state, State};
use lattice_multiscale::integrate::{estimate_fast_period, linear_period_guess, peak_period_u1};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let states: Vec<State> = match std::env::args().nth(1) {
        Some(arg) => vec![parse_state(&arg)?],
        None => vec![
            State::new(vec![1., 1., 1., 3., 2., 1.])?,
            State::new(vec![1., 1., 1., 1., 4., 1.])?,
            State::new(vec![3., 2., 1., 3., 2., 1.])?,
        ],
    };
    for s in &states {
        let guess = linear_period_guess(s);
        println!("{:?}: small-oscillation guess {guess:.4}", s.as_slice());
        for dt in [1e-2, 1e-3, 5e-4] {
            let est = estimate_fast_period(s, 3.0 * guess, dt, 0.1)?;
            println!(
                "  dt {dt:<6} period {:.5}  return distance {:.3e}{}",
                est.period,
                est.return_distance,
                if est.confident { "" } else { "  (weak return)" }
            );
        }
        if let Some(p) = peak_period_u1(s, 20.0 * guess, 1e-3)? {
            println!("  mean spacing of U_1 peaks {p:.5}");
        }
    }
    Ok(())
}
