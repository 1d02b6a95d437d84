//! Equation-free projective integration next to a direct run: chord slopes
//! over one fast period, projected over a few periods, lifted, repeated.

use lattice_multiscale::dynamics::State;
use lattice_multiscale::harness::{cost_report, run_reference};
use lattice_multiscale::multiscale::{run_multiscale, Method, ProjectiveConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let periods: usize = std::env::args().nth(1).map_or(Ok(600), |a| a.parse())?;
    let s = State::new(vec![1., 1., 1., 1., 4., 1.])?;
    let cfg = ProjectiveConfig::default();

    let ef = run_multiscale(Method::EquationFree, &s, &cfg, periods)?;
    let p0 = ef.periods[0];
    let spp = cfg.integration_steps_per_period();
    let reference = run_reference(&s, cfg.nu, ef.end_time(), p0 / spp as f64, spp)?;

    println!("{} projective steps of {} periods (P0 = {p0:.4})", ef.len() - 1, cfg.euler_step_periods);
    println!("{:>10} {:>12} {:>12} {:>12}", "t", "v_2", "v_3", "v_4");
    let every = (ef.len() / 8).max(1);
    for (t, v) in ef.times.iter().zip(&ef.values).step_by(every) {
        let r = reference.value_at(*t).expect("reference covers the run");
        println!(
            "{t:>10.2} {:>12.5} {:>12.4} {:>12.5}   direct {:>10.5} {:>10.4} {:>10.5}",
            v.v(2),
            v.v(3),
            v.v(4),
            r.v(2),
            r.v(3),
            r.v(4)
        );
    }
    println!("{}", cost_report(&reference, &ef)?.render());
    Ok(())
}
