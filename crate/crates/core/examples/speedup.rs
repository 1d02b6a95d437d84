//! Cost of direct integration vs Young-measure projective integration until
//! diffusion has decayed by 1e5, at nu = 1e-3 and nu = 1e-4.

use lattice_multiscale::harness::SpeedupScenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for nu in [1e-3, 1e-4] {
        print!("{}", SpeedupScenario::worked_example(nu).run()?.render());
        println!();
    }
    Ok(())
}
