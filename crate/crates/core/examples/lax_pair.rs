//! The Lax pair behind the slow observables: L and B at a state, the flow
//! identity dL/dsigma = -1/2 [B, L] checked by central differences, and the
//! traces at the uniform state.

use lattice_multiscale::dynamics::{Field, State};
use lattice_multiscale::integrate::Rk4;
use lattice_multiscale::invariants::{
    b_matrix, lax_matrix, observable_vector, observables_with_gradients, product_invariants,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = State::new(vec![1., 1., 1., 3., 2., 1.])?;
    let l = lax_matrix(&s);
    let b = b_matrix(&s);
    println!("L ={:.4}", l.0);
    println!("B ={:.4}", b.0);

    let h = 1e-5;
    let mut fwd = s.as_slice().to_vec();
    let mut bwd = fwd.clone();
    let mut rk = Rk4::new(Field::Fast, 6);
    rk.step(&mut fwd, h);
    rk.step(&mut bwd, -h);
    let dl = (lax_matrix(&State::new(fwd)?).0 - lax_matrix(&State::new(bwd)?).0) / (2.0 * h);
    let rhs = l.commutator_with(&b) * -0.5;
    println!("|dL/dsigma + [B,L]/2| / |[B,L]/2| = {:.2e}", (dl - &rhs).norm() / rhs.norm());

    let ones = State::constant(6, 1.0)?;
    println!("uniform state: v = {:?}", observable_vector(&ones).as_slice());

    let (v, grads) = observables_with_gradients(&s);
    let sv = grads.singular_values();
    println!("v = {:?}", v.as_slice());
    println!("gradient singular values {:.3?}", sv.as_slice());
    let p = product_invariants(&s);
    println!("products: all {}, sites 1,3,5 {}, sites 2,4,6 {}", p.all, p.odd, p.even);
    Ok(())
}
