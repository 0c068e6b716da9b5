//! A tour of the prox catalog and the Moreau decomposition.

use opsplit::{DenseOperator, ProxFunction, RealVector};

fn main() {
    let x = RealVector::from_slice(&[2.0, -0.3, 0.8]).unwrap();

    // soft thresholding
    let l1 = ProxFunction::l1(3, 1.0).unwrap();
    println!("soft-threshold {:?} -> {:?}", x.as_slice(), l1.prox(&x).as_slice());

    // projection onto a plane
    let plane = ProxFunction::indicator_subspace(&[
        RealVector::from_slice(&[1.0, 0.0, 0.0]).unwrap(),
        RealVector::from_slice(&[0.0, 1.0, 1.0]).unwrap(),
    ])
    .unwrap();
    println!("project onto plane   -> {:?}", plane.prox(&x).as_slice());

    // quadratic prox solves (I + Q) y = x - c
    let q = DenseOperator::identity(3).scale(2.0);
    let quad = ProxFunction::quadratic(q, RealVector::zeros(3)).unwrap();
    println!("quadratic prox       -> {:?}", quad.prox(&x).as_slice());

    // Moreau: Prox_f + Prox_f* = Id, which is how every conjugate prox here
    // is computed
    let conj = l1.conjugate();
    let recombined = &l1.prox(&x) + &conj.prox(&x);
    println!(
        "Prox_f(x) + Prox_f*(x) = {:?} (Moreau residual {:.1e})",
        recombined.as_slice(),
        (&recombined - &x).max_abs()
    );

    // the conjugate of the l1 ball weight is a box; its prox clamps
    println!("l1 conjugate prox    -> {:?}", conj.prox(&x).as_slice());

    let reflected = l1.reflected_resolvent(&x);
    println!("reflected resolvent  -> {:?}", reflected.as_slice());
}
