//! ADMM is Douglas-Rachford on the dual, iterate by iterate.
//!
//! Starting ADMM from (a0, u0) = (Prox_f x0, x0 - Prox_f x0), every ADMM
//! triple (b_n, a_n, u_n) reassembles the DR point: x_n = L b_n + u_{n-1}
//! and the shadow y_n = Prox_f x_n equals a_n.

use opsplit::equivalence::verify_dr_admm;
use opsplit::problems::{make_random_quadratic, ProblemForm};
use opsplit::RealVector;

fn main() {
    for seed in 0..5 {
        let bundle = make_random_quadratic(seed, 4, 2, ProblemForm::CompositeL).unwrap();
        let x0 = RealVector::from_slice(&[2.0, -1.0, 0.0, 3.0]).unwrap();
        let report = verify_dr_admm(&bundle, &x0, 100, 1e-10).unwrap();
        println!(
            "seed {seed}: {} iterations, max |dr - admm| = {:.3e} -> {}",
            report.iterations,
            report.max_discrepancy,
            if report.pass { "identical" } else { "DIVERGED" }
        );
    }
}
