//! Peaceman-Rachford corresponds to ADMM with an intermediate multiplier
//! update: x_n = L b_n + w_n with the extra multiplier w.
//!
//! The intermediate variant needs strongly convex g; the seeded bundles have
//! modulus 0.1 or better.

use opsplit::equivalence::verify_pr_admm_intermediate;
use opsplit::problems::{make_random_quadratic, ProblemForm};
use opsplit::RealVector;

fn main() {
    for seed in 0..5 {
        let bundle = make_random_quadratic(seed, 3, 2, ProblemForm::CompositeL).unwrap();
        println!(
            "seed {seed}: g has strong convexity modulus {:.3}",
            bundle.g.strongly_convex_modulus()
        );
        let x0 = RealVector::from_slice(&[1.0, 1.0, -1.0]).unwrap();
        let report = verify_pr_admm_intermediate(&bundle, &x0, 100, 1e-10).unwrap();
        println!(
            "          max |pr - admm-int| over {} iterations = {:.3e}",
            report.iterations, report.max_discrepancy
        );
        assert!(report.pass);
    }
}
