//! Chambolle-Pock as Douglas-Rachford on a lifted problem.
//!
//! For ||A|| <= 1 set C = (Id - AA*)^(1/2) and B = [A C], so BB* = Id. Then
//! CP for f + g(A.) is DR applied to f~(x,z) = f(x) + i_{0}(z) and g(B.),
//! linked through x_n = (u_n, 0) - B* v_n.

use opsplit::equivalence::verify_cp_lifted_dr;
use opsplit::lifting::lift;
use opsplit::problems::{make_random_quadratic, ProblemForm};
use opsplit::RealVector;

fn main() {
    let bundle = make_random_quadratic(11, 2, 2, ProblemForm::CompositeA).unwrap();
    println!("||A|| = {:.6}", bundle.op.operator_norm());

    let lifted = lift(bundle.op.clone(), bundle.f.clone()).unwrap();
    println!("||BB* - Id||_max = {:.3e}", lifted.bb_star_error());

    let u0 = RealVector::from_slice(&[1.0, -1.0]).unwrap();
    let v0 = RealVector::from_slice(&[0.5, 0.5]).unwrap();
    let report = verify_cp_lifted_dr(&bundle, &u0, &v0, 50, 1e-9).unwrap();
    println!(
        "max |cp - lifted dr| over {} iterations = {:.3e} ({})",
        report.iterations,
        report.max_discrepancy,
        if report.pass { "pass" } else { "FAIL" }
    );

    // when A = Id the lifting is trivial and the correspondence collapses to
    // x_n = u_n - v_n; see verify_cp_dr_identity_case
}
