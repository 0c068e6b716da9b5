//! Douglas-Rachford on a seeded composite problem min f(Ly) + g(y).

use opsplit::algorithms::{run, Method, StartState};
use opsplit::problems::{make_random_quadratic, ProblemForm};
use opsplit::RealVector;

fn main() {
    let bundle = make_random_quadratic(7, 3, 2, ProblemForm::CompositeL).unwrap();
    let x0 = RealVector::from_slice(&[1.0, -2.0, 0.5]).unwrap();

    let trace = run(
        Method::Dr,
        &bundle,
        &StartState::Point(x0),
        500,
        1e-12,
    )
    .unwrap();

    println!("columns: {}", trace.columns.join(", "));
    for (i, row) in trace.snapshots.iter().enumerate().take(5) {
        let formatted: Vec<String> = row.iter().map(|v| format!("{v:+.6}")).collect();
        println!("iter {i:>3}: {}", formatted.join("  "));
    }
    println!("...");
    println!(
        "converged after {} steps (last residual {:.3e})",
        trace.steps(),
        trace.residuals.last().unwrap()
    );

    // the shadow sequence y = Prox_f x carries the solution
    let last = trace.snapshots.last().unwrap();
    let y = &last[3..6];
    println!("minimizer of f(L.) + g: ({:.8}, {:.8}, {:.8})", y[0], y[1], y[2]);
}
