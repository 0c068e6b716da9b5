//! Dykstra and plain alternating projections both find a point in U ∩ V,
//! but they do not find the same one.
//!
//! U is the line through (1,1), V the lower half-plane. From (α, β) with
//! α < 0 < β ≤ -α, alternating projections locks onto (α/2, α/2) after one
//! step, while Dykstra's corrections keep pulling it to the true projection
//! P_{U∩V}(α, β) = ((α+β)/2, (α+β)/2).

use opsplit::equivalence::dykstra_map_counterexample;

fn main() {
    let (alpha, beta) = (-2.0, 1.0);
    let outcome = dykstra_map_counterexample(alpha, beta, 200).unwrap();

    println!("start: ({alpha}, {beta})");
    println!(
        "alternating projections: ({:.6}, {:.6})",
        outcome.map_limit[0], outcome.map_limit[1]
    );
    println!(
        "dykstra:                 ({:.6}, {:.6})",
        outcome.dykstra_limit[0], outcome.dykstra_limit[1]
    );
    println!("separation: {:.6}", outcome.separation);

    // only Dykstra solves the best-approximation problem
    assert!(outcome.distinct);
}
