use opsplit::{DenseOperator, ProxFunction, RealVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Brute-force 1-D prox: argmin_y f(y) + ½(x − y)² by scanning
/// [x − 10, x + 10] and refining once around the coarse winner.
pub fn grid_prox_1d(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let scan = |lo: f64, hi: f64, n: usize| -> f64 {
        let mut best = lo;
        let mut best_val = f64::INFINITY;
        for i in 0..=n {
            let y = lo + (hi - lo) * i as f64 / n as f64;
            let val = f(y) + 0.5 * (x - y) * (x - y);
            if val < best_val {
                best_val = val;
                best = y;
            }
        }
        best
    };
    let coarse = scan(x - 10.0, x + 10.0, 400_000);
    let step = 20.0 / 400_000.0;
    scan(coarse - 2.0 * step, coarse + 2.0 * step, 40_000)
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> RealVector {
    RealVector::new((0..dim).map(|_| rng.gen_range(-scale..scale)).collect()).unwrap()
}

pub fn random_spd_quadratic(rng: &mut ChaCha8Rng, dim: usize) -> ProxFunction {
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let q = DenseOperator::from_rows(&rows)
        .unwrap()
        .gram()
        .add_matrix(&DenseOperator::identity(dim).scale(0.1))
        .unwrap();
    ProxFunction::quadratic(q, random_vector(rng, dim, 1.0)).unwrap()
}

/// One representative of every catalog family, all in dimension `dim`.
pub fn catalog(dim: usize, rng: &mut ChaCha8Rng) -> Vec<(String, ProxFunction)> {
    let mut span = Vec::new();
    for _ in 0..1.max(dim / 2) {
        span.push(random_vector(rng, dim, 1.0));
    }
    let lo = RealVector::new(vec![-1.0; dim]).unwrap();
    let hi = RealVector::new(vec![0.5; dim]).unwrap();
    let subspace = ProxFunction::indicator_subspace(&span).unwrap();
    vec![
        ("zero".into(), ProxFunction::zero(dim)),
        (
            "half-squared-norm".into(),
            ProxFunction::half_squared_norm(dim),
        ),
        ("quadratic".into(), random_spd_quadratic(rng, dim)),
        ("l1".into(), ProxFunction::l1(dim, 0.7).unwrap()),
        (
            "box".into(),
            ProxFunction::indicator_box(lo, hi).unwrap(),
        ),
        (
            "point".into(),
            ProxFunction::indicator_point(random_vector(rng, dim, 1.0)),
        ),
        ("subspace".into(), subspace.clone()),
        (
            "affine".into(),
            ProxFunction::indicator_affine(&span, random_vector(rng, dim, 1.0)).unwrap(),
        ),
        (
            "halfspace".into(),
            ProxFunction::indicator_halfspace(random_vector(rng, dim, 1.0), 0.3).unwrap(),
        ),
        (
            "half-squared-distance".into(),
            ProxFunction::half_squared_distance(subspace.clone()).unwrap(),
        ),
        (
            "translation".into(),
            ProxFunction::translation(ProxFunction::l1(dim, 0.5).unwrap(), random_vector(rng, dim, 1.0))
                .unwrap(),
        ),
        (
            "conjugate".into(),
            random_spd_quadratic(rng, dim).conjugate(),
        ),
        (
            "separable-pair".into(),
            ProxFunction::separable_pair(
                ProxFunction::l1(dim, 0.9).unwrap(),
                random_spd_quadratic(rng, dim),
            ),
        ),
        (
            "reflection".into(),
            ProxFunction::translation(ProxFunction::l1(dim, 0.4).unwrap(), random_vector(rng, dim, 1.0))
                .unwrap()
                .reflect(),
        ),
    ]
}
