use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noma_sim::geometry::{sample_realization, Point};

/// Nearest interferer distance of a unit-density PPP has mean 1/2.
#[test]
fn mean_rho_at_unit_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 40_000;
    let total: f64 = (0..n)
        .map(|_| sample_realization(1.0, 15.0, &mut rng).unwrap().rho())
        .sum();
    let mean = total / n as f64;
    assert!((mean - 0.5).abs() < 0.005, "mean rho {mean}");
}

/// Independent check of the nearest-distance law: P(rho > r) = exp(-pi r^2).
#[test]
fn rho_tail_probability() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 20_000;
    let r = 0.5;
    let beyond = (0..n)
        .filter(|_| sample_realization(1.0, 15.0, &mut rng).unwrap().rho() > r)
        .count();
    let expected = (-std::f64::consts::PI * r * r).exp();
    let observed = beyond as f64 / n as f64;
    // Five binomial standard errors.
    let tolerance = 5.0 * (expected * (1.0 - expected) / n as f64).sqrt();
    assert!(
        (observed - expected).abs() < tolerance,
        "{observed} vs {expected}"
    );
}

/// Brute-force in-cell check against a direct nearest-station search.
#[test]
fn in_cell_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let realization = sample_realization(1.0, 15.0, &mut rng).unwrap();
        for _ in 0..50 {
            let p = Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let own = p.x * p.x + p.y * p.y;
            let closer = realization
                .interferers()
                .iter()
                .all(|q| own < (p.x - q.x).powi(2) + (p.y - q.y).powi(2));
            assert_eq!(realization.in_cell(p), closer);
        }
    }
}
