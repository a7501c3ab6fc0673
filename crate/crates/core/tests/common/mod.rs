#![allow(dead_code)]

use lw6::worldline::{HelicalMotion, HyperbolicMotion, LogRapidityMotion, SphereAngles, UniformMotion, Worldline};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Angles well inside the chart.
pub fn random_angles(rng: &mut impl Rng) -> SphereAngles {
    use std::f64::consts::PI;
    SphereAngles::new(
        rng.gen_range(0.2..PI - 0.2),
        rng.gen_range(0.2..PI - 0.2),
        rng.gen_range(0.2..PI - 0.2),
        rng.gen_range(0.1..2.0 * PI - 0.1),
    )
}

pub fn test_worldlines() -> Vec<(&'static str, Box<dyn Worldline>)> {
    vec![
        ("uniform", Box::new(UniformMotion::new([0.3, -0.2, 0.1, 0.0, 0.4]).unwrap())),
        ("hyperbolic", Box::new(HyperbolicMotion::new(1.0).unwrap())),
        ("helical", Box::new(HelicalMotion::new(1.0, 0.5, 0.2).unwrap())),
        ("log-rapidity", Box::new(LogRapidityMotion::new(1.0).unwrap())),
    ]
}

/// A proper time inside the worldline's domain, away from its edges.
pub fn random_tau(w: &dyn Worldline, rng: &mut impl Rng) -> f64 {
    let (lo, hi) = w.domain();
    let (lo, hi) = (lo.max(-0.5), hi.min(1.5));
    let lo = if lo > 0.0 { lo.max(0.5) } else { lo };
    rng.gen_range(lo..hi)
}
