mod common;

use lw6::stress_energy::{null_contraction_check, stress_energy_split};
use lw6::worldline::{kinematic_state, retarded_frame, sphere_point, RetardedFrame};

use common::{random_angles, random_tau, rng, test_worldlines};

fn random_frames(count: usize, seed: u64) -> Vec<(&'static str, RetardedFrame)> {
    let worldlines = test_worldlines();
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let (name, w) = &worldlines[i % worldlines.len()];
            let s = kinematic_state(w.as_ref(), random_tau(w.as_ref(), &mut rng)).unwrap();
            let r = rand::Rng::gen_range(&mut rng, 0.1..4.0);
            let y = sphere_point(&s, r, &random_angles(&mut rng)).unwrap();
            (*name, retarded_frame(w.as_ref(), &y).unwrap())
        })
        .collect()
}

#[test]
fn split_reconstructs_total() {
    for (name, f) in random_frames(200, 21) {
        let e = 1.3;
        let split = stress_energy_split(&f, e);
        let diff = (split.reconstructed() - split.total).max_abs();
        assert!(diff <= 1e-12 * split.scale(), "{name}: {diff:e} vs {:e}", split.scale());
    }
}

#[test]
fn radiative_and_leading_bound_parts_are_null() {
    for (name, f) in random_frames(200, 22) {
        let split = stress_energy_split(&f, 0.7);
        let (rad, t5) = null_contraction_check(&split, &f.k);
        let scale = split.scale() * f.k.euclid();
        assert!(rad <= 1e-11 * scale, "{name}: k·T_rad {rad:e}");
        assert!(t5 <= 1e-11 * scale, "{name}: k·T5 {t5:e}");
    }
}

#[test]
fn grades_rescale_with_exact_powers() {
    for (name, f) in random_frames(100, 23) {
        let near = stress_energy_split(&RetardedFrame::from_state(f.state, f.r, f.k), 1.0);
        let far = stress_energy_split(&RetardedFrame::from_state(f.state, 2.0 * f.r, f.k), 1.0);
        let pieces = std::iter::once((4i32, near.rad, far.rad))
            .chain((5..=8usize).map(|k| (k as i32, *near.bound_by_power(k), *far.bound_by_power(k))));
        for (kappa, a, b) in pieces {
            let expected = a * 2f64.powi(-kappa);
            let diff = (b - expected).max_abs();
            assert!(diff <= 1e-10 * expected.max_abs().max(1e-300), "{name}: r^-{kappa} off by {diff:e}");
        }
    }
}
