mod common;

use lw6::worldline::{kinematic_state, retarded_frame, sphere_point, HyperbolicMotion, Worldline, TAU_KIN};
use proptest::prelude::*;

use common::{random_angles, random_tau, rng, test_worldlines};

#[test]
fn chain_holds_at_random_times() {
    let mut rng = rng(1);
    for (name, w) in test_worldlines() {
        for _ in 0..100 {
            let tau = random_tau(w.as_ref(), &mut rng);
            let s = w.evaluate(tau).unwrap();
            let r = s.chain_residuals();
            assert!(r.max() <= TAU_KIN, "{name} at {tau}: {r:?}");
        }
    }
}

#[test]
fn retarded_solution_round_trips() {
    let mut rng = rng(2);
    for (name, w) in test_worldlines() {
        for _ in 0..100 {
            let tau = random_tau(w.as_ref(), &mut rng);
            let s = kinematic_state(w.as_ref(), tau).unwrap();
            let r = rand::Rng::gen_range(&mut rng, 0.05..5.0);
            let angles = random_angles(&mut rng);
            let y = sphere_point(&s, r, &angles).unwrap();
            let f = retarded_frame(w.as_ref(), &y).unwrap();
            assert!((f.u_ret - tau).abs() <= 1e-10 * (1.0 + tau.abs()), "{name}: {} vs {tau}", f.u_ret);
            assert!((f.r - r).abs() <= 1e-10 * r, "{name}: r {} vs {r}", f.r);
            assert!((f.k.norm_sq()).abs() <= 1e-10 * f.k.euclid().powi(2));
            assert!((f.k.dot(&f.state.u) + 1.0).abs() <= 1e-12);
            let back = f.angles().unwrap();
            for (got, want) in [
                (back.theta1, angles.theta1),
                (back.theta2, angles.theta2),
                (back.theta3, angles.theta3),
                (back.phi, angles.phi),
            ] {
                assert!((got - want).abs() <= 1e-8, "{name}: angle {got} vs {want}");
            }
        }
    }
}

#[test]
fn points_outside_the_causal_future_are_rejected() {
    let w = HyperbolicMotion::new(1.0).unwrap();
    // behind the past horizon y⁰ + y¹ = 0
    let y = lw6::tensor6::SixVector::new([0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(retarded_frame(&w, &y).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn helical_chain_for_any_parameters(
        radius in 0.1..3.0f64,
        speed in 0.0..0.9f64,
        frac in 0.0..0.95f64,
        tau in -5.0..5.0f64,
    ) {
        let drift = frac * (1.0 - speed * speed).sqrt() * 0.99;
        let w = lw6::worldline::HelicalMotion::new(radius, speed, drift).unwrap();
        prop_assert!(w.evaluate(tau).unwrap().chain_residuals().max() <= TAU_KIN);
    }
}
