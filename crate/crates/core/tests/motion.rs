use lw6::balance::{integrate_motion, EquationOrder, IntegratorOptions, MotionState};
use lw6::balance::RenormalizationConstants;
use lw6::tensor6::SixVector;
use lw6::Error;

fn force_along_1(f: f64) -> impl Fn(f64, &MotionState) -> SixVector + Sync {
    move |_, s: &MotionState| SixVector::new([s.u[1] * f, s.u.time() * f, 0.0, 0.0, 0.0, 0.0])
}

#[test]
fn constant_force_gives_hyperbolic_motion() {
    let (m, f) = (2.0, 0.6);
    let g = f / m;
    let k = RenormalizationConstants::new(m, 0.0);
    let init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::rest());
    let times: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64).collect();
    let force = force_along_1(f);
    let traj = integrate_motion(&init, &k, 0.0, &force, &times, &IntegratorOptions::default()).unwrap();
    assert_eq!(traj.order, EquationOrder::Newtonian);
    assert_eq!(traj.samples.len(), times.len());
    for (s, tau) in traj.samples.iter().zip(&times) {
        assert_eq!(s.state.tau, *tau);
        let x = ((g * tau).cosh() - 1.0) / g;
        let t = (g * tau).sinh() / g;
        assert!((s.state.z[1] - x).abs() <= 1e-8 * x.max(1.0), "τ={tau}");
        assert!((s.state.z.time() - t).abs() <= 1e-8 * t.max(1.0), "τ={tau}");
        assert!((s.state.a[1] - g * (g * tau).cosh()).abs() <= 1e-8 * (g * tau).cosh());
    }
    assert!(traj.max_drift <= 1e-7);
}

#[test]
fn free_particle_stays_uniform_in_every_order() {
    let u = SixVector::new([(1.0f64 + 0.45).sqrt(), 0.6, 0.0, -0.3, 0.0, 0.0]);
    let init = MotionState::uniform(0.5, SixVector::new([0.0, 1.0, 0.0, 0.0, 2.0, 0.0]), u);
    let zero = |_: f64, _: &MotionState| SixVector::ZERO;
    for (k, e) in [
        (RenormalizationConstants::new(1.0, 0.0), 0.0),
        (RenormalizationConstants::new(1.0, 0.7), 0.0),
        (RenormalizationConstants::new(1.0, 0.7), 1.0),
        (RenormalizationConstants::new(0.5, -0.2), 0.3),
    ] {
        let traj = integrate_motion(&init, &k, e, &zero, &[1.0, 3.0, 5.5], &IntegratorOptions::default()).unwrap();
        for s in &traj.samples {
            let dt = s.state.tau - init.tau;
            assert!((s.state.z - (init.z + u * dt)).max_abs() <= 1e-12 * (1.0 + dt), "{k:?}");
            assert!((s.state.u - u).max_abs() <= 1e-12);
            assert!(s.state.a.max_abs() <= 1e-12);
        }
        assert!(traj.max_drift <= 1e-7);
    }
}

#[test]
fn dense_output_times_do_not_shrink_the_step() {
    let u = SixVector::new([(1.0f64 + 0.1).sqrt(), 0.3, 0.1, 0.0, 0.0, 0.0]);
    let init = MotionState::uniform(0.0, SixVector::ZERO, u);
    let zero = |_: f64, _: &MotionState| SixVector::ZERO;
    let times: Vec<f64> = (1..=50).map(|i| 5.0 * i as f64 / 50.0).collect();
    let k = RenormalizationConstants::new(1.0, 0.0);
    let traj = integrate_motion(&init, &k, 0.0, &zero, &times, &IntegratorOptions::default()).unwrap();
    assert_eq!(traj.samples.len(), times.len());
    assert!(traj.accepted <= 2 * times.len(), "{} steps", traj.accepted);
}

#[test]
fn order_follows_the_constants() {
    let k = RenormalizationConstants::new(1.0, 0.3);
    assert_eq!(EquationOrder::for_constants(&k, 0.5), EquationOrder::Full);
    assert_eq!(EquationOrder::for_constants(&k, 0.0), EquationOrder::Rigid);
    assert_eq!(EquationOrder::for_constants(&RenormalizationConstants::new(1.0, 0.0), 0.0), EquationOrder::Newtonian);
}

#[test]
fn drift_stays_bounded_under_driven_rigid_motion() {
    // μ < 0 makes the free modes oscillate instead of run away
    let k = RenormalizationConstants::new(1.0, -0.4);
    let mut init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::rest());
    init.a = SixVector::new([0.0, 0.3, 0.0, 0.0, 0.0, 0.0]);
    init.adot = SixVector::new([0.09, 0.0, 0.2, 0.0, 0.0, 0.0]);
    let force = |tau: f64, s: &MotionState| {
        SixVector::new([0.0, 0.0, 0.0, 0.2 * tau.cos(), 0.0, 0.0]) + s.u * (0.2 * tau.cos() * s.u[3])
    };
    let times: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let traj = integrate_motion(&init, &k, 0.0, &force, &times, &IntegratorOptions::default()).unwrap();
    assert!(traj.max_drift <= 1e-7);
    for s in &traj.samples {
        assert!((s.state.u.norm_sq() + 1.0).abs() <= 1e-12);
        assert!(s.state.u.dot(&s.state.a).abs() <= 1e-12);
    }
}

#[test]
fn inconsistent_initial_chain_is_rejected() {
    let k = RenormalizationConstants::new(1.0, 0.4);
    let mut init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::rest());
    init.a = SixVector::new([0.2, 0.3, 0.0, 0.0, 0.0, 0.0]);
    let zero = |_: f64, _: &MotionState| SixVector::ZERO;
    let err = integrate_motion(&init, &k, 0.0, &zero, &[1.0], &IntegratorOptions::default()).unwrap_err();
    assert!(matches!(err, Error::KinematicChain { .. }), "{err:?}");
}

#[test]
fn runaway_ends_in_step_collapse() {
    let k = RenormalizationConstants::new(1.0, 0.5);
    let mut init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::rest());
    init.a = SixVector::new([0.0, 1e-3, 0.0, 0.0, 0.0, 0.0]);
    init.adot = SixVector::new([1e-6, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let zero = |_: f64, _: &MotionState| SixVector::ZERO;
    let opts = IntegratorOptions { max_steps: 200_000, ..Default::default() };
    let err = integrate_motion(&init, &k, 1.0, &zero, &[50.0], &opts).unwrap_err();
    assert!(err.is_convergence_failure(), "{err:?}");
}
