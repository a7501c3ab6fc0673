mod common;

use lw6::balance::{
    angular_balance_residual, appendix_chain_check, momentum_balance_residual, momentum_from_wedge_solution,
    particle_momentum, required_force, rest_mass, spin_magnitude, total_closure, GaugeFunction,
    RenormalizationConstants,
};
use lw6::worldline::{kinematic_state, HelicalMotion, HyperbolicMotion, LogRapidityMotion, Worldline};
use rand::Rng;

use common::{random_tau, rng};

fn accelerated() -> Vec<(&'static str, Box<dyn Worldline>)> {
    vec![
        ("hyperbolic", Box::new(HyperbolicMotion::new(0.8).unwrap())),
        ("helical", Box::new(HelicalMotion::new(1.0, 0.5, 0.2).unwrap())),
        ("log-rapidity", Box::new(LogRapidityMotion::new(1.0).unwrap())),
    ]
}

fn gauges() -> [GaugeFunction; 3] {
    [
        GaugeFunction::Zero,
        GaugeFunction::Sine { amplitude: 0.7, frequency: 1.3 },
        GaugeFunction::Polynomial(vec![0.2, -0.5, 0.1]),
    ]
}

#[test]
fn momentum_is_independent_of_gauge() {
    let mut rng = rng(31);
    for (name, w) in accelerated() {
        for _ in 0..20 {
            let tau = random_tau(w.as_ref(), &mut rng);
            let s = kinematic_state(w.as_ref(), tau).unwrap();
            let base = RenormalizationConstants::new(1.1, 0.4);
            let p0 = particle_momentum(&s, &base, 1.0);
            let w0 = momentum_from_wedge_solution(w.as_ref(), &base, 1.0, tau).unwrap();
            for nu in gauges() {
                let k = base.clone().with_nu(nu);
                let p = particle_momentum(&s, &k, 1.0);
                assert!((p - p0).max_abs() <= 1e-13 * p0.max_abs(), "{name}");
                // the wedge solution reproduces p for every ν
                let pw = momentum_from_wedge_solution(w.as_ref(), &k, 1.0, tau).unwrap();
                assert!((pw - w0).max_abs() <= 1e-9 * p0.max_abs(), "{name}: {:e}", (pw - w0).max_abs());
                assert!((pw - p).max_abs() <= 1e-9 * p0.max_abs(), "{name}");
            }
        }
    }
}

#[test]
fn balance_holds_at_random_times_and_constants() {
    let mut rng = rng(32);
    for (name, w) in accelerated() {
        for _ in 0..50 {
            let tau = random_tau(w.as_ref(), &mut rng);
            let k = RenormalizationConstants::new(rng.gen_range(0.1..3.0), rng.gen_range(-1.0..1.0))
                .with_nu(GaugeFunction::Sine { amplitude: rng.gen_range(-1.0..1.0), frequency: 0.9 });
            let e = rng.gen_range(0.2..2.0);
            let s = kinematic_state(w.as_ref(), tau).unwrap();
            let f = required_force(&s, &k, e);
            let r = momentum_balance_residual(w.as_ref(), &k, e, tau, &f).unwrap();
            let scale = f.max_abs().max(particle_momentum(&s, &k, e).max_abs());
            assert!(r.max_abs() <= 1e-8 * scale, "{name} τ={tau}: {:e}", r.max_abs() / scale);
            let ang = angular_balance_residual(w.as_ref(), &k, e, tau).unwrap();
            assert!(ang.relative <= 1e-9, "{name} τ={tau}: {ang:?}");
            let chain = appendix_chain_check(w.as_ref(), &k, e, tau).unwrap();
            assert!(chain.max() <= 1e-8, "{name} τ={tau}: {chain:?}");
        }
    }
}

#[test]
fn spin_and_rest_mass_identities() {
    let mut rng = rng(33);
    for (name, w) in accelerated() {
        for _ in 0..50 {
            let tau = random_tau(w.as_ref(), &mut rng);
            let k = RenormalizationConstants::new(rng.gen_range(0.1..3.0), rng.gen_range(-1.0..1.0));
            let e = rng.gen_range(0.0..2.0);
            let s = kinematic_state(w.as_ref(), tau).unwrap();
            let sm = spin_magnitude(&s, &k, e);
            let scale = sm.closed.abs().max(k.mu * k.mu * s.a2()).max(1e-3);
            assert!((sm.closed - sm.contraction).abs() <= 1e-12 * scale, "{name}: {sm:?}");
            let m = rest_mass(&s, &k, e);
            assert!((m.closed - m.contraction).abs() <= 1e-12 * m.closed.abs().max(1.0), "{name}: {m:?}");
        }
    }
}

#[test]
fn total_momentum_and_angular_momentum_close() {
    let k = RenormalizationConstants::new(1.3, 0.6).with_nu(GaugeFunction::Sine { amplitude: 0.5, frequency: 1.0 });
    for (name, w) in accelerated() {
        let (lo, _) = w.domain();
        let tau_ref = if lo > 0.0 { 1.0 } else { 0.0 };
        for tau in [tau_ref + 0.4, tau_ref + 1.1] {
            let s = kinematic_state(w.as_ref(), tau).unwrap();
            let f = required_force(&s, &k, 1.0);
            let c = total_closure(w.as_ref(), &k, 1.0, tau, tau_ref, &f).unwrap();
            assert!(c.momentum <= 1e-8 && c.angular <= 1e-8, "{name} τ={tau}: {c:?}");
        }
    }
}
