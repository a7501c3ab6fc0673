//! Invariant suites on the scenario worldline, run concurrently and merged
//! in a fixed order.

use std::time::Instant;

use lw6::balance::{
    angular_balance_residual, appendix_chain_check, momentum_balance_residual, momentum_from_wedge_solution,
    particle_momentum, required_force, rest_mass, spin_magnitude, total_closure, GaugeFunction,
};
use lw6::flux::sphere::sphere_moments_unchecked;
use lw6::flux::{coupling, flux_report, AngularRule, SphereMoments, SphereQuadrature};
use lw6::lw_field::{field_fd_oracle, field_strength, gauge_residual, wave_residual};
use lw6::tensor6::AntisymTensor2;
use lw6::stress_energy::{null_contraction_check, stress_energy_split};
use lw6::worldline::{kinematic_state, retarded_frame, sphere_point, RetardedFrame};

use super::{base_step, field_samples, sample_taus, Ctx, Outcome, Suite};

type SuiteFn = fn(&Ctx) -> Outcome;

const SUITES: [(&str, SuiteFn); 6] = [
    ("moments", moments),
    ("kinematics", kinematics),
    ("fields", fields),
    ("stress", stress),
    ("flux", flux),
    ("balance", balance),
];

pub fn run(ctx: &Ctx, timings: &mut Vec<(String, f64)>) -> Outcome {
    let results: Vec<(Outcome, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = SUITES
            .iter()
            .map(|(_, f)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let out = f(ctx);
                    (out, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite panicked")).collect()
    });
    let mut all = Outcome::default();
    for ((name, _), (out, secs)) in SUITES.iter().zip(results) {
        timings.push((format!("verify.{name}"), secs));
        all.extend(out);
    }
    all
}

fn moments(ctx: &Ctx) -> Outcome {
    let mut suite = Suite::new("moments");
    let tol = ctx.s.tolerances.moments;
    let n = ctx.s.numeric.moment_nodes;
    let tau = ctx.tau_range().0;
    let result = (|| {
        let q = SphereQuadrature::new(AngularRule::PolynomialExact, n, n)?;
        let s = kinematic_state(ctx.w.as_ref(), tau)?;
        let (m, _) = sphere_moments_unchecked(&q, &s.u)?;
        Ok(m.errors_against(&SphereMoments::closed_form(&s.u)))
    })();
    match result {
        Ok(err) => {
            for (label, v) in [
                ("moment 0", err.zeroth),
                ("moment 1", err.first),
                ("moment 2", err.second),
                ("moment 3", err.third),
                ("moment 4", err.fourth),
            ] {
                suite.numeric(label, tau, None, v, tol);
            }
        }
        Err(e) => suite.fail("angular moments", &e),
    }
    suite.finish()
}

fn kinematics(ctx: &Ctx) -> Outcome {
    let mut suite = Suite::new("kinematics");
    let tol = ctx.s.tolerances.chain;
    for tau in sample_taus(ctx, 1) {
        match ctx.w.evaluate(tau) {
            Ok(s) => suite.numeric("kinematic chain", tau, None, s.chain_residuals().max(), tol),
            Err(e) => suite.fail("kinematic chain", &e),
        }
    }
    suite.finish()
}

fn frobenius(t: &AntisymTensor2) -> f64 {
    t.0.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Distance of the observed order from `order`, read from the RMS residual
/// of the whole sample set at h, h/2, h/4. A single point can sit where the
/// leading error coefficient nearly cancels, so the set is the unit.
fn order_error(sum_sq: [f64; 3], order: f64) -> f64 {
    let rms = sum_sq.map(f64::sqrt);
    [rms[0] / rms[1], rms[1] / rms[2]].iter().map(|q| (q.log2() - order).abs()).fold(0.0, f64::max)
}

fn fields(ctx: &Ctx) -> Outcome {
    let mut suite = Suite::new("fields");
    let tol = ctx.s.tolerances.order;
    // fields are linear in e; a unit charge keeps the orders defined at e = 0
    let (e, w) = (1.0, ctx.w.as_ref());
    let mut sums = [[0.0; 3]; 3];
    let mut failed = false;
    for p in field_samples(ctx, 2) {
        let result = (|| {
            let s = kinematic_state(w, p.tau)?;
            let y = sphere_point(&s, p.r, &p.angles)?;
            let exact = field_strength(w, e, &y)?;
            let h = base_step(w, &y, ctx.s.numeric.fd_divisor)?;
            let mut sq = [[0.0; 3]; 3];
            for (j, f) in [1.0, 0.5, 0.25].into_iter().enumerate() {
                sq[0][j] = frobenius(&(field_fd_oracle(w, e, &y, h * f)? - exact)).powi(2);
                sq[1][j] = gauge_residual(w, e, &y, h * f)?.powi(2);
                sq[2][j] = wave_residual(w, e, &y, h * f)?.euclid().powi(2);
            }
            Ok(sq)
        })();
        match result {
            Ok(sq) => {
                for (sum, x) in sums.iter_mut().zip(sq) {
                    for j in 0..3 {
                        sum[j] += x[j];
                    }
                }
            }
            Err(err) => {
                failed = true;
                suite.fail("field convergence", &err);
            }
        }
    }
    if !failed {
        suite.convergence_over_samples("field FD order", order_error(sums[0], 4.0), tol);
        suite.convergence_over_samples("gauge residual order", order_error(sums[1], 4.0), tol);
        suite.convergence_over_samples("wave residual order", order_error(sums[2], 2.0), tol);
    }
    suite.finish()
}

fn stress(ctx: &Ctx) -> Outcome {
    let mut suite = Suite::new("stress");
    let t = &ctx.s.tolerances;
    let (e, w) = (ctx.e, ctx.w.as_ref());
    for p in field_samples(ctx, 3) {
        let frame = kinematic_state(w, p.tau)
            .and_then(|s| sphere_point(&s, p.r, &p.angles))
            .and_then(|y| retarded_frame(w, &y));
        let f = match frame {
            Ok(f) => f,
            Err(err) => {
                suite.fail("stress-energy split", &err);
                continue;
            }
        };
        let split = stress_energy_split(&f, e);
        let scale = split.scale().max(f64::MIN_POSITIVE);
        let recon = (split.reconstructed() - split.total).max_abs() / scale;
        suite.numeric("decomposition", p.tau, Some(p.r), recon, t.decomposition);
        let (rad, t5) = null_contraction_check(&split, &f.k);
        let kscale = scale * f.k.euclid();
        suite.numeric("k.T_rad", p.tau, Some(p.r), rad / kscale, t.null);
        suite.numeric("k.T_(-5)", p.tau, Some(p.r), t5 / kscale, t.null);
        let far = stress_energy_split(&RetardedFrame::from_state(f.state, 2.0 * f.r, f.k), e);
        let near = stress_energy_split(&RetardedFrame::from_state(f.state, f.r, f.k), e);
        let pieces = std::iter::once((4i32, near.rad, far.rad))
            .chain((5..=8usize).map(|k| (k as i32, *near.bound_by_power(k), *far.bound_by_power(k))));
        let rescale = pieces.fold(0.0, |m: f64, (kappa, a, b)| {
            let expected = a * 2f64.powi(-kappa);
            let size = expected.max_abs();
            let diff = (b - expected).max_abs();
            m.max(if size > 0.0 { diff / size } else { diff / scale })
        });
        suite.numeric("grade rescaling", p.tau, Some(p.r), rescale, t.rescaling);
    }
    suite.finish()
}

fn flux(ctx: &Ctx) -> Outcome {
    let mut suite = Suite::new("flux");
    let t = &ctx.s.tolerances;
    let (t0, t1) = ctx.tau_range();
    let r = ctx.s.numeric.radii[0];
    let result = ctx.sphere_rule().and_then(|q| flux_report(ctx.w.as_ref(), ctx.e, r, t0, t1, &q, &ctx.adaptive()));
    match result {
        Ok(rep) => {
            let res = rep.residuals;
            suite.numeric("radiative momentum flux", t1, Some(r), res.p_rad, t.flux_rad);
            suite.numeric("bound momentum flux", t1, Some(r), res.p_bnd, t.flux_bound);
            suite.numeric("radiative angular flux", t1, Some(r), res.m_rad, t.flux_bound);
            suite.numeric("bound angular flux", t1, Some(r), res.m_bnd, t.flux_bound);
        }
        Err(err) => suite.fail("tube flux", &err),
    }
    suite.finish()
}

fn balance(ctx: &Ctx) -> Outcome {
    let mut suite = Suite::new("balance");
    let t = &ctx.s.tolerances;
    let (k, e, w) = (&ctx.k, ctx.e, ctx.w.as_ref());
    let tau_ref = ctx.tau_range().0;
    let alt = k.clone().with_nu(match k.nu {
        GaugeFunction::Zero => GaugeFunction::Sine { amplitude: 0.7, frequency: 1.3 },
        _ => GaugeFunction::Zero,
    });
    for tau in sample_taus(ctx, 4) {
        let result = (|| -> lw6::Result<()> {
            let s = kinematic_state(w, tau)?;
            let p = particle_momentum(&s, k, e);
            let f = required_force(&s, k, e);
            let scale = f.max_abs().max(p.max_abs()).max(k.m.abs() + k.mu.abs() + coupling(e));
            let p_alt = particle_momentum(&s, &alt, e);
            suite.numeric("momentum independent of nu", tau, None, (p - p_alt).max_abs() / scale, t.gauge_invariance);
            let pw = momentum_from_wedge_solution(w, k, e, tau)?;
            let pw_alt = momentum_from_wedge_solution(w, &alt, e, tau)?;
            let wedge = (pw - p).max_abs().max((pw_alt - p).max_abs()) / scale;
            suite.numeric("wedge-system momentum", tau, None, wedge, t.wedge);
            let r = momentum_balance_residual(w, k, e, tau, &f)?;
            suite.numeric("momentum balance", tau, None, r.max_abs() / scale, t.balance);
            suite.numeric("angular balance", tau, None, angular_balance_residual(w, k, e, tau)?.relative, t.angular);
            suite.numeric("consistency chain", tau, None, appendix_chain_check(w, k, e, tau)?.max(), t.balance);
            let sm = spin_magnitude(&s, k, e);
            let sscale = sm.closed.abs().max(k.mu * k.mu * s.a2()).max(1e-3);
            suite.numeric("spin magnitude", tau, None, (sm.closed - sm.contraction).abs() / sscale, t.identity);
            let m = rest_mass(&s, k, e);
            suite.numeric("rest mass", tau, None, (m.closed - m.contraction).abs() / m.closed.abs().max(1.0), t.identity);
            let c = total_closure(w, k, e, tau, tau_ref, &f)?;
            suite.numeric("total closure", tau, None, c.momentum.max(c.angular), t.closure);
            Ok(())
        })();
        if let Err(err) = result {
            suite.fail("balance", &err);
        }
    }
    suite.finish()
}
