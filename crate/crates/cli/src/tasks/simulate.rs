//! Integration of the equation of motion from the scenario worldline's state
//! at `tau0`.

use lw6::balance::{integrate_motion, required_force, EquationOrder, IntegratorOptions, MotionState};
use lw6::tensor6::SixVector;
use lw6::worldline::kinematic_state;

use super::{six_names, Ctx, Outcome};
use crate::config::ForceKind;
use crate::report::{Cell, Check, Table};

/// Exact solution the integration can be compared with, when one exists.
enum Reference {
    None,
    /// Uniform motion from the initial point.
    Uniform { z: SixVector, u: SixVector, tau0: f64 },
    /// Hyperbolic motion in the (0,1)-plane with proper acceleration `g`.
    Hyperbolic { z: SixVector, rapidity: f64, g: f64, tau0: f64 },
    /// The scenario worldline itself.
    Worldline,
}

impl Reference {
    fn position_velocity(&self, ctx: &Ctx, tau: f64) -> Option<(SixVector, SixVector)> {
        match *self {
            Reference::None => None,
            Reference::Uniform { z, u, tau0 } => Some((z + u * (tau - tau0), u)),
            Reference::Hyperbolic { z, rapidity, g, tau0 } => {
                let eta = rapidity + g * (tau - tau0);
                let mut dz = SixVector::ZERO;
                dz[0] = (eta.sinh() - rapidity.sinh()) / g;
                dz[1] = (eta.cosh() - rapidity.cosh()) / g;
                let mut u = SixVector::ZERO;
                u[0] = eta.cosh();
                u[1] = eta.sinh();
                Some((z + dz, u))
            }
            Reference::Worldline => kinematic_state(ctx.w.as_ref(), tau).ok().map(|s| (s.z, s.u)),
        }
    }
}

fn reference(ctx: &Ctx, init: &MotionState) -> Reference {
    let order = EquationOrder::for_constants(&ctx.k, ctx.e);
    let at_rest_in_plane = init.u.0[2..].iter().all(|x| *x == 0.0);
    let unaccelerated = [init.a, init.adot, init.addot].iter().all(|v| v.max_abs() == 0.0);
    match ctx.s.force.kind {
        ForceKind::Prescribed => Reference::Worldline,
        ForceKind::None if unaccelerated || order == EquationOrder::Newtonian => {
            Reference::Uniform { z: init.z, u: init.u, tau0: init.tau }
        }
        ForceKind::Constant if order == EquationOrder::Newtonian && at_rest_in_plane => {
            let g = ctx.s.force.magnitude / ctx.k.m;
            if g == 0.0 {
                Reference::Uniform { z: init.z, u: init.u, tau0: init.tau }
            } else {
                Reference::Hyperbolic { z: init.z, rapidity: init.u[1].asinh(), g, tau0: init.tau }
            }
        }
        _ => Reference::None,
    }
}

pub fn run(ctx: &Ctx) -> Outcome {
    let n = &ctx.s.numeric;
    let t = &ctx.s.tolerances;
    let (t0, t1) = ctx.tau_range();
    let init = match kinematic_state(ctx.w.as_ref(), t0) {
        Ok(s) => MotionState::from_kinematic(&s),
        Err(err) => return Outcome { tables: vec![], checks: vec![Check::failed("initial state", &err)] },
    };
    let f = ctx.s.force.magnitude;
    let w = ctx.w.as_ref();
    let (k, e) = (&ctx.k, ctx.e);
    let force = move |tau: f64, st: &MotionState| -> SixVector {
        match ctx.s.force.kind {
            ForceKind::None => SixVector::ZERO,
            ForceKind::Constant => {
                let mut v = SixVector::ZERO;
                v[0] = f * st.u[1];
                v[1] = f * st.u[0];
                v
            }
            ForceKind::Prescribed => kinematic_state(w, tau)
                .map(|s| required_force(&s, k, e))
                .unwrap_or(SixVector([f64::NAN; 6])),
        }
    };
    let times: Vec<f64> = (1..=n.outputs).map(|i| t0 + (t1 - t0) * i as f64 / n.outputs as f64).collect();
    let opts = IntegratorOptions {
        rel_tol: n.integrator_rel_tol,
        abs_tol: n.integrator_abs_tol,
        max_step: n.max_step,
        max_steps: n.max_steps,
        drift_bound: t.drift,
        ..IntegratorOptions::default()
    };
    let traj = match integrate_motion(&init, k, e, &force, &times, &opts) {
        Ok(traj) => traj,
        Err(err) => return Outcome { tables: vec![], checks: vec![Check::failed("integration", &err)] },
    };

    let reference = reference(ctx, &init);
    let mut columns: Vec<String> = vec!["tau".into()];
    for prefix in ["z", "u", "a"] {
        columns.extend(six_names(prefix));
    }
    columns.push("drift".into());
    columns.extend(six_names("p_part"));
    columns.extend(["s2", "tolerance", "deviation", "deviation_tolerance", "pass"].map(String::from));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("trajectory", &cols);
    let mut worst_dev: Option<f64> = None;
    for sample in &traj.samples {
        let st = &sample.state;
        let dev = reference.position_velocity(ctx, st.tau).map(|(z, u)| {
            let dz = (st.z - z).max_abs() / z.max_abs().max(1.0);
            let du = (st.u - u).max_abs() / u.max_abs();
            dz.max(du)
        });
        let mut row: Vec<Cell> = vec![st.tau.into()];
        for v in [st.z, st.u, st.a] {
            row.extend(v.0.map(Cell::Num));
        }
        row.push(sample.drift.into());
        row.extend(sample.p_part.0.map(Cell::Num));
        row.extend([sample.s2.into(), t.drift.into()]);
        let mut pass = sample.drift <= t.drift;
        match dev {
            Some(d) => {
                worst_dev = Some(super::worst(worst_dev.unwrap_or(0.0), d));
                pass &= d <= t.reference;
                row.extend([d.into(), t.reference.into()]);
            }
            None => row.extend([Cell::Text("-".into()), Cell::Text("-".into())]),
        }
        row.push(pass.into());
        table.push(row);
    }
    let mut checks = vec![Check::numeric("constraint drift", traj.max_drift, t.drift)];
    if let Some(d) = worst_dev {
        checks.push(Check::numeric("deviation from reference", d, t.reference));
    }
    Outcome { tables: vec![table], checks }
}
