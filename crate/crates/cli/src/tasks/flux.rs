//! Tube fluxes at every scenario radius against their closed forms.

use lw6::flux::{coupling, flux_report, FluxReport};
use lw6::tensor6::{AntisymTensor2, SixVector};

use super::{Ctx, Outcome};
use crate::report::{Cell, Check, Table};

fn scale_of(closed: &[f64], e: f64) -> f64 {
    closed.iter().fold(0.0, |m: f64, x| m.max(x.abs())).max(1e-6 * coupling(e)).max(f64::MIN_POSITIVE)
}

struct Quantity {
    label: &'static str,
    check: &'static str,
    names: Vec<String>,
    closed: Vec<f64>,
    numeric: Vec<f64>,
    tol: f64,
}

fn vector(label: &'static str, check: &'static str, closed: SixVector, numeric: SixVector, tol: f64) -> Quantity {
    Quantity { label, check, names: super::six_names(""), closed: closed.0.to_vec(), numeric: numeric.0.to_vec(), tol }
}

fn tensor(label: &'static str, check: &'static str, closed: AntisymTensor2, numeric: AntisymTensor2, tol: f64) -> Quantity {
    Quantity {
        label,
        check,
        names: super::antisym_names(""),
        closed: closed.0.to_vec(),
        numeric: numeric.0.to_vec(),
        tol,
    }
}

fn quantities(rep: &FluxReport, ctx: &Ctx) -> [Quantity; 4] {
    let t = &ctx.s.tolerances;
    [
        vector("P_rad", "radiative momentum flux", rep.p_rad, rep.numeric.rad_momentum(), t.flux_rad),
        vector("P_bnd", "bound momentum flux", rep.p_bnd_difference(), rep.numeric.bound_momentum(), t.flux_bound),
        tensor("M_rad", "radiative angular flux", rep.m_rad, rep.numeric.rad_angular(), t.flux_bound),
        tensor("M_bnd", "bound angular flux", rep.m_bnd_difference(), rep.numeric.bound_angular(), t.flux_bound),
    ]
}

pub fn run(ctx: &Ctx) -> Outcome {
    let (t0, t1) = ctx.tau_range();
    let radii = &ctx.s.numeric.radii;
    let q = match ctx.sphere_rule() {
        Ok(q) => q,
        Err(e) => return Outcome { tables: vec![], checks: vec![Check::failed("tube flux", &e)] },
    };
    let opts = ctx.adaptive();
    let reports: Vec<lw6::Result<FluxReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = radii
            .iter()
            .map(|&r| {
                let (w, q, opts) = (ctx.w.as_ref(), &q, &opts);
                scope.spawn(move || flux_report(w, ctx.e, r, t0, t1, q, opts))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("flux worker panicked")).collect()
    });

    let mut table = Table::new(
        "flux",
        &["component", "closed_form", "numeric", "residual", "r", "tau0", "tau1", "tolerance", "pass"],
    );
    let mut checks: Vec<Check> = Vec::new();
    let mut record = |name: &str, residual: f64, tol: f64| match checks.iter_mut().find(|c| c.name == name) {
        Some(c) => {
            c.residual = Some(super::worst(c.residual.unwrap_or(0.0), residual));
            c.pass = c.pass && residual <= tol;
        }
        None => checks.push(Check::numeric(name, residual, tol)),
    };
    let mut failures = Vec::new();
    let mut first: Option<[Quantity; 4]> = None;
    let mut spread = 0.0f64;
    for (&r, rep) in radii.iter().zip(&reports) {
        let rep = match rep {
            Ok(rep) => rep,
            Err(e) => {
                failures.push(Check::failed(&format!("tube flux at r = {r}"), e));
                continue;
            }
        };
        let qs = quantities(rep, ctx);
        for q in &qs {
            let scale = scale_of(&q.closed, ctx.e);
            for ((name, c), n) in q.names.iter().zip(&q.closed).zip(&q.numeric) {
                let residual = (n - c).abs() / scale;
                table.push(vec![
                    Cell::Text(format!("{}{}", q.label, name)),
                    (*c).into(),
                    (*n).into(),
                    residual.into(),
                    r.into(),
                    t0.into(),
                    t1.into(),
                    q.tol.into(),
                    (residual <= q.tol).into(),
                ]);
                record(q.check, residual, q.tol);
            }
        }
        match &first {
            None => first = Some(qs),
            Some(base) => {
                // radiative fluxes must not depend on the tube radius
                for (a, b) in base.iter().zip(&qs).filter(|(a, _)| a.label.ends_with("rad")) {
                    let scale = scale_of(&a.closed, ctx.e);
                    let d = a.numeric.iter().zip(&b.numeric).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
                    spread = super::worst(spread, d / scale);
                }
            }
        }
    }
    if radii.len() > 1 {
        record("radiative flux radius independence", spread, ctx.s.tolerances.flux_bound);
    }
    checks.extend(failures);
    Outcome { tables: vec![table], checks }
}
