//! Potential and field strength at sampled field points, with the
//! finite-difference field as a cross-check.

use lw6::lw_field::{field_fd_oracle, potential, field_strength};
use lw6::worldline::{kinematic_state, sphere_point};

use super::{antisym_names, base_step, field_samples, six_names, Ctx, Outcome};
use crate::report::{Cell, Check, Table};

pub fn run(ctx: &Ctx) -> Outcome {
    let tol = ctx.s.tolerances.field;
    let (w, e) = (ctx.w.as_ref(), ctx.e);
    let mut columns: Vec<String> = vec!["tau".into(), "r".into()];
    columns.extend(six_names("y"));
    columns.extend(six_names("A"));
    columns.extend(antisym_names("F"));
    columns.extend(["fd_error", "tolerance", "pass"].map(String::from));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("fields", &cols);
    let mut worst: Option<f64> = None;
    let mut failures = Vec::new();
    for p in field_samples(ctx, 5) {
        let result = (|| {
            let s = kinematic_state(w, p.tau)?;
            let y = sphere_point(&s, p.r, &p.angles)?;
            let a = potential(w, e, &y)?;
            let f = field_strength(w, e, &y)?;
            // half the finest step of the convergence check; unit charge as the field is linear in e
            let h = base_step(w, &y, ctx.s.numeric.fd_divisor)? / 8.0;
            let unit = field_strength(w, 1.0, &y)?;
            let err = (field_fd_oracle(w, 1.0, &y, h)? - unit).max_abs() / unit.max_abs().max(f64::MIN_POSITIVE);
            Ok((y, a, f, err))
        })();
        match result {
            Ok((y, a, f, err)) => {
                let mut row: Vec<Cell> = vec![p.tau.into(), p.r.into()];
                row.extend(y.0.map(Cell::Num));
                row.extend(a.0.map(Cell::Num));
                row.extend(f.0.map(Cell::Num));
                row.extend([err.into(), tol.into(), (err <= tol).into()]);
                table.push(row);
                worst = Some(super::worst(worst.unwrap_or(0.0), err));
            }
            Err(err) => failures.push(Check::failed(&format!("field at tau = {}", p.tau), &err)),
        }
    }
    let mut checks = Vec::new();
    if let Some(x) = worst {
        checks.push(Check::numeric("finite-difference field", x, tol));
    }
    checks.extend(failures);
    Outcome { tables: vec![table], checks }
}
