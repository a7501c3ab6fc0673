//! Radius sweep: power-law structure of the bound fluxes.

use lw6::flux::closed::relative_residual;
use lw6::flux::{bound_momentum, bound_momentum_terms, fit_inverse_powers, sweep_radius};
use lw6::tensor6::SixVector;
use lw6::worldline::kinematic_state;

use super::{antisym_names, Ctx, Outcome};
use crate::report::{Cell, Check, Table};

const POWERS: [i32; 3] = [-3, -2, -1];

/// Terms below this fraction of the largest term count as absent.
const ABSENT: f64 = 1e-9;

fn presence(magnitudes: &[f64]) -> Vec<bool> {
    let top = magnitudes.iter().copied().fold(0.0, f64::max);
    magnitudes.iter().map(|m| top > 0.0 && *m > ABSENT * top).collect()
}

fn yes_no(b: bool) -> Cell {
    Cell::Text(if b { "yes" } else { "no" }.into())
}

pub fn run(ctx: &Ctx) -> Outcome {
    let t = &ctx.s.tolerances;
    let (t0, t1) = ctx.tau_range();
    let radii = &ctx.s.numeric.radii;
    let (w, e) = (ctx.w.as_ref(), ctx.e);
    let sweep = ctx.sphere_rule().and_then(|q| sweep_radius(w, e, radii, t0, t1, &q, &ctx.adaptive()));
    let sweep = match sweep {
        Ok(s) => s,
        Err(err) => return Outcome { tables: vec![], checks: vec![Check::failed("radius sweep", &err)] },
    };
    let mut checks = Vec::new();

    let mut fluxes = Table::new(
        "sweep",
        &["r", "|P_bnd r^-3|", "|P_bnd r^-2|", "|P_bnd r^-1|", "P_bnd0", "P_bnd1", "P_bnd2", "P_bnd3", "P_bnd4", "P_bnd5", "residual", "tolerance", "pass"],
    );
    let mut worst_flux = 0.0f64;
    for (r, f) in radii.iter().zip(&sweep.fluxes) {
        let closed: SixVector = sweep
            .momentum_expected
            .iter()
            .zip(POWERS)
            .fold(SixVector::ZERO, |acc, (c, p)| acc + *c * r.powi(p));
        let numeric = f.bound_momentum();
        let residual = relative_residual(&numeric.0, &closed.0, 1e-6 * lw6::flux::coupling(e));
        worst_flux = super::worst(worst_flux, residual);
        let mut row: Vec<Cell> = vec![(*r).into()];
        row.extend(POWERS.map(|p| Cell::Num(f.bound_momentum_at_power(p).euclid())));
        row.extend(numeric.0.map(Cell::Num));
        row.extend([residual.into(), t.flux_bound.into(), (residual <= t.flux_bound).into()]);
        fluxes.push(row);
    }
    checks.push(Check::numeric("bound momentum flux", worst_flux, t.flux_bound));

    let expected = presence(&sweep.momentum_expected.map(|c| c.euclid()));
    let mut exponents = Table::new("exponents", &["power", "fitted", "expected_present", "deviation", "tolerance", "pass"]);
    let mut mismatches = 0usize;
    for (bin, &want) in sweep.momentum_exponents.iter().zip(&expected) {
        match bin.fitted {
            Some(x) => {
                let dev = (x - bin.power as f64).abs();
                let pass = want && dev <= t.exponent;
                mismatches += usize::from(!want);
                exponents.push(vec![bin.power.into(), x.into(), yes_no(want), dev.into(), t.exponent.into(), pass.into()]);
                let mut c = Check::convergence(&format!("exponent r^{}", bin.power), dev, t.exponent);
                c.pass = pass;
                checks.push(c);
            }
            None => {
                mismatches += usize::from(want);
                exponents.push(vec![bin.power.into(), "absent".into(), yes_no(want), Cell::Text("-".into()), t.exponent.into(), (!want).into()]);
            }
        }
    }
    checks.push(Check::numeric("bin presence matches closed form", mismatches as f64, 0.0));
    checks.push(Check::convergence("fit condition number", sweep.condition, t.condition));

    let mut coeffs = Table::new("coefficients", &["power", "component", "fitted", "expected", "residual", "tolerance", "pass"]);
    let floor = (1e-6 * lw6::flux::coupling(e)).max(f64::MIN_POSITIVE);
    let scale = sweep.momentum_expected.iter().fold(floor, |m: f64, v| m.max(v.max_abs()));
    for ((p, fit), exp) in POWERS.iter().zip(&sweep.momentum_coefficients).zip(&sweep.momentum_expected) {
        for i in 0..6 {
            let residual = (fit[i] - exp[i]).abs() / scale;
            coeffs.push(vec![
                (*p).into(),
                Cell::Text(format!("P_bnd{i}")),
                fit[i].into(),
                exp[i].into(),
                residual.into(),
                t.momentum_fit.into(),
                (residual <= t.momentum_fit).into(),
            ]);
        }
    }
    checks.push(Check::numeric("bound momentum coefficients", sweep.momentum_residual(), t.momentum_fit));

    let mut spin = Table::new("spin", &["component", "fitted", "expected", "residual", "tolerance", "pass"]);
    let sscale = sweep.spin_expected.max_abs().max(floor);
    for ((name, fit), exp) in antisym_names("S").iter().zip(sweep.spin_coefficient.0).zip(sweep.spin_expected.0) {
        let residual = (fit - exp).abs() / sscale;
        spin.push(vec![name.as_str().into(), fit.into(), exp.into(), residual.into(), t.spin.into(), (residual <= t.spin).into()]);
    }
    checks.push(Check::numeric("r^-1 spin coefficient", sweep.spin_residual(), t.spin));

    let mut endpoint = Table::new("endpoint", &["power", "magnitude", "present", "residual", "tolerance", "pass"]);
    let fitted = kinematic_state(w, t1).and_then(|s| {
        let rows = radii.iter().map(|&r| bound_momentum(&s, e, r).map(|p| p.0.to_vec())).collect::<lw6::Result<Vec<_>>>()?;
        let (c, _) = fit_inverse_powers(radii, &rows, &POWERS)?;
        Ok((c, bound_momentum_terms(&s, e)))
    });
    match fitted {
        Ok((c, terms)) => {
            let mags: Vec<f64> = c.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
            let present = presence(&mags);
            let tscale = terms.iter().fold(0.0, |m: f64, v| m.max(v.max_abs())).max(f64::MIN_POSITIVE);
            let mut worst_end = 0.0f64;
            for (j, p) in POWERS.iter().enumerate() {
                let residual = c[j].iter().zip(terms[j].0).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs())) / tscale;
                worst_end = super::worst(worst_end, residual);
                let pass = residual <= t.momentum_fit;
                endpoint.push(vec![(*p).into(), mags[j].into(), yes_no(present[j]), residual.into(), t.momentum_fit.into(), pass.into()]);
            }
            checks.push(Check::numeric("endpoint bound momentum fit", worst_end, t.momentum_fit));
        }
        Err(err) => checks.push(Check::failed("endpoint bound momentum fit", &err)),
    }

    Outcome { tables: vec![fluxes, exponents, coeffs, spin, endpoint], checks }
}
