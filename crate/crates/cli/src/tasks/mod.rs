//! Task dispatch and the helpers shared by the tasks.

mod fields;
mod flux;
mod simulate;
mod sweep;
mod verify;

use std::time::Instant;

use lw6::balance::RenormalizationConstants;
use lw6::flux::{AdaptiveOptions, AngularRule, SphereQuadrature};
use lw6::tensor6::{AntisymTensor2, SixVector};
use lw6::worldline::{retarded_frame, SphereAngles, Worldline};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Scenario, Task};
use crate::report::{Cell, Check, FailureClass, Metadata, Report, Table};

/// Scenario with its worldline and constants built.
pub struct Ctx<'a> {
    pub s: &'a Scenario,
    pub w: Box<dyn Worldline>,
    pub k: RenormalizationConstants,
    pub e: f64,
}

impl<'a> Ctx<'a> {
    fn new(s: &'a Scenario) -> Self {
        Ctx { s, w: s.worldline(), k: s.constants.constants(), e: s.charge.e }
    }

    fn tau_range(&self) -> (f64, f64) {
        (self.s.numeric.tau[0], self.s.numeric.tau[1])
    }

    /// Independent random stream per use, fixed by the scenario seed.
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.s.scenario.seed);
        rng.set_stream(stream);
        rng
    }

    fn sphere_rule(&self) -> lw6::Result<SphereQuadrature> {
        let [nt, np] = self.s.numeric.sphere_nodes;
        SphereQuadrature::new(AngularRule::PolynomialExact, nt, np)
    }

    fn adaptive(&self) -> AdaptiveOptions {
        AdaptiveOptions {
            rel_tol: self.s.numeric.quad_rel_tol,
            initial_panels: self.s.numeric.initial_panels,
            ..AdaptiveOptions::default()
        }
    }
}

/// Angles away from the chart poles and seam.
fn random_angles(rng: &mut impl Rng) -> SphereAngles {
    let pi = std::f64::consts::PI;
    SphereAngles::new(
        rng.gen_range(0.2..pi - 0.2),
        rng.gen_range(0.2..pi - 0.2),
        rng.gen_range(0.2..pi - 0.2),
        rng.gen_range(0.1..2.0 * pi - 0.1),
    )
}

/// Field-point sample: retarded proper time, radius and direction.
#[derive(Clone, Copy, Debug)]
struct FieldSample {
    tau: f64,
    r: f64,
    angles: SphereAngles,
}

fn field_samples(ctx: &Ctx, stream: u64) -> Vec<FieldSample> {
    let (t0, t1) = ctx.tau_range();
    let [r0, r1] = ctx.s.numeric.field_radius;
    let mut rng = ctx.rng(stream);
    (0..ctx.s.numeric.samples)
        .map(|_| {
            let tau = rng.gen_range(t0..=t1);
            let r = if r0 < r1 { rng.gen_range(r0..r1) } else { r0 };
            FieldSample { tau, r, angles: random_angles(&mut rng) }
        })
        .collect()
}

fn sample_taus(ctx: &Ctx, stream: u64) -> Vec<f64> {
    let (t0, t1) = ctx.tau_range();
    let mut rng = ctx.rng(stream);
    (0..ctx.s.numeric.samples).map(|_| rng.gen_range(t0..=t1)).collect()
}

/// Base finite-difference step at a field point: the retarded distance over
/// `divisor` times the curvature scale and `(u⁰)²`.
fn base_step(w: &dyn Worldline, y: &SixVector, divisor: f64) -> lw6::Result<f64> {
    let f = retarded_frame(w, y)?;
    let s = &f.state;
    let scale = 1f64.max(s.a.euclid()).max(s.adot.euclid().sqrt()).max(s.addot.euclid().cbrt());
    Ok(f.r / (divisor * scale * s.u.time() * s.u.time()))
}

fn six_names(prefix: &str) -> Vec<String> {
    (0..6).map(|i| format!("{prefix}{i}")).collect()
}

fn antisym_names(prefix: &str) -> Vec<String> {
    AntisymTensor2::ZERO.upper_entries().map(|(i, j, _)| format!("{prefix}{i}{j}")).collect()
}

/// Largest residual that propagates NaN.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Tables and checks produced by one task or suite.
#[derive(Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn extend(&mut self, other: Outcome) {
        self.tables.extend(other.tables);
        self.checks.extend(other.checks);
    }
}

/// Residual table with one check per distinct label, keeping the worst
/// residual seen for it.
struct Suite {
    table: Table,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &str) -> Self {
        Suite { table: Table::new(name, &["check", "tau", "r", "residual", "tolerance", "pass"]), checks: Vec::new() }
    }

    fn row(&mut self, label: &str, class: FailureClass, tau: Option<f64>, r: Option<f64>, residual: f64, tol: f64) {
        let pass = residual <= tol;
        let cell = |x: Option<f64>| x.map_or(Cell::Text("-".into()), Cell::Num);
        self.table.push(vec![label.into(), cell(tau), cell(r), residual.into(), tol.into(), pass.into()]);
        match self.checks.iter_mut().find(|c| c.name == label) {
            Some(c) => {
                let r = worst(c.residual.unwrap_or(f64::NAN), residual);
                c.residual = Some(r);
                c.pass = c.pass && pass;
            }
            None => self.checks.push(match class {
                FailureClass::Numeric => Check::numeric(label, residual, tol),
                FailureClass::Convergence => Check::convergence(label, residual, tol),
            }),
        }
    }

    fn numeric(&mut self, label: &str, tau: f64, r: Option<f64>, residual: f64, tol: f64) {
        self.row(label, FailureClass::Numeric, Some(tau), r, residual, tol);
    }

    /// Convergence check over a whole sample set, with no single `τ` or `r`.
    fn convergence_over_samples(&mut self, label: &str, residual: f64, tol: f64) {
        self.row(label, FailureClass::Convergence, None, None, residual, tol);
    }

    fn fail(&mut self, label: &str, err: &lw6::Error) {
        self.checks.push(Check::failed(label, err));
    }

    fn finish(self) -> Outcome {
        Outcome { tables: vec![self.table], checks: self.checks }
    }
}

/// Runs `task` on a validated scenario.
pub fn run(task: Task, s: &Scenario, quick: bool) -> Report {
    let start = Instant::now();
    let ctx = Ctx::new(s);
    let mut timings = Vec::new();
    let outcome = match task {
        Task::Verify => verify::run(&ctx, &mut timings),
        Task::Flux => flux::run(&ctx),
        Task::Sweep => sweep::run(&ctx),
        Task::Simulate => simulate::run(&ctx),
        Task::Fields => fields::run(&ctx),
    };
    timings.push(("total".to_string(), start.elapsed().as_secs_f64()));
    Report {
        metadata: Metadata {
            tool: "lw6".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            task: task.name().into(),
            quick,
            scenario: s.echo(),
            timings: if s.output.timings { timings } else { Vec::new() },
        },
        tables: outcome.tables,
        checks: outcome.checks,
    }
}

/// Column documentation, printed by `--help-columns`.
pub const COLUMNS_HELP: &str = "\
Every table ends with `tolerance` and `pass`; in CSV output each row starts
with the table name. All quantities are in the laboratory frame, proper time
tau, six-vector components indexed 0..5 with 0 the time axis, antisymmetric
tensors by their upper entries ij with i < j.

verify: one table per suite with columns
  check, tau, r, residual, tolerance, pass
  (r is `-` when the check is not taken on a tube or field point; tau and r
  are both `-` for convergence orders, which are taken over the sample set)

flux: table `flux`
  component, closed_form, numeric, residual, r, tau0, tau1, tolerance, pass
  component is P_rad<i>, P_bnd<i>, M_rad<ij> or M_bnd<ij>; residual is
  |numeric - closed_form| over the largest closed-form entry of the same
  quantity (floored at 1e-6 e^2/4pi^2)

sweep: tables
  `sweep`        r, |P_bnd r^-3|, |P_bnd r^-2|, |P_bnd r^-1|, P_bnd0..5, residual, tolerance, pass
  `exponents`    power, fitted, expected_present, deviation, tolerance, pass
  `coefficients` power, component, fitted, expected, residual, tolerance, pass
  `spin`         component, fitted, expected, residual, tolerance, pass
  `endpoint`     power, magnitude, present, residual, tolerance, pass
  (fitted is `absent` when a power bin vanishes; `endpoint` fits the
  closed-form bound momentum at tau1 across the radii)

simulate: table `trajectory`
  tau, z0..z5, u0..u5, a0..a5, drift, p_part0..p_part5, s2, tolerance,
  deviation, deviation_tolerance, pass
  drift is |u.u + 1| / u0^2 before projection, tolerance its bound;
  deviation is the distance to the reference trajectory (`-` when none)

fields: table `fields`
  tau, r, y0..y5, A0..A5, F01..F45, fd_error, tolerance, pass
  fd_error is the relative error of the fourth-order finite-difference
  field at half the finest of the convergence-check steps
";
