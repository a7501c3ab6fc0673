//! Equation of motion of the dressed charge under an external force,
//! integrated with an embedded Dormand-Prince 5(4) pair and projection onto
//! the kinematic constraint surface.

use super::{particle_momentum, particle_momentum_rate, spin_magnitude, RenormalizationConstants};
use crate::error::{Error, Result};
use crate::flux::{coupling, radiated_rate};
use crate::tensor6::SixVector;
use crate::worldline::KinematicState;

/// Phase point of the equation of motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionState {
    pub tau: f64,
    pub z: SixVector,
    pub u: SixVector,
    pub a: SixVector,
    pub adot: SixVector,
    pub addot: SixVector,
}

impl MotionState {
    /// Particle at `z` moving uniformly with velocity `u`.
    pub fn uniform(tau: f64, z: SixVector, u: SixVector) -> Self {
        MotionState { tau, z, u, a: SixVector::ZERO, adot: SixVector::ZERO, addot: SixVector::ZERO }
    }

    pub fn from_kinematic(s: &KinematicState) -> Self {
        MotionState { tau: s.tau, z: s.z, u: s.u, a: s.a, adot: s.adot, addot: s.addot }
    }

    /// Kinematic state with `a⃛` supplied by the caller.
    pub fn kinematic(&self, adddot: SixVector) -> KinematicState {
        KinematicState {
            tau: self.tau,
            z: self.z,
            u: self.u,
            a: self.a,
            adot: self.adot,
            addot: self.addot,
            adddot,
        }
    }

    fn is_finite(&self) -> bool {
        [self.z, self.u, self.a, self.adot, self.addot].iter().all(SixVector::is_finite)
    }
}

/// Which derivative the equation of motion is solved for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationOrder {
    /// `e ≠ 0`: solved for `a⃛`, phase space `(z, u, a, ȧ, ä)`.
    Full,
    /// `e = 0, μ ≠ 0`: solved for `ä`, phase space `(z, u, a, ȧ)`.
    Rigid,
    /// `e = 0, μ = 0`: `m a = F`, phase space `(z, u)`.
    Newtonian,
}

impl EquationOrder {
    pub fn for_constants(k: &RenormalizationConstants, e: f64) -> Self {
        if e != 0.0 {
            EquationOrder::Full
        } else if k.mu != 0.0 {
            EquationOrder::Rigid
        } else {
            EquationOrder::Newtonian
        }
    }

    /// Number of six-vectors in the integrated phase point.
    fn slots(self) -> usize {
        match self {
            EquationOrder::Full => 5,
            EquationOrder::Rigid => 4,
            EquationOrder::Newtonian => 2,
        }
    }
}

/// External force as a function of proper time and phase point.
pub type ExternalForce<'a> = &'a (dyn Fn(f64, &MotionState) -> SixVector + Sync);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Largest `|u·u + 1|/(u⁰)²` tolerated before the per-step projection.
    pub drift_bound: f64,
    /// Tolerance on the kinematic chain of the initial state.
    pub initial_chain_tol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            initial_step: 1e-3,
            max_step: 0.1,
            max_steps: 1_000_000,
            drift_bound: 1e-7,
            initial_chain_tol: 1e-10,
        }
    }
}

/// One output row of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionSample {
    pub state: MotionState,
    /// Largest `|u·u + 1|/(u⁰)²` seen before projection since the previous sample.
    pub drift: f64,
    pub p_part: SixVector,
    pub s2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub order: EquationOrder,
    pub samples: Vec<MotionSample>,
    pub accepted: usize,
    pub rejected: usize,
    pub max_drift: f64,
}

fn project_orthogonal(f: &SixVector, u: &SixVector) -> SixVector {
    *f + *u * u.dot(f)
}

/// Completes a phase point with the derivatives fixed by the equation of
/// motion and returns the derivative solved for.
pub fn motion_derivative(
    state: &MotionState,
    k: &RenormalizationConstants,
    e: f64,
    f_ext: ExternalForce,
) -> Result<(MotionState, SixVector)> {
    let order = EquationOrder::for_constants(k, e);
    let mut s = *state;
    let force = project_orthogonal(&f_ext(s.tau, &s), &s.u);
    let top = match order {
        EquationOrder::Full => {
            // ṗ is linear in a⃛ with coefficient 4/5 c
            let partial = particle_momentum_rate(&s.kinematic(SixVector::ZERO), k, e);
            let rad = radiated_rate(&s.kinematic(SixVector::ZERO), e);
            (force - rad - partial) / (0.8 * coupling(e))
        }
        EquationOrder::Rigid => {
            s.addot = SixVector::ZERO;
            let partial = particle_momentum_rate(&s.kinematic(SixVector::ZERO), k, 0.0);
            let addot = (partial - force) / k.mu;
            s.addot = addot;
            addot
        }
        EquationOrder::Newtonian => {
            if k.m == 0.0 {
                return Err(Error::InvalidParameter("Newtonian motion needs m ≠ 0".into()));
            }
            s.a = force / k.m;
            s.adot = SixVector::ZERO;
            s.addot = SixVector::ZERO;
            s.a
        }
    };
    Ok((s, top))
}

fn pack(s: &MotionState, slots: usize) -> Vec<f64> {
    [s.z, s.u, s.a, s.adot, s.addot][..slots].iter().flat_map(|v| v.0).collect()
}

fn unpack(tau: f64, y: &[f64], slots: usize) -> MotionState {
    let v = |i: usize| {
        if i < slots {
            SixVector::new(y[6 * i..6 * i + 6].try_into().expect("six"))
        } else {
            SixVector::ZERO
        }
    };
    MotionState { tau, z: v(0), u: v(1), a: v(2), adot: v(3), addot: v(4) }
}

fn rhs(
    tau: f64,
    y: &[f64],
    order: EquationOrder,
    k: &RenormalizationConstants,
    e: f64,
    f_ext: ExternalForce,
) -> Result<Vec<f64>> {
    let slots = order.slots();
    let (s, top) = motion_derivative(&unpack(tau, y, slots), k, e, f_ext)?;
    let chain = [s.u, s.a, s.adot, s.addot];
    let mut out: Vec<f64> = chain[..slots - 1].iter().flat_map(|v| v.0).collect();
    out.extend_from_slice(&top.0);
    Ok(out)
}

/// Restores `u·u = -1` and the differentiated constraints; returns the
/// normalization drift `|u·u + 1|/(u⁰)²` found before projection.
fn project(s: &mut MotionState, order: EquationOrder) -> f64 {
    let drift = (s.u.norm_sq() + 1.0).abs() / (s.u.time() * s.u.time());
    s.u = s.u / (-s.u.norm_sq()).sqrt();
    if order != EquationOrder::Newtonian {
        s.a = s.a + s.u * s.u.dot(&s.a);
        s.adot = s.adot + s.u * (s.u.dot(&s.adot) + s.a.norm_sq());
    }
    if order == EquationOrder::Full {
        s.addot = s.addot + s.u * (s.u.dot(&s.addot) + 3.0 * s.a.dot(&s.adot));
    }
    drift
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates the equation of motion from `initial` and records the state at
/// each of `output_times` (ascending, after `initial.tau`). Runaway growth is
/// not suppressed: it ends in [`Error::StepSizeCollapse`] once the solution
/// can no longer be resolved.
pub fn integrate_motion(
    initial: &MotionState,
    k: &RenormalizationConstants,
    e: f64,
    f_ext: ExternalForce,
    output_times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    super::validate_constants(k)?;
    if !initial.is_finite() {
        return Err(Error::NonFinite("initial motion state"));
    }
    if output_times.windows(2).any(|w| !(w[0] < w[1])) || output_times.first().is_some_and(|t| !(*t >= initial.tau)) {
        return Err(Error::InvalidParameter("output times must increase from the initial proper time".into()));
    }
    let order = EquationOrder::for_constants(k, e);
    let slots = order.slots();
    let (start, _) = motion_derivative(initial, k, e, f_ext)?;
    check_initial(&start, order, opts.initial_chain_tol)?;

    let sample = |s: &MotionState, drift: f64| -> Result<MotionSample> {
        let (full, top) = motion_derivative(s, k, e, f_ext)?;
        let adddot = if order == EquationOrder::Full { top } else { SixVector::ZERO };
        let ks = full.kinematic(adddot);
        Ok(MotionSample { state: full, drift, p_part: particle_momentum(&ks, k, e), s2: spin_magnitude(&ks, k, e).closed })
    };

    let mut traj = Trajectory { order, samples: Vec::new(), accepted: 0, rejected: 0, max_drift: 0.0 };
    let mut tau = initial.tau;
    let mut y = pack(&start, slots);
    let mut h = opts.initial_step.min(opts.max_step);
    let mut drift_since = 0.0f64;
    let mut steps = 0usize;
    for &target in output_times {
        while tau < target {
            if steps >= opts.max_steps {
                return Err(Error::StepLimit { steps, tau_end: target });
            }
            steps += 1;
            let min_step = 1e-13 * tau.abs().max(1.0);
            if h < min_step {
                return Err(Error::StepSizeCollapse { tau, h });
            }
            let step = h.min(target - tau);
            let (y_new, err) = match dopri_step(tau, &y, step, order, k, e, f_ext, opts) {
                Ok(r) => r,
                Err(Error::NonFinite(_)) => (Vec::new(), f64::INFINITY),
                Err(other) => return Err(other),
            };
            if err <= 1.0 {
                let mut s = unpack(tau + step, &y_new, slots);
                let drift = project(&mut s, order);
                if drift > opts.drift_bound {
                    return Err(Error::ConstraintDrift { tau: s.tau, drift, bound: opts.drift_bound });
                }
                drift_since = drift_since.max(drift);
                traj.max_drift = traj.max_drift.max(drift);
                tau = if target - tau <= step { target } else { tau + step };
                s.tau = tau;
                y = pack(&s, slots);
                traj.accepted += 1;
            } else {
                traj.rejected += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let factor = if err.is_finite() { factor } else { 0.2 };
            // a step shortened to land on an output time keeps the proposed size
            let proposed = if err <= 1.0 && step < h { h.max(step * factor) } else { step * factor };
            h = proposed.min(opts.max_step);
        }
        traj.samples.push(sample(&unpack(tau, &y, slots), drift_since)?);
        drift_since = 0.0;
    }
    Ok(traj)
}

#[allow(clippy::too_many_arguments)]
fn dopri_step(
    tau: f64,
    y: &[f64],
    h: f64,
    order: EquationOrder,
    k: &RenormalizationConstants,
    e: f64,
    f_ext: ExternalForce,
    opts: &IntegratorOptions,
) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let mut ks: Vec<Vec<f64>> = Vec::with_capacity(7);
    ks.push(rhs(tau, y, order, k, e, f_ext)?);
    let mut y_new = vec![0.0; n];
    for stage in 1..7 {
        let row = &A[stage - 1];
        let yi: Vec<f64> = (0..n).map(|i| y[i] + h * (0..stage).map(|j| row[j] * ks[j][i]).sum::<f64>()).collect();
        if yi.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("integrator stage"));
        }
        if stage == 6 {
            y_new.clone_from(&yi);
        }
        ks.push(rhs(tau + C[stage] * h, &yi, order, k, e, f_ext)?);
    }
    let mut acc = 0.0;
    for i in 0..n {
        let err_i = h * (0..7).map(|j| E[j] * ks[j][i]).sum::<f64>();
        let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
        acc += (err_i / scale).powi(2);
    }
    let err = (acc / n as f64).sqrt();
    Ok((y_new, if err.is_finite() { err } else { f64::INFINITY }))
}

fn check_initial(s: &MotionState, order: EquationOrder, tol: f64) -> Result<()> {
    if s.u.time() <= 0.0 {
        return Err(Error::PastDirected { u0: s.u.time() });
    }
    let norm = s.u.norm_sq();
    if (norm + 1.0).abs() > tol {
        return Err(Error::NotUnitTimelike { norm });
    }
    let mut rel = vec![("orthogonality", s.u.dot(&s.a), s.a.euclid())];
    if order != EquationOrder::Newtonian {
        rel.push(("first", s.u.dot(&s.adot) + s.a.norm_sq(), s.adot.euclid() + s.a.norm_sq()));
    }
    if order == EquationOrder::Full {
        rel.push((
            "second",
            s.u.dot(&s.addot) + 3.0 * s.a.dot(&s.adot),
            s.addot.euclid() + 3.0 * s.a.euclid() * s.adot.euclid(),
        ));
    }
    let u = s.u.euclid();
    for (relation, value, scale) in rel {
        let residual = value.abs() / (u * scale).max(1.0);
        if residual > tol {
            return Err(Error::KinematicChain { tau: s.tau, relation, residual, tolerance: tol });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_uniform_motion_stays_uniform() {
        let u = SixVector::new([1.25, 0.75, 0.0, 0.0, 0.0, 0.0]);
        let init = MotionState::uniform(0.0, SixVector::ZERO, u);
        let k = RenormalizationConstants::new(1.0, 0.5);
        let zero = |_: f64, _: &MotionState| SixVector::ZERO;
        let traj = integrate_motion(&init, &k, 1.0, &zero, &[1.0, 2.0], &IntegratorOptions::default()).unwrap();
        let last = traj.samples.last().unwrap().state;
        assert!((last.z - u * 2.0).max_abs() < 1e-12);
        assert!((last.u - u).max_abs() < 1e-12);
        assert_eq!(last.tau, 2.0);
    }

    #[test]
    fn rejects_bad_initial_velocity() {
        let init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::new([1.0, 0.5, 0.0, 0.0, 0.0, 0.0]));
        let k = RenormalizationConstants::new(1.0, 0.0);
        let zero = |_: f64, _: &MotionState| SixVector::ZERO;
        let err = integrate_motion(&init, &k, 0.0, &zero, &[1.0], &IntegratorOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotUnitTimelike { .. }));
    }

    #[test]
    fn newtonian_constant_force() {
        let (m, f) = (1.5, 0.8);
        let init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::rest());
        let k = RenormalizationConstants::new(m, 0.0);
        // constant three-force f along axis 1
        let force = move |_: f64, s: &MotionState| SixVector::new([s.u[1] * f, s.u.time() * f, 0.0, 0.0, 0.0, 0.0]);
        let times: Vec<f64> = (1..=5).map(f64::from).collect();
        let traj = integrate_motion(&init, &k, 0.0, &force, &times, &IntegratorOptions::default()).unwrap();
        for s in &traj.samples {
            let t = s.state.z.time();
            let x = m / f * ((1.0 + (f * t / m).powi(2)).sqrt() - 1.0);
            assert!((s.state.z[1] - x).abs() < 1e-8);
        }
        assert!(traj.max_drift <= 1e-7);
    }

    #[test]
    fn free_charge_runs_away_at_linearized_rate() {
        let (e, k) = (1.0, RenormalizationConstants::new(1.0, 0.5));
        let c = coupling(e);
        // largest root of m - μ λ² + 4/5 c λ³ = 0
        let mut lam = k.mu / (0.8 * c);
        for _ in 0..50 {
            let f = k.m - k.mu * lam * lam + 0.8 * c * lam.powi(3);
            let df = -2.0 * k.mu * lam + 2.4 * c * lam * lam;
            lam -= f / df;
        }
        let a0 = 1e-12;
        let mut init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::rest());
        // start on the growing mode a ∝ exp(λτ)
        init.a = SixVector::new([0.0, a0, 0.0, 0.0, 0.0, 0.0]);
        init.adot = SixVector::new([a0 * a0, lam * a0, 0.0, 0.0, 0.0, 0.0]);
        init.addot = SixVector::new([3.0 * lam * a0 * a0, lam * lam * a0, 0.0, 0.0, 0.0, 0.0]);
        let zero = |_: f64, _: &MotionState| SixVector::ZERO;
        let traj = integrate_motion(&init, &k, e, &zero, &[0.3, 0.5], &IntegratorOptions::default()).unwrap();
        let (s0, s1) = (traj.samples[0].state, traj.samples[1].state);
        let rate = (s1.a.spatial_norm() / s0.a.spatial_norm()).ln() / 0.2;
        assert!((rate - lam).abs() < 1e-6 * lam, "{rate} vs {lam}");
        assert!(s1.a.spatial_norm() > 1e3 * a0);
    }

    #[test]
    fn rigid_order_keeps_constraints() {
        let k = RenormalizationConstants::new(1.0, 0.3);
        let mut init = MotionState::uniform(0.0, SixVector::ZERO, SixVector::rest());
        init.a = SixVector::new([0.0, 0.0, 0.2, 0.0, 0.0, 0.0]);
        init.adot = SixVector::new([0.04, 0.1, 0.0, 0.0, 0.0, 0.0]);
        let force = |_: f64, s: &MotionState| SixVector::new([s.u[3] * 0.1, 0.0, 0.0, s.u.time() * 0.1, 0.0, 0.0]);
        let traj = integrate_motion(&init, &k, 0.0, &force, &[0.5, 1.0], &IntegratorOptions::default()).unwrap();
        assert_eq!(traj.order, EquationOrder::Rigid);
        for s in &traj.samples {
            let ks = s.state.kinematic(SixVector::ZERO);
            let r = ks.chain_residuals();
            assert!(r.normalization < 1e-12 && r.orthogonality < 1e-12 && r.first < 1e-12 && r.second < 1e-9, "{r:?}");
        }
    }
}
