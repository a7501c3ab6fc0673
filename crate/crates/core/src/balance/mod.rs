//! Renormalized particle sector: momentum, extra momentum, internal spin and
//! rest mass of the dressed charge, the balance equations they satisfy, and
//! the equation of motion they imply.

mod motion;

pub use motion::{
    integrate_motion, motion_derivative, EquationOrder, ExternalForce, IntegratorOptions, MotionSample,
    MotionState, Trajectory,
};

use crate::error::{Error, Result};
use crate::fd::{CentralStencil, Linear};
use crate::flux::{coupling, radiated_angular_rate, radiated_rate, radiated_spin_rate, radiative_momentum};
use crate::tensor6::{wedge, AntisymTensor2, SixVector};
use crate::worldline::{kinematic_state, KinematicState, Worldline};

/// The free scalar `ν(τ)` left undetermined by the wedge system.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeFunction {
    Zero,
    /// `amplitude · sin(frequency · τ)`.
    Sine { amplitude: f64, frequency: f64 },
    /// `Σ cᵢ τⁱ`.
    Polynomial(Vec<f64>),
}

impl GaugeFunction {
    /// Derivative of order `m ≤ 2` at `tau`.
    pub fn derivative(&self, tau: f64, m: usize) -> f64 {
        match self {
            GaugeFunction::Zero => 0.0,
            GaugeFunction::Sine { amplitude, frequency } => {
                let ph = frequency * tau;
                let w = frequency.powi(m as i32) * amplitude;
                match m % 4 {
                    0 => w * ph.sin(),
                    1 => w * ph.cos(),
                    2 => -w * ph.sin(),
                    _ => -w * ph.cos(),
                }
            }
            GaugeFunction::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(m)
                .map(|(i, ci)| {
                    let falling: f64 = (0..m).map(|k| (i - k) as f64).product();
                    ci * falling * tau.powi((i - m) as i32)
                })
                .sum(),
        }
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.derivative(tau, 0)
    }
}

/// Renormalized constants `m`, `μ` and the gauge function `ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct RenormalizationConstants {
    pub m: f64,
    pub mu: f64,
    pub nu: GaugeFunction,
}

impl RenormalizationConstants {
    pub fn new(m: f64, mu: f64) -> Self {
        RenormalizationConstants { m, mu, nu: GaugeFunction::Zero }
    }

    pub fn with_nu(mut self, nu: GaugeFunction) -> Self {
        self.nu = nu;
        self
    }
}

/// `p = m u + μ(-ȧ + 3/2 a² u) + c[4/5 ä - 8/5 u (a²)˙ - 64/35 a² a]`.
pub fn particle_momentum(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> SixVector {
    let c = coupling(e);
    let (u, a2) = (state.u, state.a2());
    u * k.m
        + (state.adot * -1.0 + u * (1.5 * a2)) * k.mu
        + (state.addot * 0.8 - u * (1.6 * state.a2_dot()) - state.a * (64.0 / 35.0 * a2)) * c
}

/// Analytic proper-time derivative of [`particle_momentum`].
pub fn particle_momentum_rate(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> SixVector {
    let c = coupling(e);
    let (u, a, a2, a2d) = (state.u, state.a, state.a2(), state.a2_dot());
    a * k.m
        + (state.addot * -1.0 + u * (1.5 * a2d) + a * (1.5 * a2)) * k.mu
        + (state.adddot * 0.8
            - a * (1.6 * a2d)
            - u * (1.6 * state.a2_ddot())
            - a * (64.0 / 35.0 * a2d)
            - state.adot * (64.0 / 35.0 * a2))
            * c
}

/// `π = μ a + ν u - 4/5 c ȧ`.
pub fn particle_pi(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> SixVector {
    state.a * k.mu + state.u * k.nu.value(state.tau) - state.adot * (0.8 * coupling(e))
}

/// Analytic proper-time derivative of [`particle_pi`].
pub fn particle_pi_rate(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> SixVector {
    state.adot * k.mu + state.u * k.nu.derivative(state.tau, 1) + state.a * k.nu.value(state.tau)
        - state.addot * (0.8 * coupling(e))
}

/// `s = μ u∧a - 4/5 c u∧ȧ`.
pub fn internal_spin(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> AntisymTensor2 {
    wedge(&state.u, &state.a) * k.mu - wedge(&state.u, &state.adot) * (0.8 * coupling(e))
}

/// Squared spin magnitude from the closed form and from the tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinMagnitude {
    /// `μ² a² - μ (e²/5π²)(a²)˙ + (e⁴/25π⁴)(ȧ² + a⁴)`.
    pub closed: f64,
    /// `-½ s_{αβ} s^{αβ}`.
    pub contraction: f64,
}

pub fn spin_magnitude(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> SpinMagnitude {
    let pi2 = std::f64::consts::PI.powi(2);
    let a2 = state.a2();
    let closed = k.mu * k.mu * a2 - k.mu * e * e / (5.0 * pi2) * state.a2_dot()
        + e.powi(4) / (25.0 * pi2 * pi2) * (state.adot2() + a2 * a2);
    let s = internal_spin(state, k, e);
    SpinMagnitude { closed, contraction: -0.5 * s.contract_full(&s) }
}

/// Rest mass from the closed form and from `-(p·u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestMass {
    /// `m + μ a²/2 - 2/5 c (a²)˙`.
    pub closed: f64,
    pub contraction: f64,
}

pub fn rest_mass(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> RestMass {
    RestMass {
        closed: k.m + 0.5 * k.mu * state.a2() - 0.4 * coupling(e) * state.a2_dot(),
        contraction: -particle_momentum(state, k, e).dot(&state.u),
    }
}

/// Self-force on the particle: the negated radiated momentum rate.
pub fn radiation_force(state: &KinematicState, e: f64) -> SixVector {
    radiated_rate(state, e) * -1.0
}

/// External force that makes a prescribed motion satisfy the momentum
/// balance exactly: `ṗ_part + ṗ_rad`.
pub fn required_force(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> SixVector {
    particle_momentum_rate(state, k, e) + radiated_rate(state, e)
}

/// Particle quantities at one proper time.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSector {
    pub p_part: SixVector,
    pub pi_part: SixVector,
    pub s_part: AntisymTensor2,
    pub m0: f64,
    pub state: KinematicState,
}

pub fn particle_sector(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> ParticleSector {
    ParticleSector {
        p_part: particle_momentum(state, k, e),
        pi_part: particle_pi(state, k, e),
        s_part: internal_spin(state, k, e),
        m0: rest_mass(state, k, e).closed,
        state: *state,
    }
}

/// Finite-difference step used along worldlines, shortened where the
/// curvature is large.
pub fn balance_step(state: &KinematicState) -> f64 {
    let scale = 1f64.max(state.a.euclid()).max(state.adot.euclid().sqrt()).max(state.addot.euclid().cbrt());
    0.02 / scale
}

/// Sixth-order central derivative of order `m ∈ {1, 2}` of a fallible sampler.
fn fd<T: Linear>(f: impl Fn(f64) -> Result<T>, x: f64, h: f64, m: usize) -> Result<T> {
    let stencil = CentralStencil::new(3, 2);
    let samples = stencil.offsets().map(|j| f(x + j as f64 * h)).collect::<Result<Vec<T>>>()?;
    Ok(stencil.apply(&samples, m, h))
}

/// Scale that makes balance residuals relative: the largest of the
/// compared quantities, floored by the size of the constants.
fn relative(diff: f64, terms: &[f64], k: &RenormalizationConstants, e: f64) -> f64 {
    let floor = k.m.abs() + k.mu.abs() + coupling(e);
    let scale = terms.iter().fold(floor, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        diff.abs()
    } else {
        diff.abs() / scale
    }
}

/// `ṗ_part + ṗ_rad - F_ext` with `ṗ_part` from finite differences of
/// [`particle_momentum`] along the worldline.
pub fn momentum_balance_residual(
    w: &(impl Worldline + ?Sized),
    k: &RenormalizationConstants,
    e: f64,
    tau: f64,
    f_ext: &SixVector,
) -> Result<SixVector> {
    let s = kinematic_state(w, tau)?;
    let pdot = fd(|t| Ok(particle_momentum(&kinematic_state(w, t)?, k, e)), tau, balance_step(&s), 1)?;
    Ok(pdot + radiated_rate(&s, e) - *f_ext)
}

/// Both sides of the wedge-form angular balance
/// `u∧(p + π̇) + a∧π = -c[4/5 a∧ȧ + 64/35 a² u∧a]`, `π̇` by finite differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularBalance {
    pub lhs: AntisymTensor2,
    pub rhs: AntisymTensor2,
    /// `|lhs - rhs|∞` relative to the larger side.
    pub relative: f64,
}

/// Residual of `u∧(p + π̇) + a∧π` against minus the radiated spin rate, with `π̇` taken analytically.
/// External forces and torques cancel from the wedge form, so none is taken.
pub fn angular_balance_residual(
    w: &(impl Worldline + ?Sized),
    k: &RenormalizationConstants,
    e: f64,
    tau: f64,
) -> Result<AngularBalance> {
    let s = kinematic_state(w, tau)?;
    let pi_dot = particle_pi_rate(&s, k, e);
    let p = particle_momentum(&s, k, e);
    let lhs = wedge(&s.u, &(p + pi_dot)) + wedge(&s.a, &particle_pi(&s, k, e));
    let rhs = radiated_spin_rate(&s, e) * -1.0;
    let scale = lhs.max_abs().max(rhs.max_abs()).max(wedge(&s.u, &p).max_abs());
    let diff = (lhs - rhs).max_abs();
    Ok(AngularBalance { lhs, rhs, relative: if scale > 0.0 { diff / scale } else { diff } })
}

/// Closure of the total momentum and angular momentum of particle plus
/// radiation against an external force, all derivatives by finite
/// differences of integrated quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TotalClosure {
    /// `d/dτ[p_part + p_rad] - F_ext`, relative.
    pub momentum: f64,
    /// `d/dτ[M_part + M_rad] - z∧F_ext`, relative.
    pub angular: f64,
}

/// `p_rad` and `M_rad` are accumulated from `tau_ref`.
pub fn total_closure(
    w: &(impl Worldline + ?Sized),
    k: &RenormalizationConstants,
    e: f64,
    tau: f64,
    tau_ref: f64,
    f_ext: &SixVector,
) -> Result<TotalClosure> {
    let s = kinematic_state(w, tau)?;
    let h = balance_step(&s);
    let p_total = |t: f64| -> Result<SixVector> {
        let st = kinematic_state(w, t)?;
        Ok(particle_momentum(&st, k, e) + signed_integral(|a, b| radiative_momentum(w, e, a, b), tau_ref, t)?)
    };
    let m_total = |t: f64| -> Result<AntisymTensor2> {
        let st = kinematic_state(w, t)?;
        let p = particle_momentum(&st, k, e);
        let m_part = wedge(&st.z, &p) + wedge(&st.u, &particle_pi(&st, k, e));
        let m_rad = signed_integral(|a, b| crate::flux::radiative_angular_momentum(w, e, a, b), tau_ref, t)?;
        Ok(m_part + m_rad)
    };
    let dp = fd(p_total, tau, h, 1)? - *f_ext;
    let dm = fd(m_total, tau, h, 1)? - wedge(&s.z, f_ext);
    let p_scale = [f_ext.max_abs(), particle_momentum(&s, k, e).max_abs()];
    let torque = wedge(&s.z, f_ext).max_abs();
    let rad_torque = radiated_angular_rate(&s, e).max_abs();
    Ok(TotalClosure {
        momentum: relative(dp.max_abs(), &p_scale, k, e),
        angular: relative(dm.max_abs(), &[torque, rad_torque, p_scale[1]], k, e),
    })
}

fn signed_integral<T: Linear>(f: impl Fn(f64, f64) -> Result<T>, from: f64, to: f64) -> Result<T> {
    if to > from {
        f(from, to)
    } else if to < from {
        Ok(f(to, from)? * -1.0)
    } else {
        Ok(T::zero())
    }
}

/// Residuals of the consistency chain that fixes the particle momentum:
/// index `i` holds relation `i + 1`, each relative to its largest term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainCheck {
    pub residuals: [f64; 8],
}

impl ChainCheck {
    pub fn max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// `M = m + 3/2 μ a² + ν̇ - 8/5 c (a²)˙`.
pub fn mass_function(state: &KinematicState, k: &RenormalizationConstants, e: f64) -> f64 {
    k.m + 1.5 * k.mu * state.a2() + k.nu.derivative(state.tau, 1) - 1.6 * coupling(e) * state.a2_dot()
}

/// Verifies each step from the velocity projection of the balance equation
/// to the mass function `M`, with derivatives of `π`, `p` and `M` taken by
/// finite differences along the worldline.
pub fn appendix_chain_check(
    w: &(impl Worldline + ?Sized),
    k: &RenormalizationConstants,
    e: f64,
    tau: f64,
) -> Result<ChainCheck> {
    let c = coupling(e);
    let s = kinematic_state(w, tau)?;
    let h = balance_step(&s);
    let (a2, adot2) = (s.a2(), s.adot2());
    let nu = k.nu.value(tau);
    let nu_ddot = k.nu.derivative(tau, 2);
    let state_at = |t: f64| kinematic_state(w, t);
    let p = particle_momentum(&s, k, e);
    let p_dot = fd(|t| Ok(particle_momentum(&state_at(t)?, k, e)), tau, h, 1)?;
    let pi_dot = fd(|t| Ok(particle_pi(&state_at(t)?, k, e)), tau, h, 1)?;
    let pi_ddot = fd(|t| Ok(particle_pi(&state_at(t)?, k, e)), tau, h, 2)?;
    let pu_dot = fd(|t| { let st = state_at(t)?; Ok(particle_momentum(&st, k, e).dot(&st.u)) }, tau, h, 1)?;
    let m_dot = fd(|t| Ok(mass_function(&state_at(t)?, k, e)), tau, h, 1)?;
    // (π̇·u)˙ = π̈·u + π̇·a
    let pidot_u_dot = pi_ddot.dot(&s.u) + pi_dot.dot(&s.a);

    let rel = |lhs: f64, rhs: f64| relative(lhs - rhs, &[lhs, rhs], k, e);
    let r1 = rel(p_dot.dot(&s.u), c * (0.8 * adot2 + 64.0 / 35.0 * a2 * a2));
    let r2 = rel(p.dot(&s.a), nu * a2 - c * 64.0 / 35.0 * a2 * a2 - pi_dot.dot(&s.a));
    let r3 = rel(pu_dot, nu * a2 + c * 0.8 * adot2 - pi_dot.dot(&s.a));
    let r4 = rel(pu_dot, -m_dot - pidot_u_dot);
    let r5 = rel(m_dot, -nu * a2 - c * 0.8 * adot2 - pi_ddot.dot(&s.u));
    let r6 = rel(
        pi_ddot.dot(&s.u),
        -1.5 * k.mu * s.a2_dot() - nu_ddot - nu * a2 + c * (1.6 * s.a2_ddot() - 0.8 * adot2),
    );
    let r7 = rel(m_dot, 1.5 * k.mu * s.a2_dot() + nu_ddot - c * 1.6 * s.a2_ddot());
    let pp = s.u * mass_function(&s, k, e) + s.a * nu - s.a * (c * 64.0 / 35.0 * a2);
    let r8 = relative((p + pi_dot - pp).max_abs(), &[p.max_abs(), pp.max_abs()], k, e);
    Ok(ChainCheck { residuals: [r1, r2, r3, r4, r5, r6, r7, r8] })
}

/// Particle momentum rebuilt from the wedge-system solution
/// `M u + ν a - 64/35 c a² a - π̇` with `π̇` by finite differences; equals
/// [`particle_momentum`] for every `ν`.
pub fn momentum_from_wedge_solution(
    w: &(impl Worldline + ?Sized),
    k: &RenormalizationConstants,
    e: f64,
    tau: f64,
) -> Result<SixVector> {
    let s = kinematic_state(w, tau)?;
    let pi_dot = fd(|t| Ok(particle_pi(&kinematic_state(w, t)?, k, e)), tau, balance_step(&s), 1)?;
    Ok(s.u * mass_function(&s, k, e) + s.a * k.nu.value(tau)
        - s.a * (coupling(e) * 64.0 / 35.0 * s.a2())
        - pi_dot)
}

/// Rejects non-finite constants.
pub fn validate_constants(k: &RenormalizationConstants) -> Result<()> {
    if !(k.m.is_finite() && k.mu.is_finite()) {
        return Err(Error::NonFinite("renormalization constants"));
    }
    Ok(())
}
