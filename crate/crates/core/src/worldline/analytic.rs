use std::f64::consts::FRAC_PI_2;

use super::{KinematicState, Worldline};
use crate::error::{Error, Result};
use crate::tensor6::SixVector;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Assembles a state from the first five derivatives of position.
fn state_from_derivatives(tau: f64, z: SixVector, d: [SixVector; 5]) -> KinematicState {
    KinematicState {
        tau,
        z,
        u: d[0],
        a: d[1],
        adot: d[2],
        addot: d[3],
        adddot: d[4],
    }
}

#[derive(Clone, Debug)]
pub struct UniformMotion {
    u: SixVector,
}

impl UniformMotion {
    pub fn new(velocity: [f64; 5]) -> Result<Self> {
        if velocity.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("velocity"));
        }
        let beta2: f64 = velocity.iter().map(|v| v * v).sum();
        if beta2 >= 1.0 {
            return Err(invalid(format!("speed {} is not below 1", beta2.sqrt())));
        }
        let gamma = 1.0 / (1.0 - beta2).sqrt();
        Ok(UniformMotion {
            u: SixVector::from_time_space(gamma, velocity.map(|v| gamma * v)),
        })
    }
}

impl Worldline for UniformMotion {
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        let zero = SixVector::ZERO;
        Ok(state_from_derivatives(tau, self.u * tau, [self.u, zero, zero, zero, zero]))
    }
}

/// `z = (sinh gτ / g, cosh gτ / g, 0, 0, 0, 0)`.
#[derive(Clone, Debug)]
pub struct HyperbolicMotion {
    g: f64,
}

impl HyperbolicMotion {
    pub fn new(g: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(invalid(format!("proper acceleration g = {g} must be positive")));
        }
        Ok(HyperbolicMotion { g })
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

impl Worldline for HyperbolicMotion {
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        let g = self.g;
        let (sh, ch) = ((g * tau).sinh(), (g * tau).cosh());
        let z = SixVector::new([sh / g, ch / g, 0.0, 0.0, 0.0, 0.0]);
        let mut d = [SixVector::ZERO; 5];
        let mut scale = 1.0;
        for (n, dn) in d.iter_mut().enumerate() {
            // odd derivative index n+1 swaps sinh and cosh
            let (t, x) = if n % 2 == 0 { (ch, sh) } else { (sh, ch) };
            *dn = SixVector::new([scale * t, scale * x, 0.0, 0.0, 0.0, 0.0]);
            scale *= g;
        }
        Ok(state_from_derivatives(tau, z, d))
    }
}

/// `z = (γτ, ρ cos ωτ, ρ sin ωτ, γβ_d τ, 0, 0)` with `ω = γβ/ρ`.
#[derive(Clone, Debug)]
pub struct HelicalMotion {
    radius: f64,
    omega: f64,
    gamma: f64,
    drift: f64,
}

impl HelicalMotion {
    pub fn new(radius: f64, speed: f64, drift: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("radius {radius} must be positive")));
        }
        if !(speed.is_finite() && drift.is_finite()) || speed < 0.0 {
            return Err(invalid(format!("speed {speed} must be non-negative and finite")));
        }
        let beta2 = speed * speed + drift * drift;
        if beta2 >= 1.0 {
            return Err(invalid(format!("total speed {} is not below 1", beta2.sqrt())));
        }
        let gamma = 1.0 / (1.0 - beta2).sqrt();
        Ok(HelicalMotion {
            radius,
            omega: gamma * speed / radius,
            gamma,
            drift,
        })
    }

    /// Angular frequency with respect to proper time.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Worldline for HelicalMotion {
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        let (rho, w, g) = (self.radius, self.omega, self.gamma);
        let ph = w * tau;
        let z = SixVector::new([g * tau, rho * ph.cos(), rho * ph.sin(), g * self.drift * tau, 0.0, 0.0]);
        let mut d = [SixVector::ZERO; 5];
        let mut amp = rho;
        for (n, dn) in d.iter_mut().enumerate() {
            amp *= w;
            let shifted = ph + (n + 1) as f64 * FRAC_PI_2;
            dn[1] = amp * shifted.cos();
            dn[2] = amp * shifted.sin();
        }
        d[0][0] = g;
        d[0][3] = g * self.drift;
        Ok(state_from_derivatives(tau, z, d))
    }
}

/// Planar motion with rapidity `χ(τ) = ln(τ/s)` on `τ > 0`:
/// `z⁰ = τ²/(4s) + (s/2) ln(τ/s)`, `z¹ = τ²/(4s) - (s/2) ln(τ/s)`.
#[derive(Clone, Debug)]
pub struct LogRapidityMotion {
    scale: f64,
}

impl LogRapidityMotion {
    /// Smallest admitted `τ/s`; the speed there is `γ ≈ 500`.
    pub const LOWER_FRACTION: f64 = 1e-3;

    pub fn new(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(format!("scale {scale} must be positive")));
        }
        Ok(LogRapidityMotion { scale })
    }
}

impl Worldline for LogRapidityMotion {
    fn domain(&self) -> (f64, f64) {
        (Self::LOWER_FRACTION * self.scale, f64::INFINITY)
    }

    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        let s = self.scale;
        let quad = tau * tau / (4.0 * s);
        let log = 0.5 * s * (tau / s).ln();
        let z = SixVector::new([quad + log, quad - log, 0.0, 0.0, 0.0, 0.0]);
        let mut d = [SixVector::ZERO; 5];
        // derivatives of (s/2) ln τ: (s/2)(-1)^{n-1}(n-1)! τ^{-n}
        let mut log_d = 0.5 * s / tau;
        for (i, dn) in d.iter_mut().enumerate() {
            let n = i + 1;
            let quad_d = match n {
                1 => tau / (2.0 * s),
                2 => 1.0 / (2.0 * s),
                _ => 0.0,
            };
            dn[0] = quad_d + log_d;
            dn[1] = quad_d - log_d;
            log_d *= -(n as f64) / tau;
        }
        Ok(state_from_derivatives(tau, z, d))
    }
}
