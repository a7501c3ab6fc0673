use std::f64::consts::PI;

use super::{check_domain, KinematicState, Worldline};
use crate::error::{Error, Result};
use crate::tensor6::{mclf_boost, to_lab_boost, SixVector};

/// Smallest admitted retarded distance.
pub const R_MIN: f64 = 1e-9;

const MAX_ITERATIONS: usize = 200;
const MAX_BRACKET_STEPS: usize = 200;

/// Solution of the light-cone problem for one field point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetardedFrame {
    pub u_ret: f64,
    pub r: f64,
    /// Null vector `k = (y - z)/r`, normalized by `k·u = -1`.
    pub k: SixVector,
    /// `n = k - u`, unit spacelike and orthogonal to `u`.
    pub n: SixVector,
    pub state: KinematicState,
}

impl RetardedFrame {
    /// Frame for the point `z + r k` without solving anything.
    pub fn from_state(state: KinematicState, r: f64, k: SixVector) -> Self {
        RetardedFrame {
            u_ret: state.tau,
            r,
            k,
            n: k - state.u,
            state,
        }
    }

    /// `a·k`.
    pub fn a_k(&self) -> f64 {
        self.state.a.dot(&self.k)
    }

    /// `ȧ·k`.
    pub fn adot_k(&self) -> f64 {
        self.state.adot.dot(&self.k)
    }

    /// The field point `z + r k`.
    pub fn field_point(&self) -> SixVector {
        self.state.z + self.k * self.r
    }

    /// Angles of `n` in the momentarily comoving frame.
    pub fn angles(&self) -> Result<SphereAngles> {
        let n_rest = mclf_boost(&self.state.u)?.apply(&self.n);
        Ok(SphereAngles::from_direction(n_rest.spatial()))
    }
}

/// Light-cone residual: positive when `z(τ)` lies inside the past cone of `y`.
fn cone_residual(y: &SixVector, z: &SixVector) -> f64 {
    let d = *y - *z;
    d.time() - d.spatial_norm()
}

/// Retarded proper time, distance and null direction for the field point `y`.
pub fn retarded_frame(w: &(impl Worldline + ?Sized), y: &SixVector) -> Result<RetardedFrame> {
    if !y.is_finite() {
        return Err(Error::NonFinite("field point"));
    }
    let (lo, hi) = w.domain();
    let g = |tau: f64| -> Result<f64> {
        let (z, _) = w.position_velocity(tau)?;
        Ok(cone_residual(y, &z))
    };

    let mut guess = y.time().clamp(lo, hi);
    if !guess.is_finite() {
        guess = 0.0;
    }
    let g0 = g(guess)?;
    let (mut a, mut b, mut ga, mut gb);
    // proper time for the worldline to cover the gap at light speed
    let mut step = (1.0 + g0.abs()) / w.position_velocity(guess)?.1.time();
    if g0 > 0.0 {
        // root lies later: march forward until the residual turns negative
        (a, ga) = (guess, g0);
        let mut t = guess;
        let mut gt = g0;
        let mut n = 0;
        while gt > 0.0 {
            if t >= hi || n >= MAX_BRACKET_STEPS {
                return Err(Error::NoRetardedSolution(format!(
                    "field point {:?} is not reached by the future light cone of the worldline domain",
                    y.0
                )));
            }
            a = t;
            ga = gt;
            t = (t + step).min(hi);
            gt = g(t)?;
            if !gt.is_finite() {
                return Err(Error::NonFinite("light-cone residual"));
            }
            step *= 2.0;
            n += 1;
        }
        (b, gb) = (t, gt);
    } else {
        (b, gb) = (guess, g0);
        let mut t = guess;
        let mut gt = g0;
        let mut n = 0;
        while gt <= 0.0 {
            if gt == 0.0 {
                return finish(w, y, t);
            }
            if t <= lo || n >= MAX_BRACKET_STEPS {
                return Err(Error::NoRetardedSolution(format!(
                    "field point {:?} precedes the causal past of the worldline domain",
                    y.0
                )));
            }
            b = t;
            gb = gt;
            t = (t - step).max(lo);
            gt = g(t)?;
            if !gt.is_finite() {
                return Err(Error::NonFinite("light-cone residual"));
            }
            step *= 2.0;
            n += 1;
        }
        (a, ga) = (t, gt);
    }
    debug_assert!(ga > 0.0 && gb <= 0.0);

    // safeguarded Newton on [a, b] with g(a) > 0 >= g(b)
    let mut t = 0.5 * (a + b);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let (z, u) = w.position_velocity(t)?;
        let d = *y - z;
        let dist = d.spatial_norm();
        let gt = d.time() - dist;
        residual = gt;
        let scale = 1.0 + d.time().abs();
        if gt.abs() <= 1e-15 * scale {
            return finish(w, y, t);
        }
        if gt > 0.0 {
            a = t;
        } else {
            b = t;
        }
        let dist_rate = if dist > 0.0 {
            let s = d.spatial();
            let us = u.spatial();
            -(0..5).map(|i| s[i] * us[i]).sum::<f64>() / dist
        } else {
            0.0
        };
        let dg = -u.time() - dist_rate;
        let newton = if dg < 0.0 { t - gt / dg } else { f64::NAN };
        let next = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) || b - a <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            return finish(w, y, next);
        }
        t = next;
    }
    Err(Error::RootNonConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

fn finish(w: &(impl Worldline + ?Sized), y: &SixVector, tau: f64) -> Result<RetardedFrame> {
    let state = w.evaluate(tau)?;
    let d = *y - state.z;
    let r = -d.dot(&state.u);
    if !(r > R_MIN) {
        return Err(Error::OnWorldline { r });
    }
    Ok(RetardedFrame::from_state(state, r, d / r))
}

/// Spherical angles `(θ₁, θ₂, θ₃, φ)` on the unit 4-sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub phi: f64,
}

impl SphereAngles {
    pub fn new(theta1: f64, theta2: f64, theta3: f64, phi: f64) -> Self {
        SphereAngles { theta1, theta2, theta3, phi }
    }

    /// Unit direction
    /// `(cos φ s₁s₂s₃, sin φ s₁s₂s₃, cos θ₁ s₂s₃, cos θ₂ s₃, cos θ₃)`, `sᵢ = sin θᵢ`.
    pub fn direction(&self) -> [f64; 5] {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        let (s3, c3) = self.theta3.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let s123 = s1 * s2 * s3;
        [cp * s123, sp * s123, c1 * s2 * s3, c2 * s3, c3]
    }

    /// Inverse of [`SphereAngles::direction`] away from the chart's poles.
    pub fn from_direction(n: [f64; 5]) -> Self {
        let h1 = n[0].hypot(n[1]);
        let h2 = h1.hypot(n[2]);
        let h3 = h2.hypot(n[3]);
        let mut phi = n[1].atan2(n[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        SphereAngles {
            theta1: h1.atan2(n[2]),
            theta2: h2.atan2(n[3]),
            theta3: h3.atan2(n[4]),
            phi,
        }
    }

    pub fn in_chart(&self) -> bool {
        let t = |x: f64| (0.0..=PI).contains(&x);
        t(self.theta1) && t(self.theta2) && t(self.theta3) && (0.0..2.0 * PI).contains(&self.phi)
    }
}

/// Rest-frame null vector `(1, n')` carried to the laboratory.
pub fn lab_null_vector(u: &SixVector, angles: &SphereAngles) -> SixVector {
    let n = angles.direction();
    to_lab_boost(u).apply(&SixVector::from_time_space(1.0, n))
}

/// The point `z + r k` on the retarded sphere of radius `r`.
pub fn sphere_point(state: &KinematicState, r: f64, angles: &SphereAngles) -> Result<SixVector> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!("retarded distance {r} must be positive")));
    }
    Ok(state.z + lab_null_vector(&state.u, angles) * r)
}

/// Point of the hyperplane `y⁰ = t` reached along the null ray leaving the
/// worldline at proper time `u` in direction `angles`:
/// `yⁱ = zⁱ(u) + R kⁱ/k⁰`, `R = t - z⁰(u)`, so the retarded distance is `R/k⁰`.
pub fn hyperplane_point(
    w: &(impl Worldline + ?Sized),
    t: f64,
    u: f64,
    angles: &SphereAngles,
) -> Result<SixVector> {
    check_domain(w, u)?;
    let (z, vel) = w.position_velocity(u)?;
    let lapse = t - z.time();
    if !(lapse > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hyperplane time {t} does not lie after the worldline event at proper time {u} (z⁰ = {})",
            z.time()
        )));
    }
    let k = lab_null_vector(&vel, angles);
    Ok(z + k * (lapse / k.time()))
}
