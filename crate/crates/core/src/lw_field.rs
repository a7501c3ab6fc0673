//! Retarded potential and field strength of a point charge, with
//! finite-difference oracles for the field definition, the Lorenz gauge and
//! the source-free wave equation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor6::{wedge, AntisymTensor2, SixVector, DIM, METRIC};
use crate::worldline::{retarded_frame, RetardedFrame, Worldline};

/// The factor `e/2π` multiplying potential and field.
pub fn field_prefactor(e: f64) -> f64 {
    e / (2.0 * PI)
}

/// Potential, field and retarded frame at one field point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub y: SixVector,
    pub potential: SixVector,
    pub field: AntisymTensor2,
    pub frame: RetardedFrame,
    pub charge: f64,
}

/// `A = (e/2π)[a/r² + u(1 + r a_k)/r³]` at the retarded frame.
pub fn potential_at(frame: &RetardedFrame, e: f64) -> SixVector {
    let (r, s) = (frame.r, &frame.state);
    let ak = frame.a_k();
    (s.a / (r * r) + s.u * ((1.0 + r * ak) / (r * r * r))) * field_prefactor(e)
}

/// `V = 3u/r⁴ + 3(a + 2u a_k)/r³ + V₂/r²`, graded by power of `r`.
/// Entries are the coefficients of `r⁻⁴`, `r⁻³`, `r⁻²`.
pub fn v_coefficients(frame: &RetardedFrame) -> [SixVector; 3] {
    let s = &frame.state;
    let ak = frame.a_k();
    let adk = frame.adot_k();
    [
        s.u * 3.0,
        (s.a + s.u * (2.0 * ak)) * 3.0,
        s.adot + s.u * adk + s.a * (3.0 * ak) + s.u * (3.0 * ak * ak),
    ]
}

/// Field strength split by power of the retarded distance, each piece already
/// evaluated at the frame's `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradedField {
    /// `(e/2π) 3 u∧k / r⁴`.
    pub minus4: AntisymTensor2,
    /// `(e/2π)[u∧a + 3(a + 2u a_k)∧k] / r³`.
    pub minus3: AntisymTensor2,
    /// `(e/2π) V₂∧k / r²`.
    pub minus2: AntisymTensor2,
}

impl GradedField {
    pub fn total(&self) -> AntisymTensor2 {
        self.minus4 + self.minus3 + self.minus2
    }
}

pub fn graded_field(frame: &RetardedFrame, e: f64) -> GradedField {
    let c = field_prefactor(e);
    let r = frame.r;
    let k = &frame.k;
    let [v4, v3, v2] = v_coefficients(frame);
    GradedField {
        minus4: wedge(&v4, k) * (c / r.powi(4)),
        minus3: (wedge(&frame.state.u, &frame.state.a) + wedge(&v3, k)) * (c / r.powi(3)),
        minus2: wedge(&v2, k) * (c / (r * r)),
    }
}

/// `F = (e/2π)(u∧a/r³ + V∧k)` assembled directly from `V`.
pub fn field_at(frame: &RetardedFrame, e: f64) -> AntisymTensor2 {
    let r = frame.r;
    let [v4, v3, v2] = v_coefficients(frame);
    let v = v4 / r.powi(4) + v3 / r.powi(3) + v2 / (r * r);
    (wedge(&frame.state.u, &frame.state.a) / r.powi(3) + wedge(&v, &frame.k)) * field_prefactor(e)
}

pub fn potential(w: &(impl Worldline + ?Sized), e: f64, y: &SixVector) -> Result<SixVector> {
    Ok(potential_at(&retarded_frame(w, y)?, e))
}

pub fn field_strength(w: &(impl Worldline + ?Sized), e: f64, y: &SixVector) -> Result<AntisymTensor2> {
    Ok(field_at(&retarded_frame(w, y)?, e))
}

pub fn field_sample(w: &(impl Worldline + ?Sized), e: f64, y: &SixVector) -> Result<FieldSample> {
    let frame = retarded_frame(w, y)?;
    Ok(FieldSample {
        y: *y,
        potential: potential_at(&frame, e),
        field: field_at(&frame, e),
        frame,
        charge: e,
    })
}

/// Default finite-difference step `r/200 · min(1, 1/|a|)`, with `|a|` the
/// magnitude of the retarded acceleration.
pub fn default_step(frame: &RetardedFrame) -> f64 {
    let a = frame.state.a2().max(0.0).sqrt();
    frame.r / 200.0 * if a > 1.0 { 1.0 / a } else { 1.0 }
}

fn checked_frame(w: &(impl Worldline + ?Sized), y: &SixVector, h: f64) -> Result<RetardedFrame> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("step {h} must be positive")));
    }
    let frame = retarded_frame(w, y)?;
    if !(frame.r > 10.0 * h) {
        return Err(Error::StepTooLarge { h, r: frame.r });
    }
    Ok(frame)
}

/// `∂_α A^ν` for each axis `α`, by five-point central differences.
fn potential_gradient(
    w: &(impl Worldline + ?Sized),
    e: f64,
    y: &SixVector,
    h: f64,
) -> Result<[SixVector; DIM]> {
    let mut grad = [SixVector::ZERO; DIM];
    for (alpha, g) in grad.iter_mut().enumerate() {
        let mut samples = [SixVector::ZERO; 4];
        for (slot, off) in samples.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
            let mut p = *y;
            p[alpha] += off * h;
            *slot = potential(w, e, &p)?;
        }
        *g = (samples[0] - samples[1] * 8.0 + samples[2] * 8.0 - samples[3]) / (12.0 * h);
    }
    Ok(grad)
}

/// `F^{μν} = ∂^μ A^ν - ∂^ν A^μ` by fourth-order central differences of the
/// potential. Truncation error is `O(h⁴)`.
pub fn field_fd_oracle(
    w: &(impl Worldline + ?Sized),
    e: f64,
    y: &SixVector,
    h: f64,
) -> Result<AntisymTensor2> {
    checked_frame(w, y, h)?;
    let g = potential_gradient(w, e, y, h)?;
    Ok(AntisymTensor2::from_upper(|mu, nu| {
        METRIC[mu] * g[mu][nu] - METRIC[nu] * g[nu][mu]
    }))
}

/// Divergence `∂_α A^α` by fourth-order central differences.
pub fn gauge_residual(w: &(impl Worldline + ?Sized), e: f64, y: &SixVector, h: f64) -> Result<f64> {
    checked_frame(w, y, h)?;
    let g = potential_gradient(w, e, y, h)?;
    Ok((0..DIM).map(|alpha| g[alpha][alpha]).sum())
}

/// `□A = η^{αβ} ∂_α ∂_β A` by second-order three-point differences.
pub fn wave_residual(w: &(impl Worldline + ?Sized), e: f64, y: &SixVector, h: f64) -> Result<SixVector> {
    checked_frame(w, y, h)?;
    let mut total = SixVector::ZERO;
    let centre = potential(w, e, y)?;
    for alpha in 0..DIM {
        let mut plus = *y;
        plus[alpha] += h;
        let mut minus = *y;
        minus[alpha] -= h;
        let (ap, am) = (potential(w, e, &plus)?, potential(w, e, &minus)?);
        total += (ap + am - centre * 2.0) * (METRIC[alpha] / (h * h));
    }
    Ok(total)
}
