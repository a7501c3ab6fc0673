//! Closed-form radiative and bound momenta and angular momenta, and the
//! report comparing them with numerical tube fluxes.

use std::f64::consts::PI;

use super::quadrature::{integrate_adaptive, AdaptiveOptions};
use super::sphere::SphereQuadrature;
use super::tube::{tube_flux_numeric, TubeFlux};
use crate::error::{Error, Result};
use crate::tensor6::{wedge, AntisymTensor2, SixVector, ANTISYM_LEN, DIM};
use crate::worldline::{kinematic_state, KinematicState, Worldline};

/// `e²/(4π²)`.
pub fn coupling(e: f64) -> f64 {
    e * e / (4.0 * PI * PI)
}

/// Radiated momentum per unit proper time,
/// `c (4/5 u ȧ² - 6/35 a² ȧ + 3/7 a (a²)˙ + 2 a⁴ u)`.
pub fn radiated_rate(state: &KinematicState, e: f64) -> SixVector {
    let (a2, adot2, a2dot) = (state.a2(), state.adot2(), state.a2_dot());
    (state.u * (0.8 * adot2 + 2.0 * a2 * a2) - state.adot * (6.0 / 35.0 * a2) + state.a * (3.0 / 7.0 * a2dot))
        * coupling(e)
}

/// Intrinsic part of the radiated angular momentum rate,
/// `c (4/5 a∧ȧ + 64/35 a² u∧a)`.
pub fn radiated_spin_rate(state: &KinematicState, e: f64) -> AntisymTensor2 {
    (wedge(&state.a, &state.adot) * 0.8 + wedge(&state.u, &state.a) * (64.0 / 35.0 * state.a2())) * coupling(e)
}

/// Full radiated angular momentum rate `z∧ṗ_rad` plus the intrinsic part.
pub fn radiated_angular_rate(state: &KinematicState, e: f64) -> AntisymTensor2 {
    wedge(&state.z, &radiated_rate(state, e)) + radiated_spin_rate(state, e)
}

fn tight() -> AdaptiveOptions {
    AdaptiveOptions { rel_tol: 1e-12, ..Default::default() }
}

/// Radiated momentum over `[τ₀, τ₁]`.
pub fn radiative_momentum(w: &(impl Worldline + ?Sized), e: f64, tau0: f64, tau1: f64) -> Result<SixVector> {
    let f = |tau: f64| -> Result<Vec<f64>> { Ok(radiated_rate(&kinematic_state(w, tau)?, e).0.to_vec()) };
    let res = integrate_adaptive(&f, tau0, tau1, &tight())?;
    Ok(SixVector::new(res.value.try_into().expect("six components")))
}

/// Radiated angular momentum over `[τ₀, τ₁]`.
pub fn radiative_angular_momentum(
    w: &(impl Worldline + ?Sized),
    e: f64,
    tau0: f64,
    tau1: f64,
) -> Result<AntisymTensor2> {
    // orbital and intrinsic parts are integrated as separate components since
    // they can cancel, leaving nothing to measure the error against
    let f = |tau: f64| -> Result<Vec<f64>> {
        let s = kinematic_state(w, tau)?;
        let mut v = wedge(&s.z, &radiated_rate(&s, e)).0.to_vec();
        v.extend_from_slice(&radiated_spin_rate(&s, e).0);
        Ok(v)
    };
    let res = integrate_adaptive(&f, tau0, tau1, &tight())?;
    let (orbital, spin) = res.value.split_at(ANTISYM_LEN);
    Ok(AntisymTensor2(orbital.try_into().expect("fifteen components"))
        + AntisymTensor2(spin.try_into().expect("fifteen components")))
}

/// Coefficients of `r⁻³, r⁻², r⁻¹` in the bound momentum:
/// `c [3/2 u, 12/5 a, 2 a² u]`.
pub fn bound_momentum_terms(state: &KinematicState, e: f64) -> [SixVector; 3] {
    let c = coupling(e);
    [state.u * (1.5 * c), state.a * (2.4 * c), state.u * (2.0 * c * state.a2())]
}

/// Bound momentum attached to the charge at one endpoint of a tube segment.
pub fn bound_momentum(state: &KinematicState, e: f64, r: f64) -> Result<SixVector> {
    check_radius(r)?;
    let [t3, t2, t1] = bound_momentum_terms(state, e);
    Ok(t3 / r.powi(3) + t2 / (r * r) + t1 / r)
}

/// Bound angular momentum split into orbital `z∧(…)` coefficients of
/// `r⁻³, r⁻², r⁻¹` and the `r⁻¹` spin coefficient `12/5 c u∧a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundAngularTerms {
    pub orbital: [AntisymTensor2; 3],
    pub spin: AntisymTensor2,
}

impl BoundAngularTerms {
    /// Total coefficient of `r^p`, `p ∈ {-3, -2, -1}`.
    pub fn at_power(&self, p: i32) -> AntisymTensor2 {
        match p {
            -3 => self.orbital[0],
            -2 => self.orbital[1],
            -1 => self.orbital[2] + self.spin,
            _ => AntisymTensor2::ZERO,
        }
    }
}

pub fn bound_angular_terms(state: &KinematicState, e: f64) -> BoundAngularTerms {
    let p = bound_momentum_terms(state, e);
    BoundAngularTerms {
        orbital: p.map(|t| wedge(&state.z, &t)),
        spin: wedge(&state.u, &state.a) * (2.4 * coupling(e)),
    }
}

/// `z∧p_bnd + 12/5 c (u∧a)/r`.
pub fn bound_angular_momentum(state: &KinematicState, e: f64, r: f64) -> Result<AntisymTensor2> {
    check_radius(r)?;
    let t = bound_angular_terms(state, e);
    Ok(t.at_power(-3) / r.powi(3) + t.at_power(-2) / (r * r) + t.at_power(-1) / r)
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius {r} must be positive")))
    }
}

/// Relative residual `|numeric - closed|∞ / max(|closed|∞, floor)`.
pub fn relative_residual(numeric: &[f64], closed: &[f64], floor: f64) -> f64 {
    let diff = numeric.iter().zip(closed).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    let scale = closed.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    diff / scale.max(floor)
}

/// Closed-form tube fluxes over `[τ₀, τ₁]` at radius `r`, their numerical
/// counterparts and the relative residuals between them.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxReport {
    pub e: f64,
    pub r: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub p_rad: SixVector,
    /// Endpoint coefficients of `r⁻³, r⁻², r⁻¹` at `τ₀` and `τ₁`.
    pub p_bnd_terms: [[SixVector; 3]; 2],
    pub m_rad: AntisymTensor2,
    pub m_bnd_terms: [BoundAngularTerms; 2],
    pub numeric: TubeFlux,
    pub residuals: FluxResiduals,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxResiduals {
    pub p_rad: f64,
    pub p_bnd: f64,
    pub m_rad: f64,
    pub m_bnd: f64,
}

impl FluxResiduals {
    pub fn max(&self) -> f64 {
        self.p_rad.max(self.p_bnd).max(self.m_rad).max(self.m_bnd)
    }
}

impl FluxReport {
    /// `p_bnd(τ₁) - p_bnd(τ₀)` at the report radius.
    pub fn p_bnd_difference(&self) -> SixVector {
        let at = |t: &[SixVector; 3]| t[0] / self.r.powi(3) + t[1] / (self.r * self.r) + t[2] / self.r;
        at(&self.p_bnd_terms[1]) - at(&self.p_bnd_terms[0])
    }

    /// `M_bnd(τ₁) - M_bnd(τ₀)` at the report radius.
    pub fn m_bnd_difference(&self) -> AntisymTensor2 {
        let at = |t: &BoundAngularTerms| {
            t.at_power(-3) / self.r.powi(3) + t.at_power(-2) / (self.r * self.r) + t.at_power(-1) / self.r
        };
        at(&self.m_bnd_terms[1]) - at(&self.m_bnd_terms[0])
    }
}

/// Evaluates closed forms and the numerical tube integral and compares them.
/// Residuals are relative to the closed form, floored at `10⁻⁶ c` so that
/// vanishing quantities are compared absolutely.
pub fn flux_report(
    w: &(impl Worldline + ?Sized),
    e: f64,
    r: f64,
    tau0: f64,
    tau1: f64,
    q: &SphereQuadrature,
    opts: &AdaptiveOptions,
) -> Result<FluxReport> {
    let numeric = tube_flux_numeric(w, e, r, tau0, tau1, q, opts)?;
    let s0 = kinematic_state(w, tau0)?;
    let s1 = kinematic_state(w, tau1)?;
    let mut report = FluxReport {
        e,
        r,
        tau0,
        tau1,
        p_rad: radiative_momentum(w, e, tau0, tau1)?,
        p_bnd_terms: [bound_momentum_terms(&s0, e), bound_momentum_terms(&s1, e)],
        m_rad: radiative_angular_momentum(w, e, tau0, tau1)?,
        m_bnd_terms: [bound_angular_terms(&s0, e), bound_angular_terms(&s1, e)],
        numeric,
        residuals: FluxResiduals { p_rad: 0.0, p_bnd: 0.0, m_rad: 0.0, m_bnd: 0.0 },
    };
    let floor = 1e-6 * coupling(e).max(f64::MIN_POSITIVE);
    let n = &report.numeric;
    report.residuals = FluxResiduals {
        p_rad: relative_residual(&n.rad_momentum().0, &report.p_rad.0, floor),
        p_bnd: relative_residual(&n.bound_momentum().0, &report.p_bnd_difference().0, floor),
        m_rad: relative_residual(&n.rad_angular().0, &report.m_rad.0, floor),
        m_bnd: relative_residual(&n.bound_angular().0, &report.m_bnd_difference().0, floor),
    };
    debug_assert_eq!(report.p_rad.0.len(), DIM);
    debug_assert_eq!(report.m_rad.0.len(), ANTISYM_LEN);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::{HyperbolicMotion, UniformMotion};

    #[test]
    fn hyperbolic_rate_time_component() {
        let w = HyperbolicMotion::new(1.0).unwrap();
        let c = coupling(1.0);
        for tau in [-0.7, 0.0, 1.3] {
            let s = kinematic_state(&w, tau).unwrap();
            let rate = radiated_rate(&s, 1.0);
            assert!((rate.time() - 36.0 / 35.0 * c * tau.cosh()).abs() < 1e-14);
        }
    }

    #[test]
    fn hyperbolic_momentum_integral() {
        let w = HyperbolicMotion::new(1.0).unwrap();
        let p = radiative_momentum(&w, 1.0, 0.0, 1.0).unwrap();
        let c = coupling(1.0);
        assert!((p.time() - 36.0 / 35.0 * c * 1f64.sinh()).abs() < 1e-13);
        assert!((p[1] - 36.0 / 35.0 * c * (1f64.cosh() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn static_bound_momentum_is_coulomb() {
        let w = UniformMotion::new([0.0; 5]).unwrap();
        let s = kinematic_state(&w, 0.0).unwrap();
        let p = bound_momentum(&s, 1.0, 2.0).unwrap();
        assert!((p.time() - 1.5 * coupling(1.0) / 8.0).abs() < 1e-16);
        assert_eq!(bound_angular_momentum(&s, 1.0, 2.0).unwrap(), AntisymTensor2::ZERO);
    }

    #[test]
    fn hyperbolic_bound_terms_at_origin() {
        let w = HyperbolicMotion::new(1.0).unwrap();
        let s = kinematic_state(&w, 0.0).unwrap();
        let c = coupling(1.0);
        let p = bound_momentum(&s, 1.0, 1.0).unwrap();
        let expect = s.u * (3.5 * c) + s.a * (2.4 * c);
        assert!((p - expect).max_abs() < 1e-15);
        let t = bound_angular_terms(&s, 1.0);
        assert!((t.spin - wedge(&s.u, &s.a) * (2.4 * c)).max_abs() < 1e-16);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let w = UniformMotion::new([0.0; 5]).unwrap();
        let s = kinematic_state(&w, 0.0).unwrap();
        assert!(bound_momentum(&s, 1.0, 0.0).is_err());
    }
}

#[cfg(test)]
mod report_tests {
    use super::*;
    use crate::worldline::{HelicalMotion, HyperbolicMotion};

    #[test]
    fn hyperbolic_and_helical_reports() {
        let q = SphereQuadrature::flux_default();
        let opts = AdaptiveOptions { rel_tol: 1e-11, ..Default::default() };
        let hyp = HyperbolicMotion::new(1.0).unwrap();
        let hel = HelicalMotion::new(1.0, 0.5, 0.2).unwrap();
        for (w, t0, t1) in [(&hyp as &dyn Worldline, -0.5, 1.0), (&hel as &dyn Worldline, 0.0, 2.0)] {
            let rep = flux_report(w, 1.0, 0.7, t0, t1, &q, &opts).map_err(|e| e.to_string()).unwrap();
            assert!(rep.residuals.max() < 1e-7, "{:?}", rep.residuals);
        }
    }
}
