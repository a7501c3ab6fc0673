//! Worldlines parametrized by proper time, their derivatives through the
//! fifth derivative of position, and the retarded-time problem.

mod analytic;
mod numeric;
mod retarded;
mod transformed;

pub use analytic::{HelicalMotion, HyperbolicMotion, LogRapidityMotion, UniformMotion};
pub use numeric::NumericWorldline;
pub use retarded::{
    hyperplane_point, lab_null_vector, retarded_frame, sphere_point, RetardedFrame, SphereAngles, R_MIN,
};
pub use transformed::PoincareTransformed;

use crate::error::{Error, Result};
use crate::tensor6::SixVector;

/// Tolerance on the differentiated normalization chain.
pub const TAU_KIN: f64 = 1e-8;

/// Position and derivatives of the velocity at one proper time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinematicState {
    pub tau: f64,
    pub z: SixVector,
    pub u: SixVector,
    pub a: SixVector,
    pub adot: SixVector,
    pub addot: SixVector,
    pub adddot: SixVector,
}

/// Residuals of `u·u = -1` and its first four proper-time derivatives,
/// each divided by the magnitude of the terms involved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainResiduals {
    pub normalization: f64,
    pub orthogonality: f64,
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

impl ChainResiduals {
    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.normalization, self.orthogonality, self.first, self.second, self.third]
    }

    pub const NAMES: [&'static str; 5] = [
        "u·u = -1",
        "u·a = 0",
        "u·ȧ = -a²",
        "u·ä = -3a·ȧ",
        "u·a⃛ = -4a·ä - 3ȧ·ȧ",
    ];
}

impl KinematicState {
    /// `a·a`.
    pub fn a2(&self) -> f64 {
        self.a.norm_sq()
    }

    /// `d(a·a)/dτ = 2 a·ȧ`.
    pub fn a2_dot(&self) -> f64 {
        2.0 * self.a.dot(&self.adot)
    }

    /// `d²(a·a)/dτ² = 2(ȧ·ȧ + a·ä)`.
    pub fn a2_ddot(&self) -> f64 {
        2.0 * (self.adot.norm_sq() + self.a.dot(&self.addot))
    }

    /// `d³(a·a)/dτ³ = 2(3 ȧ·ä + a·a⃛)`.
    pub fn a2_dddot(&self) -> f64 {
        2.0 * (3.0 * self.adot.dot(&self.addot) + self.a.dot(&self.adddot))
    }

    /// `ȧ·ȧ`.
    pub fn adot2(&self) -> f64 {
        self.adot.norm_sq()
    }

    /// `d(ȧ·ȧ)/dτ`.
    pub fn adot2_dot(&self) -> f64 {
        2.0 * self.adot.dot(&self.addot)
    }

    pub fn is_finite(&self) -> bool {
        self.tau.is_finite()
            && [self.z, self.u, self.a, self.adot, self.addot, self.adddot]
                .iter()
                .all(SixVector::is_finite)
    }

    pub fn chain_residuals(&self) -> ChainResiduals {
        let e = |v: &SixVector| v.euclid();
        let (u, a, ad, add, addd) = (e(&self.u), e(&self.a), e(&self.adot), e(&self.addot), e(&self.adddot));
        let rel = |res: f64, scale: f64| res.abs() / scale.max(1.0);
        ChainResiduals {
            normalization: rel(self.u.norm_sq() + 1.0, u * u),
            orthogonality: rel(self.u.dot(&self.a), u * a),
            first: rel(self.u.dot(&self.adot) + self.a2(), u * ad + a * a),
            second: rel(
                self.u.dot(&self.addot) + 3.0 * self.a.dot(&self.adot),
                u * add + 3.0 * a * ad,
            ),
            third: rel(
                self.u.dot(&self.adddot) + 4.0 * self.a.dot(&self.addot) + 3.0 * self.adot2(),
                u * addd + 4.0 * a * add + 3.0 * ad * ad,
            ),
        }
    }

    /// Fails with [`Error::KinematicChain`] if any chain residual exceeds `tol`.
    pub fn check_chain(&self, tol: f64) -> Result<()> {
        let res = self.chain_residuals();
        for (value, name) in res.as_array().into_iter().zip(ChainResiduals::NAMES) {
            if !(value <= tol) {
                return Err(Error::KinematicChain {
                    tau: self.tau,
                    relation: name,
                    residual: value,
                    tolerance: tol,
                });
            }
        }
        Ok(())
    }
}

/// A timelike worldline parametrized by proper time.
pub trait Worldline: Send + Sync {
    /// Closed proper-time interval on which the worldline is defined.
    fn domain(&self) -> (f64, f64);

    /// Raw evaluation without domain or chain validation.
    fn evaluate(&self, tau: f64) -> Result<KinematicState>;

    /// Position and velocity only. Used by the retarded-time solver.
    fn position_velocity(&self, tau: f64) -> Result<(SixVector, SixVector)> {
        let s = self.evaluate(tau)?;
        Ok((s.z, s.u))
    }

    fn contains(&self, tau: f64) -> bool {
        let (lo, hi) = self.domain();
        tau >= lo && tau <= hi
    }
}

impl<W: Worldline + ?Sized> Worldline for Box<W> {
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        (**self).evaluate(tau)
    }
    fn position_velocity(&self, tau: f64) -> Result<(SixVector, SixVector)> {
        (**self).position_velocity(tau)
    }
}

impl<W: Worldline + ?Sized> Worldline for &W {
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        (**self).evaluate(tau)
    }
    fn position_velocity(&self, tau: f64) -> Result<(SixVector, SixVector)> {
        (**self).position_velocity(tau)
    }
}

pub(crate) fn check_domain(w: &(impl Worldline + ?Sized), tau: f64) -> Result<()> {
    if !tau.is_finite() {
        return Err(Error::NonFinite("proper time"));
    }
    let (lo, hi) = w.domain();
    if tau < lo || tau > hi {
        return Err(Error::OutsideDomain { tau, lo, hi });
    }
    Ok(())
}

/// Validated state at `tau`: inside the domain, finite, and satisfying the
/// kinematic chain within [`TAU_KIN`].
pub fn kinematic_state(w: &(impl Worldline + ?Sized), tau: f64) -> Result<KinematicState> {
    check_domain(w, tau)?;
    let s = w.evaluate(tau)?;
    if !s.is_finite() {
        return Err(Error::NonFinite("kinematic state"));
    }
    s.check_chain(TAU_KIN)?;
    Ok(s)
}

/// Parameters of the built-in trajectory families.
#[derive(Clone, Debug, PartialEq)]
pub enum TrajectorySpec {
    /// Inertial motion through the origin with coordinate velocity `velocity`.
    Uniform { velocity: [f64; 5] },
    /// Constant proper acceleration `g` along axis 1.
    Hyperbolic { g: f64 },
    /// Circle of radius `radius` in the (1,2)-plane at coordinate speed `speed`.
    Circular { radius: f64, speed: f64 },
    /// Circular motion plus uniform drift along axis 3.
    Helical { radius: f64, speed: f64, drift: f64 },
    /// Planar motion along axis 1 with rapidity `ln(τ/scale)`; its acceleration
    /// magnitude `1/τ` is not constant.
    LogRapidity { scale: f64 },
}

impl TrajectorySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TrajectorySpec::Uniform { .. } => "uniform",
            TrajectorySpec::Hyperbolic { .. } => "hyperbolic",
            TrajectorySpec::Circular { .. } => "circular",
            TrajectorySpec::Helical { .. } => "helical",
            TrajectorySpec::LogRapidity { .. } => "log-rapidity",
        }
    }
}

/// Builds an analytic worldline, validating its parameters.
pub fn builtin_worldline(spec: &TrajectorySpec) -> Result<Box<dyn Worldline>> {
    Ok(match *spec {
        TrajectorySpec::Uniform { velocity } => Box::new(UniformMotion::new(velocity)?),
        TrajectorySpec::Hyperbolic { g } => Box::new(HyperbolicMotion::new(g)?),
        TrajectorySpec::Circular { radius, speed } => {
            Box::new(HelicalMotion::new(radius, speed, 0.0)?)
        }
        TrajectorySpec::Helical { radius, speed, drift } => {
            Box::new(HelicalMotion::new(radius, speed, drift)?)
        }
        TrajectorySpec::LogRapidity { scale } => Box::new(LogRapidityMotion::new(scale)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_detects_violation() {
        let mut s = HyperbolicMotion::new(1.0).unwrap().evaluate(0.3).unwrap();
        assert!(s.check_chain(TAU_KIN).is_ok());
        s.adot = s.adot * 1.01;
        assert!(matches!(s.check_chain(TAU_KIN), Err(Error::KinematicChain { .. })));
    }

    #[test]
    fn domain_violation_is_reported() {
        let w = LogRapidityMotion::new(1.0).unwrap();
        assert!(matches!(kinematic_state(&w, -1.0), Err(Error::OutsideDomain { .. })));
        assert!(kinematic_state(&w, 1.0).is_ok());
    }

    #[test]
    fn builtin_rejects_unphysical() {
        for spec in [
            TrajectorySpec::Uniform { velocity: [0.8, 0.7, 0.0, 0.0, 0.0] },
            TrajectorySpec::Hyperbolic { g: 0.0 },
            TrajectorySpec::Circular { radius: -1.0, speed: 0.5 },
            TrajectorySpec::Helical { radius: 1.0, speed: 0.8, drift: 0.7 },
            TrajectorySpec::LogRapidity { scale: f64::NAN },
        ] {
            assert!(builtin_worldline(&spec).is_err(), "{spec:?}");
        }
    }
}
