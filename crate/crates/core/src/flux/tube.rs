//! Numerical flux of field momentum and angular momentum through the world
//! tube of constant retarded distance.

use super::quadrature::{integrate_adaptive, AdaptiveOptions, CompensatedSum};
use super::sphere::SphereQuadrature;
use crate::error::{Error, Result};
use crate::lw_field::graded_field;
use crate::stress_energy::stress_bilinear_flux;
use crate::tensor6::{
    mclf_boost, to_lab_boost, wedge, AntisymTensor2, SixVector, ANTISYM_LEN, DIM,
};
use crate::worldline::{kinematic_state, KinematicState, RetardedFrame, Worldline, R_MIN};

/// Lowest power of `r` in the bound momentum flux.
pub const MOMENTUM_POWER_MIN: i32 = -4;
/// Lowest power of `r` in the bound intrinsic angular flux.
pub const INTRINSIC_POWER_MIN: i32 = -3;
/// Number of power bins kept for each bound quantity.
pub const POWER_BINS: usize = 6;

/// Outward surface element `[-u + (1 + r a_k) k] r⁴` of the tube.
pub fn surface_element(frame: &RetardedFrame) -> SixVector {
    let r = frame.r;
    (frame.k * (1.0 + r * frame.a_k()) - frame.state.u) * r.powi(4)
}

/// Flux densities per unit proper time, all in laboratory components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeRate {
    /// Index `κ - 4`: contribution of the `r⁻κ` stress piece; index 0 is radiative.
    pub momentum_by_grade: [SixVector; 5],
    /// Index `p + 4` for powers `r^p`, `p = -4..=1`. The `r⁰` slot stays zero:
    /// r-independent flux is accumulated in the radiative fields. The `r¹`
    /// slot collects `r⁵ a_k k·T₍₋₄₎`, which vanishes.
    pub bound_momentum_by_power: [SixVector; POWER_BINS],
    /// `z ∧` the momentum bins.
    pub bound_orbital_by_power: [AntisymTensor2; POWER_BINS],
    /// `r k ∧ f` integrated over the sphere; index `p + 3`, `p = -3..=2`, with
    /// the `r⁰` slot left zero as above.
    pub bound_intrinsic_by_power: [AntisymTensor2; POWER_BINS],
    pub rad_momentum: SixVector,
    pub rad_orbital: AntisymTensor2,
    pub rad_intrinsic: AntisymTensor2,
}

const VEC_BLOCKS: usize = 5 + POWER_BINS + 1;
const TEN_BLOCKS: usize = 2 * POWER_BINS + 2;
const PACKED_LEN: usize = VEC_BLOCKS * DIM + TEN_BLOCKS * ANTISYM_LEN;

impl TubeRate {
    pub fn zero() -> Self {
        TubeRate {
            momentum_by_grade: [SixVector::ZERO; 5],
            bound_momentum_by_power: [SixVector::ZERO; POWER_BINS],
            bound_orbital_by_power: [AntisymTensor2::ZERO; POWER_BINS],
            bound_intrinsic_by_power: [AntisymTensor2::ZERO; POWER_BINS],
            rad_momentum: SixVector::ZERO,
            rad_orbital: AntisymTensor2::ZERO,
            rad_intrinsic: AntisymTensor2::ZERO,
        }
    }

    fn pack(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(PACKED_LEN);
        for v in self.momentum_by_grade.iter().chain(&self.bound_momentum_by_power).chain([&self.rad_momentum]) {
            out.extend_from_slice(&v.0);
        }
        for t in self
            .bound_orbital_by_power
            .iter()
            .chain(&self.bound_intrinsic_by_power)
            .chain([&self.rad_orbital, &self.rad_intrinsic])
        {
            out.extend_from_slice(&t.0);
        }
        out
    }

    fn unpack(data: &[f64]) -> Self {
        let mut r = TubeRate::zero();
        let vec_at = |i: usize| SixVector::new(data[i * DIM..(i + 1) * DIM].try_into().expect("block"));
        let base = VEC_BLOCKS * DIM;
        let ten_at = |i: usize| {
            AntisymTensor2(data[base + i * ANTISYM_LEN..base + (i + 1) * ANTISYM_LEN].try_into().expect("block"))
        };
        for i in 0..5 {
            r.momentum_by_grade[i] = vec_at(i);
        }
        for i in 0..POWER_BINS {
            r.bound_momentum_by_power[i] = vec_at(5 + i);
            r.bound_orbital_by_power[i] = ten_at(i);
            r.bound_intrinsic_by_power[i] = ten_at(POWER_BINS + i);
        }
        r.rad_momentum = vec_at(5 + POWER_BINS);
        r.rad_orbital = ten_at(2 * POWER_BINS);
        r.rad_intrinsic = ten_at(2 * POWER_BINS + 1);
        r
    }

    pub fn bound_momentum(&self) -> SixVector {
        self.bound_momentum_by_power.iter().fold(SixVector::ZERO, |a, v| a + *v)
    }

    pub fn bound_angular(&self) -> AntisymTensor2 {
        self.bound_orbital_by_power
            .iter()
            .chain(&self.bound_intrinsic_by_power)
            .fold(AntisymTensor2::ZERO, |a, t| a + *t)
    }

    pub fn rad_angular(&self) -> AntisymTensor2 {
        self.rad_orbital + self.rad_intrinsic
    }
}

/// Rest-frame copy of a state: `u = (1, 0, …)`, position at the origin.
fn rest_state(state: &KinematicState) -> Result<KinematicState> {
    let m = mclf_boost(&state.u)?;
    Ok(KinematicState {
        tau: state.tau,
        z: SixVector::ZERO,
        u: SixVector::rest(),
        a: m.apply(&state.a),
        adot: m.apply(&state.adot),
        addot: m.apply(&state.addot),
        adddot: m.apply(&state.adddot),
    })
}

/// Sphere integral of the flux densities at one proper time and radius.
pub fn tube_rate(state: &KinematicState, e: f64, r: f64, q: &SphereQuadrature) -> Result<TubeRate> {
    Ok(tube_rate_with_gross(state, e, r, q)?.0)
}

/// [`tube_rate`] together with the weighted sum of the node contribution
/// norms, boosted to the lab. The latter bounds what the sphere sum
/// can cancel down to and sets the rounding floor of the time integral.
fn tube_rate_with_gross(state: &KinematicState, e: f64, r: f64, q: &SphereQuadrature) -> Result<(TubeRate, f64)> {
    if !(r.is_finite() && r > R_MIN) {
        return Err(Error::InvalidParameter(format!("tube radius {r} must exceed {R_MIN:e}")));
    }
    let rest = rest_state(state)?;
    let to_lab = to_lab_boost(&state.u);
    let r4 = r.powi(4);
    let r5 = r4 * r;

    let mut acc = CompensatedSum::new(PACKED_LEN);
    let mut gross = 0.0;
    for node in &q.nodes {
        let k = SixVector::from_time_space(1.0, node.direction);
        let frame = RetardedFrame::from_state(rest, r, k);
        let g = graded_field(&frame, e);
        let (f4, f3, f2) = (&g.minus4, &g.minus3, &g.minus2);
        // first term (-u + k) r⁴ is (0, n) r⁴ here; second is r⁵ a_k k
        let pieces = [(SixVector::from_time_space(0.0, node.direction) * r4, 4), (k * (r5 * frame.a_k()), 5)];
        let mut node_rate = TubeRate::zero();
        for (ds, shift) in pieces {
            let f = |x: &AntisymTensor2, y: &AntisymTensor2| stress_bilinear_flux(&ds, x, y);
            let by_grade = [
                f(f2, f2),
                f(f3, f2) * 2.0,
                f(f3, f3) + f(f4, f2) * 2.0,
                f(f4, f3) * 2.0,
                f(f4, f4),
            ];
            for (i, v) in by_grade.iter().enumerate() {
                let kappa = i as i32 + 4;
                let p = shift - kappa;
                node_rate.momentum_by_grade[i] += *v;
                let spin = wedge(&k, v) * r;
                // every r-independent contribution is radiative
                if p == 0 {
                    node_rate.rad_momentum += *v;
                } else {
                    node_rate.bound_momentum_by_power[(p - MOMENTUM_POWER_MIN) as usize] += *v;
                }
                if p + 1 == 0 {
                    node_rate.rad_intrinsic += spin;
                } else {
                    node_rate.bound_intrinsic_by_power[(p + 1 - INTRINSIC_POWER_MIN) as usize] += spin;
                }
            }
        }
        let packed = node_rate.pack();
        gross += node.weight * packed.iter().map(|x| x * x).sum::<f64>().sqrt();
        acc.add_scaled(&packed, node.weight);
    }
    let rest_rate = TubeRate::unpack(&acc.total());

    let v = |x: &SixVector| to_lab.apply(x);
    let t = |x: &AntisymTensor2| to_lab.apply_antisym(x);
    let z = state.z;
    let mut lab = TubeRate::zero();
    for i in 0..5 {
        lab.momentum_by_grade[i] = v(&rest_rate.momentum_by_grade[i]);
    }
    for i in 0..POWER_BINS {
        let p = v(&rest_rate.bound_momentum_by_power[i]);
        lab.bound_momentum_by_power[i] = p;
        lab.bound_orbital_by_power[i] = wedge(&z, &p);
        lab.bound_intrinsic_by_power[i] = t(&rest_rate.bound_intrinsic_by_power[i]);
    }
    lab.rad_momentum = v(&rest_rate.rad_momentum);
    lab.rad_orbital = wedge(&z, &lab.rad_momentum);
    lab.rad_intrinsic = t(&rest_rate.rad_intrinsic);
    let boost = 2.0 * state.u.time() * state.u.time();
    Ok((lab, gross * boost * (1.0 + z.0.iter().map(|x| x * x).sum::<f64>()).sqrt()))
}

/// Numerically integrated tube fluxes over `[τ₀, τ₁]` at radius `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeFlux {
    pub r: f64,
    pub tau0: f64,
    pub tau1: f64,
    /// Same layout as [`TubeRate`], integrated over proper time.
    pub totals: TubeRate,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl TubeFlux {
    pub fn rad_momentum(&self) -> SixVector {
        self.totals.rad_momentum
    }

    pub fn bound_momentum(&self) -> SixVector {
        self.totals.bound_momentum()
    }

    pub fn rad_angular(&self) -> AntisymTensor2 {
        self.totals.rad_angular()
    }

    pub fn bound_angular(&self) -> AntisymTensor2 {
        self.totals.bound_angular()
    }

    /// Orbital plus intrinsic bound angular flux at power `r^p`, `p = -4..=2`.
    pub fn bound_angular_at_power(&self, p: i32) -> AntisymTensor2 {
        let mut t = AntisymTensor2::ZERO;
        let io = p - MOMENTUM_POWER_MIN;
        if (0..POWER_BINS as i32).contains(&io) {
            t += self.totals.bound_orbital_by_power[io as usize];
        }
        let ii = p - INTRINSIC_POWER_MIN;
        if (0..POWER_BINS as i32).contains(&ii) {
            t += self.totals.bound_intrinsic_by_power[ii as usize];
        }
        t
    }

    /// Bound momentum flux at power `r^p`, `p = -4..=1`.
    pub fn bound_momentum_at_power(&self, p: i32) -> SixVector {
        let i = p - MOMENTUM_POWER_MIN;
        if (0..POWER_BINS as i32).contains(&i) {
            self.totals.bound_momentum_by_power[i as usize]
        } else {
            SixVector::ZERO
        }
    }
}

/// Integrates [`tube_rate`] over proper time with adaptive Gauss panels.
pub fn tube_flux_numeric(
    w: &(impl Worldline + ?Sized),
    e: f64,
    r: f64,
    tau0: f64,
    tau1: f64,
    q: &SphereQuadrature,
    opts: &AdaptiveOptions,
) -> Result<TubeFlux> {
    if !(tau0 < tau1) {
        return Err(Error::InvalidParameter(format!("empty proper-time range [{tau0}, {tau1}]")));
    }
    if !(r.is_finite() && r > R_MIN) {
        return Err(Error::InvalidParameter(format!("tube radius {r} must exceed {R_MIN:e}")));
    }
    // the trailing gross magnitude keeps cancelling components from being
    // refined below rounding
    let integrand = |tau: f64| -> Result<Vec<f64>> {
        let s = kinematic_state(w, tau)?;
        let (rate, gross) = tube_rate_with_gross(&s, e, r, q)?;
        let mut v = rate.pack();
        v.push(1e-6 * gross);
        Ok(v)
    };
    let mut res = integrate_adaptive(&integrand, tau0, tau1, opts)?;
    res.value.pop();
    Ok(TubeFlux {
        r,
        tau0,
        tau1,
        totals: TubeRate::unpack(&res.value),
        error_estimate: res.error_estimate,
        evaluations: res.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::{HyperbolicMotion, UniformMotion};

    #[test]
    fn pack_round_trip() {
        let mut r = TubeRate::zero();
        r.momentum_by_grade[2] = SixVector::basis(3);
        r.bound_intrinsic_by_power[4] = wedge(&SixVector::basis(0), &SixVector::basis(5));
        r.rad_orbital = wedge(&SixVector::basis(1), &SixVector::basis(2));
        assert_eq!(TubeRate::unpack(&r.pack()), r);
        assert_eq!(r.pack().len(), PACKED_LEN);
    }

    #[test]
    fn static_surface_element_is_radial() {
        let w = UniformMotion::new([0.0; 5]).unwrap();
        let s = kinematic_state(&w, 0.0).unwrap();
        let n = SixVector::from_time_space(0.0, [0.0, 0.6, 0.0, 0.8, 0.0]);
        let f = RetardedFrame::from_state(s, 2.0, s.u + n);
        assert_eq!(surface_element(&f), n * 16.0);
    }

    #[test]
    fn static_rate_has_no_flux() {
        let w = UniformMotion::new([0.0; 5]).unwrap();
        let s = kinematic_state(&w, 0.0).unwrap();
        let rate = tube_rate(&s, 1.0, 1.0, &SphereQuadrature::flux_default()).unwrap();
        assert!(rate.bound_momentum().max_abs() < 1e-15);
        assert!(rate.rad_momentum.max_abs() < 1e-15);
    }

    #[test]
    fn default_rule_is_exact_for_flux_densities() {
        use crate::flux::sphere::AngularRule;
        use crate::worldline::LogRapidityMotion;
        let w = LogRapidityMotion::new(1.0).unwrap();
        let s = kinematic_state(&w, 0.7).unwrap();
        let fine = SphereQuadrature::new(AngularRule::PolynomialExact, 12, 24).unwrap();
        let a = tube_rate(&s, 1.0, 0.8, &SphereQuadrature::flux_default()).unwrap().pack();
        let b = tube_rate(&s, 1.0, 0.8, &fine).unwrap().pack();
        let scale = b.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-13 * scale));
        // one node fewer in φ loses the degree-5 terms
        let coarse = SphereQuadrature::new(AngularRule::PolynomialExact, 5, 5).unwrap();
        let c = tube_rate(&s, 1.0, 0.8, &coarse).unwrap().pack();
        assert!(c.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-6 * scale));
    }

    #[test]
    fn hyperbolic_radiative_rate_time_component() {
        let w = HyperbolicMotion::new(1.0).unwrap();
        let q = SphereQuadrature::flux_default();
        let c = 1.0 / (4.0 * std::f64::consts::PI.powi(2));
        for tau in [0.0, 0.5, -1.2] {
            let s = kinematic_state(&w, tau).unwrap();
            let rate = tube_rate(&s, 1.0, 0.7, &q).unwrap();
            let expect = 36.0 / 35.0 * c * tau.cosh();
            assert!((rate.rad_momentum.time() - expect).abs() < 1e-12 * expect);
        }
    }
}
