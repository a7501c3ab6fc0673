//! Bound momentum on the spacelike hyperplane `y⁰ = t`, foliated by the
//! null rays leaving the worldline at retarded time `u`.

use nalgebra::Matrix5;

use super::closed::coupling;
use super::quadrature::{integrate_adaptive, AdaptiveOptions, CompensatedSum};
use super::sphere::SphereQuadrature;
use crate::error::{Error, Result};
use crate::lw_field::graded_field;
use crate::stress_energy::graded_products;
use crate::tensor6::{Rank2Tensor, SixVector, DIM};
use crate::worldline::{
    kinematic_state, lab_null_vector, KinematicState, RetardedFrame, SphereAngles, Worldline,
};

/// Closed-form bound momentum on the hyperplane `y⁰ = t` as a function of the
/// state at retarded time `u`, with `R = t - z⁰(u)`. Its derivative in `u`
/// is the bound momentum carried by the slice of rays leaving at `u`.
pub fn hyperplane_bound_momentum(state: &KinematicState, e: f64, t: f64) -> Result<SixVector> {
    let big_r = t - state.z.time();
    if !(big_r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hyperplane time {t} must follow the worldline event (z⁰ = {})",
            state.z.time()
        )));
    }
    let (u, a) = (state.u, state.a);
    let (u0, a0, a2) = (u.time(), a.time(), state.a2());
    let e0 = SixVector::basis(0) * -1.0;
    let cubic = (u * (-12.0 * u0 + 40.0 * u0.powi(3)) + e0 * (-1.5 + 12.0 * u0 * u0)) * (3.0 / 35.0);
    let square = (a * (-5.0 + 33.0 * u0 * u0) + u * (31.0 * a0 * u0) + e0 * (3.0 * a0)) * (3.0 / 35.0);
    let linear = (a * (37.0 * a0) + u * (71.0 * a2 * u0) + e0 * a2) * (1.0 / 35.0);
    Ok((cubic / big_r.powi(3) + square / (big_r * big_r) + linear / big_r) * coupling(e))
}

/// Point of the hyperplane on the ray from `z` with velocity `vel` in
/// direction `angles`.
fn ray_point(t: f64, z: &SixVector, vel: &SixVector, angles: &SphereAngles) -> [f64; 5] {
    let k = lab_null_vector(vel, angles);
    (*z + k * ((t - z.time()) / k.time())).spatial()
}

fn stencil4(f: impl Fn(f64) -> [f64; 5], h: f64) -> [f64; 5] {
    let (m2, m1, p1, p2) = (f(-2.0 * h), f(-h), f(h), f(2.0 * h));
    std::array::from_fn(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
}

/// Step in the retarded time and the angles for the Jacobian stencils.
const JACOBIAN_STEP: f64 = 1e-3;

/// Numerical bound momentum on `y⁰ = t` carried by the rays leaving the
/// worldline in `[u_min, u_max]`. The 5-volume element is the determinant of
/// the finite-difference Jacobian of `(u, θ₁, θ₂, θ₃, φ) ↦ y⃗`, so the
/// measure is not assumed.
pub fn hyperplane_flux_oracle(
    w: &(impl Worldline + ?Sized),
    e: f64,
    t: f64,
    u_min: f64,
    u_max: f64,
    q: &SphereQuadrature,
    opts: &AdaptiveOptions,
) -> Result<SixVector> {
    if !(u_min < u_max) {
        return Err(Error::InvalidParameter(format!("empty retarded-time range [{u_min}, {u_max}]")));
    }
    let h = JACOBIAN_STEP;
    let slice = |u: f64| -> Result<Vec<f64>> {
        let state = kinematic_state(w, u)?;
        let big_r = t - state.z.time();
        if !(big_r > 0.0) {
            return Err(Error::InvalidParameter(format!("retarded time {u} does not precede t = {t}")));
        }
        let shifted: Vec<(SixVector, SixVector)> =
            [-2.0, -1.0, 1.0, 2.0].iter().map(|s| w.position_velocity(u + s * h)).collect::<Result<_>>()?;
        let mut acc = CompensatedSum::new(DIM);
        for node in &q.nodes {
            let ang = node.angles;
            let d_u = {
                let (m2, m1, p1, p2) = (
                    ray_point(t, &shifted[0].0, &shifted[0].1, &ang),
                    ray_point(t, &shifted[1].0, &shifted[1].1, &ang),
                    ray_point(t, &shifted[2].0, &shifted[2].1, &ang),
                    ray_point(t, &shifted[3].0, &shifted[3].1, &ang),
                );
                std::array::from_fn::<f64, 5, _>(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
            };
            let at = |a: SphereAngles| ray_point(t, &state.z, &state.u, &a);
            let cols = [
                d_u,
                stencil4(|s| at(SphereAngles::new(ang.theta1 + s, ang.theta2, ang.theta3, ang.phi)), h),
                stencil4(|s| at(SphereAngles::new(ang.theta1, ang.theta2 + s, ang.theta3, ang.phi)), h),
                stencil4(|s| at(SphereAngles::new(ang.theta1, ang.theta2, ang.theta3 + s, ang.phi)), h),
                stencil4(|s| at(SphereAngles::new(ang.theta1, ang.theta2, ang.theta3, ang.phi + s)), h),
            ];
            let jac = Matrix5::from_fn(|i, j| cols[j][i]);
            let volume = jac.determinant().abs();

            let k = lab_null_vector(&state.u, &ang);
            let frame = RetardedFrame::from_state(state, big_r / k.time(), k);
            let g = graded_products(&graded_field(&frame, e));
            let bound = g[1..].iter().fold(Rank2Tensor::ZERO, |acc, t| acc + *t);
            let row: [f64; DIM] = std::array::from_fn(|mu| bound.get(0, mu));
            acc.add_scaled(&row, node.coordinate_weight * volume);
        }
        Ok(acc.total())
    };
    let res = integrate_adaptive(&slice, u_min, u_max, opts)?;
    Ok(SixVector::new(res.value.try_into().expect("six components")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::closed::bound_momentum;
    use crate::tensor6::mclf_boost;
    use crate::worldline::{HelicalMotion, HyperbolicMotion, PoincareTransformed, UniformMotion};

    #[test]
    fn static_reduces_to_coulomb() {
        let w = UniformMotion::new([0.0; 5]).unwrap();
        let s = kinematic_state(&w, 0.5).unwrap();
        let h = hyperplane_bound_momentum(&s, 1.0, 2.5).unwrap();
        let expect = 1.5 * coupling(1.0) / 8.0;
        assert!((h.time() - expect).abs() < 1e-16);
        assert!(h.spatial().iter().all(|x| x.abs() < 1e-16));
    }

    #[test]
    fn cap_matches_tube_bound_in_comoving_frame() {
        // boost a helix so that it is at rest at τ = 0.7
        let inner = HelicalMotion::new(1.0, 0.6, 0.3).unwrap();
        let s = kinematic_state(&inner, 0.7).unwrap();
        let map = mclf_boost(&s.u).unwrap();
        let w = PoincareTransformed::new(inner, map, SixVector::ZERO).unwrap();
        let s = kinematic_state(&w, 0.7).unwrap();
        assert!((s.u - SixVector::rest()).max_abs() < 1e-12);
        for big_r in [0.3, 1.0, 4.0] {
            let t = s.z.time() + big_r;
            let cap = hyperplane_bound_momentum(&s, 1.3, t).unwrap();
            let tube = bound_momentum(&s, 1.3, big_r).unwrap();
            assert!((cap - tube).max_abs() < 1e-13 * tube.max_abs(), "R = {big_r}");
        }
    }

    #[test]
    fn static_oracle_matches_difference() {
        let w = UniformMotion::new([0.0; 5]).unwrap();
        let q = SphereQuadrature::gauss_legendre(10).unwrap();
        let opts = AdaptiveOptions { rel_tol: 1e-8, ..Default::default() };
        let (t, u0, u1) = (3.0, 0.0, 2.0);
        let num = hyperplane_flux_oracle(&w, 1.0, t, u0, u1, &q, &opts).unwrap();
        let h0 = hyperplane_bound_momentum(&kinematic_state(&w, u0).unwrap(), 1.0, t).unwrap();
        let h1 = hyperplane_bound_momentum(&kinematic_state(&w, u1).unwrap(), 1.0, t).unwrap();
        let closed = h1 - h0;
        assert!((num - closed).max_abs() < 1e-5 * closed.max_abs(), "{num:?} vs {closed:?}");
    }

    #[test]
    fn hyperbolic_oracle_matches_difference() {
        let w = HyperbolicMotion::new(1.0).unwrap();
        let q = SphereQuadrature::gauss_legendre(10).unwrap();
        let opts = AdaptiveOptions { rel_tol: 1e-8, ..Default::default() };
        let (t, u0, u1) = (1.5, -0.4, 0.2);
        let num = hyperplane_flux_oracle(&w, 1.0, t, u0, u1, &q, &opts).unwrap();
        let h0 = hyperplane_bound_momentum(&kinematic_state(&w, u0).unwrap(), 1.0, t).unwrap();
        let h1 = hyperplane_bound_momentum(&kinematic_state(&w, u1).unwrap(), 1.0, t).unwrap();
        let closed = h1 - h0;
        assert!((num - closed).max_abs() < 1e-5 * closed.max_abs(), "{num:?} vs {closed:?}");
    }

    #[test]
    fn uniform_lower_limit_vanishes() {
        let w = UniformMotion::new([0.4, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let near = hyperplane_bound_momentum(&kinematic_state(&w, -10.0).unwrap(), 1.0, 0.0).unwrap();
        let far = hyperplane_bound_momentum(&kinematic_state(&w, -1e4).unwrap(), 1.0, 0.0).unwrap();
        assert!(far.max_abs() < 1e-6 * near.max_abs());
    }
}
