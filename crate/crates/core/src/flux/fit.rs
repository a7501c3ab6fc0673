//! Power-law structure of the bound fluxes: log-log slopes, least-squares
//! fits in inverse powers of `r`, and the radius sweep built on them.

use nalgebra::{DMatrix, DVector};

use super::closed::{bound_angular_terms, bound_momentum_terms, coupling, relative_residual};
use super::quadrature::AdaptiveOptions;
use super::sphere::SphereQuadrature;
use super::tube::{tube_flux_numeric, TubeFlux};
use crate::error::{Error, Result};
use crate::tensor6::{wedge, AntisymTensor2, SixVector};
use crate::worldline::{kinematic_state, Worldline};

/// Largest condition number accepted for a power fit.
pub const MAX_CONDITION: f64 = 1e10;

/// Least-squares slope of `ln |y|` against `ln r`.
pub fn loglog_slope(radii: &[f64], values: &[f64]) -> Result<f64> {
    if radii.len() != values.len() || radii.len() < 2 {
        return Err(Error::InvalidParameter("slope needs at least two matched samples".into()));
    }
    if values.iter().any(|v| *v == 0.0) || radii.iter().any(|r| *r <= 0.0) {
        return Err(Error::InvalidParameter("slope needs positive radii and nonzero values".into()));
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::IllConditionedFit { condition: f64::INFINITY });
    }
    Ok(sxy / sxx)
}

/// Coefficients `c_j` minimizing `Σ_i (y_i - Σ_j c_j r_i^{p_j})²` for every
/// column of `ys` (one row per radius), with the condition number of the
/// column-normalized design matrix.
pub fn fit_inverse_powers(radii: &[f64], ys: &[Vec<f64>], powers: &[i32]) -> Result<(Vec<Vec<f64>>, f64)> {
    let mut distinct = radii.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < powers.len().max(3) {
        return Err(Error::InvalidParameter(format!(
            "power fit needs at least {} distinct radii, got {}",
            powers.len().max(3),
            distinct.len()
        )));
    }
    if ys.len() != radii.len() {
        return Err(Error::InvalidParameter("one sample row per radius required".into()));
    }
    let design = DMatrix::from_fn(radii.len(), powers.len(), |i, j| radii[i].powi(powers[j]));
    let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    let scaled = DMatrix::from_fn(radii.len(), powers.len(), |i, j| design[(i, j)] / norms[j]);
    let svd = scaled.svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditionedFit { condition });
    }
    let width = ys.first().map_or(0, Vec::len);
    let mut coeffs = vec![vec![0.0; width]; powers.len()];
    for col in 0..width {
        let rhs = DVector::from_fn(radii.len(), |i, _| ys[i][col]);
        let sol = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for j in 0..powers.len() {
            coeffs[j][col] = sol[j] / norms[j];
        }
    }
    Ok((coeffs, condition))
}

/// Fitted exponent of one power bin, `None` when the bin vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinExponent {
    pub power: i32,
    pub fitted: Option<f64>,
}

/// Tube fluxes at several radii over one proper-time segment, and the
/// power-law structure extracted from them.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusSweep {
    pub e: f64,
    pub radii: Vec<f64>,
    pub fluxes: Vec<TubeFlux>,
    /// Log-log slopes of the bound momentum bins `r⁻³, r⁻², r⁻¹`.
    pub momentum_exponents: Vec<BinExponent>,
    /// Fitted coefficients of `r⁻³, r⁻², r⁻¹` in the total bound momentum.
    pub momentum_coefficients: [SixVector; 3],
    /// Endpoint differences of the closed-form coefficients.
    pub momentum_expected: [SixVector; 3],
    /// Fitted coefficients of `r⁻³, r⁻², r⁻¹` in the total bound angular momentum.
    pub angular_coefficients: [AntisymTensor2; 3],
    /// `r⁻¹` angular coefficient with the orbital part `Δ(z∧2c a² u)` removed.
    pub spin_coefficient: AntisymTensor2,
    /// `12/5 c Δ(u∧a)`.
    pub spin_expected: AntisymTensor2,
    pub condition: f64,
}

impl RadiusSweep {
    /// Relative residual of the fitted spin coefficient.
    pub fn spin_residual(&self) -> f64 {
        let floor = (1e-6 * coupling(self.e)).max(f64::MIN_POSITIVE);
        relative_residual(&self.spin_coefficient.0, &self.spin_expected.0, floor)
    }

    /// Largest relative residual of the fitted momentum coefficients.
    pub fn momentum_residual(&self) -> f64 {
        let floor = (1e-6 * coupling(self.e)).max(f64::MIN_POSITIVE);
        let scale = self.momentum_expected.iter().fold(floor, |m: f64, v| m.max(v.max_abs()));
        self.momentum_coefficients
            .iter()
            .zip(&self.momentum_expected)
            .fold(0.0, |m: f64, (a, b)| m.max((*a - *b).max_abs()))
            / scale
    }

    /// Largest deviation of a fitted exponent from its power.
    pub fn exponent_deviation(&self) -> f64 {
        self.momentum_exponents
            .iter()
            .filter_map(|b| b.fitted.map(|f| (f - b.power as f64).abs()))
            .fold(0.0, f64::max)
    }
}

/// Bins below this fraction of the largest bin are reported as vanishing.
const VANISHING_BIN: f64 = 1e-9;

/// Runs the tube integral at every radius (concurrently) and fits the bound
/// fluxes in inverse powers of `r`.
pub fn sweep_radius(
    w: &(impl Worldline + ?Sized),
    e: f64,
    radii: &[f64],
    tau0: f64,
    tau1: f64,
    q: &SphereQuadrature,
    opts: &AdaptiveOptions,
) -> Result<RadiusSweep> {
    if radii.len() < 3 {
        return Err(Error::InvalidParameter(format!("sweep needs at least 3 radii, got {}", radii.len())));
    }
    let fluxes: Vec<TubeFlux> = std::thread::scope(|scope| {
        let handles: Vec<_> = radii
            .iter()
            .map(|&r| scope.spawn(move || tube_flux_numeric(w, e, r, tau0, tau1, q, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect::<Result<Vec<_>>>()
    })?;

    let powers = [-3, -2, -1];
    let scale = fluxes.iter().fold(0.0, |m: f64, f| m.max(f.bound_momentum().max_abs()));
    let mut momentum_exponents = Vec::new();
    for p in powers {
        let mags: Vec<f64> = fluxes.iter().map(|f| f.bound_momentum_at_power(p).euclid()).collect();
        let fitted = if mags.iter().all(|m| *m > VANISHING_BIN * scale) {
            Some(loglog_slope(radii, &mags)?)
        } else {
            None
        };
        momentum_exponents.push(BinExponent { power: p, fitted });
    }

    let mom_rows: Vec<Vec<f64>> = fluxes.iter().map(|f| f.bound_momentum().0.to_vec()).collect();
    let ang_rows: Vec<Vec<f64>> = fluxes.iter().map(|f| f.bound_angular().0.to_vec()).collect();
    let (mc, condition) = fit_inverse_powers(radii, &mom_rows, &powers)?;
    let (ac, _) = fit_inverse_powers(radii, &ang_rows, &powers)?;
    let momentum_coefficients: [SixVector; 3] =
        std::array::from_fn(|j| SixVector::new(mc[j].clone().try_into().expect("six")));
    let angular_coefficients: [AntisymTensor2; 3] =
        std::array::from_fn(|j| AntisymTensor2(ac[j].clone().try_into().expect("fifteen")));

    let s0 = kinematic_state(w, tau0)?;
    let s1 = kinematic_state(w, tau1)?;
    let (m0, m1) = (bound_momentum_terms(&s0, e), bound_momentum_terms(&s1, e));
    let momentum_expected = std::array::from_fn(|j| m1[j] - m0[j]);
    let (a0, a1) = (bound_angular_terms(&s0, e), bound_angular_terms(&s1, e));
    let orbital_shift = a1.orbital[2] - a0.orbital[2];
    let spin_expected = (wedge(&s1.u, &s1.a) - wedge(&s0.u, &s0.a)) * (2.4 * coupling(e));

    Ok(RadiusSweep {
        e,
        radii: radii.to_vec(),
        fluxes,
        momentum_exponents,
        momentum_coefficients,
        momentum_expected,
        angular_coefficients,
        spin_coefficient: angular_coefficients[2] - orbital_shift,
        spin_expected,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power() {
        let r = [0.5, 1.0, 2.0, 4.0];
        let y: Vec<f64> = r.iter().map(|r: &f64| 3.0 * r.powi(-2)).collect();
        assert!((loglog_slope(&r, &y).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn recovers_inverse_power_coefficients() {
        let r = [0.5, 1.0, 2.0, 4.0, 8.0];
        let ys: Vec<Vec<f64>> = r.iter().map(|r: &f64| vec![1.5 / r.powi(3) - 0.25 / (r * r) + 2.0 / r]).collect();
        let (c, cond) = fit_inverse_powers(&r, &ys, &[-3, -2, -1]).unwrap();
        assert!(cond < 1e3);
        for (got, want) in c.iter().zip([1.5, -0.25, 2.0]) {
            assert!((got[0] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn clustered_radii_are_rejected() {
        let r = [1.0, 1.0 + 1e-9, 1.0 + 2e-9, 1.0 + 3e-9];
        let ys = vec![vec![1.0]; 4];
        assert!(matches!(
            fit_inverse_powers(&r, &ys, &[-3, -2, -1]),
            Err(Error::IllConditionedFit { .. })
        ));
        assert!(matches!(
            fit_inverse_powers(&[1.0, 2.0, 2.0], &ys[..3], &[-3, -2, -1]),
            Err(Error::InvalidParameter(_))
        ));
    }
}

#[cfg(test)]
mod sweep_tests {
    use super::*;
    use crate::worldline::HelicalMotion;

    #[test]
    fn helical_sweep() {
        let w = HelicalMotion::new(1.0, 0.5, 0.2).unwrap();
        let q = SphereQuadrature::flux_default();
        let s = sweep_radius(&w, 1.0, &[0.5, 1.0, 2.0, 4.0], 0.0, 1.5, &q, &AdaptiveOptions::default()).unwrap();
        assert!(s.exponent_deviation() < 0.02);
        assert!(s.spin_residual() < 1e-4);
    }
}
