//! Stress-energy of the retarded field and its split into a radiative part,
//! falling off as `r⁻⁴`, and bound parts falling off as `r⁻⁵ … r⁻⁸`.

use std::f64::consts::PI;

use crate::lw_field::{field_at, graded_field, v_coefficients, GradedField};
use crate::tensor6::{AntisymTensor2, Rank2Tensor, SixVector, DIM, METRIC};
use crate::worldline::RetardedFrame;

/// `3/(8π²)`, the inverse area of the unit 4-sphere.
pub fn stress_prefactor() -> f64 {
    3.0 / (8.0 * PI * PI)
}

/// Symmetrized bilinear stress form
/// `T(F,G)^{μν} = 3/(8π²)[½(F^{μλ}G^ν_λ + G^{μλ}F^ν_λ) - ¼ η^{μν} F·G]`.
pub fn stress_bilinear(f: &AntisymTensor2, g: &AntisymTensor2) -> Rank2Tensor {
    let (fm, gm) = (f.to_matrix(), g.to_matrix());
    let fg = f.contract_full(g);
    let c = stress_prefactor();
    Rank2Tensor::from_fn(|mu, nu| {
        let mut s = 0.0;
        for l in 0..DIM {
            s += METRIC[l] * (fm[mu][l] * gm[nu][l] + gm[mu][l] * fm[nu][l]);
        }
        let trace_part = if mu == nu { METRIC[mu] * fg } else { 0.0 };
        c * (0.5 * s - 0.25 * trace_part)
    })
}

/// `dσ_μ T(F,G)^{μν}` without forming the tensor.
pub fn stress_bilinear_flux(ds: &SixVector, f: &AntisymTensor2, g: &AntisymTensor2) -> SixVector {
    let x = f.contract_first(ds);
    let y = g.contract_first(ds);
    let fg = f.contract_full(g);
    // G^{νλ} X_λ = -X_λ G^{λν}
    (g.contract_first(&x) + f.contract_first(&y)) * (-0.5 * stress_prefactor())
        - *ds * (0.25 * stress_prefactor() * fg)
}

/// Stress-energy tensor `T(F,F)` of a field.
pub fn stress_energy_total(f: &AntisymTensor2) -> Rank2Tensor {
    stress_bilinear(f, f)
}

/// Radiative part and bound parts `T₍₋κ₎`, `κ = 5..8`, at one field point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressEnergySplit {
    pub total: Rank2Tensor,
    pub rad: Rank2Tensor,
    /// `bound[κ - 5]` holds `T₍₋κ₎`.
    pub bound: [Rank2Tensor; 4],
}

impl StressEnergySplit {
    pub fn bound_by_power(&self, kappa: usize) -> &Rank2Tensor {
        &self.bound[kappa - 5]
    }

    pub fn bound_total(&self) -> Rank2Tensor {
        self.bound.iter().fold(Rank2Tensor::ZERO, |acc, t| acc + *t)
    }

    /// `rad + Σ bound`.
    pub fn reconstructed(&self) -> Rank2Tensor {
        self.rad + self.bound_total()
    }

    /// Largest entry over all pieces, used to make residuals relative.
    pub fn scale(&self) -> f64 {
        self.bound
            .iter()
            .chain([&self.total, &self.rad])
            .fold(0.0, |m, t| m.max(t.max_abs()))
    }
}

/// Graded stress pieces from products of graded field pieces.
/// Index `κ - 4` holds the `r⁻κ` piece, so index 0 is `T(F₂,F₂)`.
pub fn graded_products(g: &GradedField) -> [Rank2Tensor; 5] {
    let t = stress_bilinear;
    [
        t(&g.minus2, &g.minus2),
        t(&g.minus3, &g.minus2) * 2.0,
        t(&g.minus3, &g.minus3) + t(&g.minus4, &g.minus2) * 2.0,
        t(&g.minus4, &g.minus3) * 2.0,
        t(&g.minus4, &g.minus4),
    ]
}

/// Closed-form radiative part `3/(8π²) (e²/4π²) k k (V₂·V₂) / r⁴`.
pub fn radiative_closed_form(frame: &RetardedFrame, e: f64) -> Rank2Tensor {
    let v2 = v_coefficients(frame)[2];
    let c = e * e / (4.0 * PI * PI);
    Rank2Tensor::outer(&frame.k, &frame.k) * (stress_prefactor() * c * v2.norm_sq() / frame.r.powi(4))
}

pub fn stress_energy_split(frame: &RetardedFrame, e: f64) -> StressEnergySplit {
    let graded = graded_products(&graded_field(frame, e));
    StressEnergySplit {
        total: stress_energy_total(&field_at(frame, e)),
        rad: radiative_closed_form(frame, e),
        bound: [graded[1], graded[2], graded[3], graded[4]],
    }
}

/// Largest entries of `k_α T_rad^{αβ}` and `k_α T₍₋₅₎^{αβ}`.
pub fn null_contraction_check(split: &StressEnergySplit, k: &SixVector) -> (f64, f64) {
    (
        split.rad.contract_first(k).max_abs(),
        split.bound_by_power(5).contract_first(k).max_abs(),
    )
}
