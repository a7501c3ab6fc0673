//! Product quadrature on the unit 4-sphere with measure
//! `dΩ₄ = sin θ₁ sin²θ₂ sin³θ₃ dθ₁ dθ₂ dθ₃ dφ`, and its angular moments.

use std::f64::consts::PI;

use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::tensor6::{to_lab_boost, Rank2Tensor, SixVector, DIM, METRIC};
use crate::worldline::SphereAngles;

/// Area of the unit 4-sphere, `8π²/3`.
pub fn sphere_area() -> f64 {
    8.0 * PI * PI / 3.0
}

/// How the polar axes are discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngularRule {
    /// Gauss-Legendre in each `θ` with the `sinᵖθ` weights folded into the
    /// integrand. Converges spectrally but is not exact for polynomials in `n`.
    GaussLegendre,
    /// Gauss rules in `x = cos θ` matched to each weight: Legendre for `sin θ`,
    /// Chebyshev of the second kind for `sin²θ`, Legendre on `(1 - x²) f` for
    /// `sin³θ`. Exact for polynomials in `n` of degree at most
    /// `min(2 n_theta - 3, n_phi - 1)`.
    PolynomialExact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereNode {
    pub angles: SphereAngles,
    /// Unit direction `n'` in the rest frame.
    pub direction: [f64; 5],
    /// Weight for the measure `dΩ₄`.
    pub weight: f64,
    /// Weight for plain `dθ₁ dθ₂ dθ₃ dφ`, i.e. `weight / (sin θ₁ sin²θ₂ sin³θ₃)`.
    pub coordinate_weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereQuadrature {
    pub rule: AngularRule,
    pub n_theta: usize,
    pub n_phi: usize,
    pub nodes: Vec<SphereNode>,
}

/// Nodes in `θ` with weights for `∫₀^π sinᵖθ f dθ`, plus `sinᵖθ` at each node.
fn polar_axis(rule: AngularRule, power: i32, n: usize) -> Vec<(f64, f64, f64)> {
    match (rule, power) {
        (AngularRule::GaussLegendre, _) => {
            let (x, w) = gauss_legendre(n);
            x.iter()
                .zip(&w)
                .map(|(x, w)| {
                    let th = 0.5 * PI * (x + 1.0);
                    let sp = th.sin().powi(power);
                    (th, 0.5 * PI * w * sp, sp)
                })
                .collect()
        }
        (AngularRule::PolynomialExact, 1) => {
            let (x, w) = gauss_legendre(n);
            x.iter().zip(&w).map(|(x, w)| (x.acos(), *w, (1.0 - x * x).sqrt())).collect()
        }
        (AngularRule::PolynomialExact, 2) => (1..=n)
            .map(|j| {
                let th = j as f64 * PI / (n as f64 + 1.0);
                let s2 = th.sin().powi(2);
                (th, PI / (n as f64 + 1.0) * s2, s2)
            })
            .collect(),
        (AngularRule::PolynomialExact, _) => {
            let (x, w) = gauss_legendre(n);
            x.iter()
                .zip(&w)
                .map(|(x, w)| {
                    let s2 = 1.0 - x * x;
                    (x.acos(), w * s2, s2 * s2.sqrt())
                })
                .collect()
        }
    }
}

impl SphereQuadrature {
    pub fn new(rule: AngularRule, n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidParameter(format!(
                "sphere quadrature needs at least 2 nodes per axis (got {n_theta} × {n_phi})"
            )));
        }
        let ax1 = polar_axis(rule, 1, n_theta);
        let ax2 = polar_axis(rule, 2, n_theta);
        let ax3 = polar_axis(rule, 3, n_theta);
        let wphi = 2.0 * PI / n_phi as f64;
        // offset φ by half a step so no node sits on the φ = 0 seam
        let phis: Vec<f64> = (0..n_phi).map(|i| (i as f64 + 0.5) * wphi).collect();
        let mut nodes = Vec::with_capacity(n_theta.pow(3) * n_phi);
        for &(t1, w1, s1) in &ax1 {
            for &(t2, w2, s2) in &ax2 {
                for &(t3, w3, s3) in &ax3 {
                    for &phi in &phis {
                        let angles = SphereAngles::new(t1, t2, t3, phi);
                        let weight = w1 * w2 * w3 * wphi;
                        nodes.push(SphereNode {
                            angles,
                            direction: angles.direction(),
                            weight,
                            coordinate_weight: weight / (s1 * s2 * s3),
                        });
                    }
                }
            }
        }
        Ok(SphereQuadrature { rule, n_theta, n_phi, nodes })
    }

    /// Gauss-Legendre in `θ`, `2n` trapezoid points in `φ`.
    pub fn gauss_legendre(n_theta: usize) -> Result<Self> {
        Self::new(AngularRule::GaussLegendre, n_theta, 2 * n_theta)
    }

    /// The rule used for tube fluxes: 5 nodes per polar axis and 8 in `φ`,
    /// exact through degree 7 in `n`. The tube flux densities have degree at
    /// most 5.
    pub fn flux_default() -> Self {
        Self::new(AngularRule::PolynomialExact, 5, 8).expect("valid node counts")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }
}

/// Symmetric tensor of rank up to 4 stored densely in laboratory components.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMoments {
    pub zeroth: f64,
    pub first: SixVector,
    pub second: Rank2Tensor,
    /// `third[(μ·6 + ν)·6 + ρ]`.
    pub third: Vec<f64>,
    /// `fourth[((μ·6 + ν)·6 + ρ)·6 + σ]`.
    pub fourth: Vec<f64>,
}

/// Differences between numeric and closed-form moments, each relative to
/// the size of the corresponding closed form (odd orders relative to the
/// geometric mean of their even neighbours).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentErrors {
    pub zeroth: f64,
    pub first: f64,
    pub second: f64,
    pub third: f64,
    pub fourth: f64,
}

impl MomentErrors {
    pub fn max(&self) -> f64 {
        [self.zeroth, self.first, self.second, self.third, self.fourth]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Tolerance used by [`sphere_moments`] to reject a rule.
pub const MOMENT_TOL: f64 = 1e-10;

fn projector(u: &SixVector) -> [[f64; DIM]; DIM] {
    let mut p = [[0.0; DIM]; DIM];
    for mu in 0..DIM {
        for nu in 0..DIM {
            p[mu][nu] = if mu == nu { METRIC[mu] } else { 0.0 } + u[mu] * u[nu];
        }
    }
    p
}

impl SphereMoments {
    /// Closed forms: `8π²/3`, 0, `(8π²/15) P`, 0 and
    /// `(8π²/105)(P P + P P + P P)` with `P = η + u u`.
    pub fn closed_form(u: &SixVector) -> SphereMoments {
        let p = projector(u);
        let c2 = 8.0 * PI * PI / 15.0;
        let c4 = 8.0 * PI * PI / 105.0;
        let mut fourth = vec![0.0; DIM.pow(4)];
        for (i, slot) in fourth.iter_mut().enumerate() {
            let (m, n, r, s) = (i / 216, (i / 36) % 6, (i / 6) % 6, i % 6);
            *slot = c4 * (p[m][n] * p[r][s] + p[m][r] * p[n][s] + p[m][s] * p[n][r]);
        }
        SphereMoments {
            zeroth: sphere_area(),
            first: SixVector::ZERO,
            second: Rank2Tensor::from_fn(|m, n| c2 * p[m][n]),
            third: vec![0.0; DIM.pow(3)],
            fourth,
        }
    }

    pub fn errors_against(&self, closed: &SphereMoments) -> MomentErrors {
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
        let size = |a: &[f64]| a.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        let flat2 = |t: &Rank2Tensor| t.0.iter().flatten().copied().collect::<Vec<_>>();
        let (s0, s2, s4) = (closed.zeroth.abs(), size(&flat2(&closed.second)), size(&closed.fourth));
        MomentErrors {
            zeroth: (self.zeroth - closed.zeroth).abs() / s0,
            first: diff(&self.first.0, &closed.first.0) / (s0 * s2).sqrt(),
            second: diff(&flat2(&self.second), &flat2(&closed.second)) / s2,
            third: diff(&self.third, &closed.third) / (s2 * s4).sqrt(),
            fourth: diff(&self.fourth, &closed.fourth) / s4,
        }
    }
}

/// Applies the same matrix to every slot of a dense rank-`k` tensor.
fn transform_all_slots(t: &[f64], rank: u32, l: &[[f64; DIM]; DIM]) -> Vec<f64> {
    let mut cur = t.to_vec();
    for slot in 0..rank {
        let stride = DIM.pow(rank - 1 - slot);
        let mut next = vec![0.0; cur.len()];
        for (i, out) in next.iter_mut().enumerate() {
            let idx = (i / stride) % DIM;
            let base = i - idx * stride;
            *out = (0..DIM).map(|j| l[idx][j] * cur[base + j * stride]).sum();
        }
        cur = next;
    }
    cur
}

/// Angular moments of `n` up to order 4 about the velocity `u`, computed in
/// the rest frame and carried to the laboratory. Fails with
/// [`Error::InsufficientNodes`] if any order misses its closed form by more
/// than [`MOMENT_TOL`].
pub fn sphere_moments(q: &SphereQuadrature, u: &SixVector) -> Result<SphereMoments> {
    let (m, _) = sphere_moments_unchecked(q, u)?;
    let errors = m.errors_against(&SphereMoments::closed_form(u));
    if errors.max() > MOMENT_TOL {
        return Err(Error::InsufficientNodes { achieved: errors.max(), tolerance: MOMENT_TOL });
    }
    Ok(m)
}

/// As [`sphere_moments`] but always returns the moments with their errors.
pub fn sphere_moments_unchecked(q: &SphereQuadrature, u: &SixVector) -> Result<(SphereMoments, MomentErrors)> {
    crate::tensor6::mclf_boost(u)?;
    let l = to_lab_boost(u).matrix;
    // rest-frame moments over the five spatial axes, packed densely
    let mut m0 = 0.0;
    let mut m1 = [0.0; 5];
    let mut m2 = [0.0; 25];
    let mut m3 = [0.0; 125];
    let mut m4 = [0.0; 625];
    for node in &q.nodes {
        let (n, w) = (node.direction, node.weight);
        m0 += w;
        for a in 0..5 {
            let wa = w * n[a];
            m1[a] += wa;
            for b in a..5 {
                let wab = wa * n[b];
                m2[a * 5 + b] += wab;
                for c in b..5 {
                    let wabc = wab * n[c];
                    m3[(a * 5 + b) * 5 + c] += wabc;
                    for d in c..5 {
                        m4[((a * 5 + b) * 5 + c) * 5 + d] += wabc * n[d];
                    }
                }
            }
        }
    }
    // fill symmetric entries from the sorted representatives, then embed in six dimensions
    let sorted = |idx: &mut [usize]| idx.sort_unstable();
    let mut third = vec![0.0; DIM.pow(3)];
    for i in 0..DIM.pow(3) {
        let mut ix = [i / 36, (i / 6) % 6, i % 6];
        if ix.contains(&0) {
            continue;
        }
        ix.iter_mut().for_each(|x| *x -= 1);
        sorted(&mut ix);
        third[i] = m3[(ix[0] * 5 + ix[1]) * 5 + ix[2]];
    }
    let mut fourth = vec![0.0; DIM.pow(4)];
    for i in 0..DIM.pow(4) {
        let mut ix = [i / 216, (i / 36) % 6, (i / 6) % 6, i % 6];
        if ix.contains(&0) {
            continue;
        }
        ix.iter_mut().for_each(|x| *x -= 1);
        sorted(&mut ix);
        fourth[i] = m4[((ix[0] * 5 + ix[1]) * 5 + ix[2]) * 5 + ix[3]];
    }
    let mut second = vec![0.0; DIM.pow(2)];
    for a in 0..5 {
        for b in 0..5 {
            second[(a + 1) * DIM + b + 1] = m2[a.min(b) * 5 + a.max(b)];
        }
    }
    let mut first = vec![0.0; DIM];
    first[1..].copy_from_slice(&m1);

    let first = transform_all_slots(&first, 1, &l);
    let second = transform_all_slots(&second, 2, &l);
    let moments = SphereMoments {
        zeroth: m0,
        first: SixVector::new(first.try_into().expect("six components")),
        second: Rank2Tensor::from_fn(|m, n| second[m * DIM + n]),
        third: transform_all_slots(&third, 3, &l),
        fourth: transform_all_slots(&fourth, 4, &l),
    };
    let errors = moments.errors_against(&SphereMoments::closed_form(u));
    Ok((moments, errors))
}
