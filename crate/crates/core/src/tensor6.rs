//! Minkowski algebra in six dimensions.
//!
//! Signature is mostly-plus, `η = diag(-1, 1, 1, 1, 1, 1)`, with index 0 the
//! time component and natural units `c = 1`. Every stored tensor is
//! contravariant; contractions apply the metric internally.

use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

pub const DIM: usize = 6;

/// Diagonal of the metric tensor.
pub const METRIC: [f64; DIM] = [-1.0, 1.0, 1.0, 1.0, 1.0, 1.0];

/// Number of independent components of an antisymmetric rank-2 tensor.
pub const ANTISYM_LEN: usize = 15;

/// A point or vector in six-dimensional Minkowski space.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SixVector(pub [f64; DIM]);

impl SixVector {
    pub const ZERO: SixVector = SixVector([0.0; DIM]);

    pub const fn new(components: [f64; DIM]) -> Self {
        SixVector(components)
    }

    /// Validating constructor for values entering from outside the crate.
    pub fn try_new(components: [f64; DIM]) -> Result<Self> {
        let v = SixVector(components);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("six-vector"))
        }
    }

    pub fn from_time_space(t: f64, space: [f64; 5]) -> Self {
        SixVector([t, space[0], space[1], space[2], space[3], space[4]])
    }

    /// Unit vector along axis `i`.
    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; DIM];
        c[i] = 1.0;
        SixVector(c)
    }

    /// Rest-frame six-velocity `(1, 0, 0, 0, 0, 0)`.
    pub fn rest() -> Self {
        Self::basis(0)
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> [f64; 5] {
        [self.0[1], self.0[2], self.0[3], self.0[4], self.0[5]]
    }

    pub fn dot(&self, other: &SixVector) -> f64 {
        minkowski_dot(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        minkowski_dot(self, self)
    }

    /// Euclidean length of all six components, used for error scales.
    pub fn euclid(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Euclidean length of the spatial part.
    pub fn spatial_norm(&self) -> f64 {
        self.0[1..].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Covariant components `v_μ = η_μν v^ν`.
    pub fn lower(&self) -> [f64; DIM] {
        let mut c = self.0;
        c[0] = -c[0];
        c
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Sum of absolute values of the components, used as a magnitude scale.
    pub fn l1(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }
}

impl Index<usize> for SixVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for SixVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for SixVector {
    type Output = SixVector;
    fn add(mut self, rhs: SixVector) -> SixVector {
        self += rhs;
        self
    }
}

impl AddAssign for SixVector {
    fn add_assign(&mut self, rhs: SixVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for SixVector {
    type Output = SixVector;
    fn sub(mut self, rhs: SixVector) -> SixVector {
        self -= rhs;
        self
    }
}

impl SubAssign for SixVector {
    fn sub_assign(&mut self, rhs: SixVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
    }
}

impl Neg for SixVector {
    type Output = SixVector;
    fn neg(self) -> SixVector {
        SixVector(self.0.map(|x| -x))
    }
}

impl Mul<f64> for SixVector {
    type Output = SixVector;
    fn mul(self, s: f64) -> SixVector {
        SixVector(self.0.map(|x| x * s))
    }
}

impl Mul<SixVector> for f64 {
    type Output = SixVector;
    fn mul(self, v: SixVector) -> SixVector {
        v * self
    }
}

impl Div<f64> for SixVector {
    type Output = SixVector;
    fn div(self, s: f64) -> SixVector {
        SixVector(self.0.map(|x| x / s))
    }
}

/// Scalar product `-a⁰b⁰ + Σᵢ aⁱbⁱ`.
pub fn minkowski_dot(a: &SixVector, b: &SixVector) -> f64 {
    -a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] + a.0[3] * b.0[3] + a.0[4] * b.0[4]
        + a.0[5] * b.0[5]
}

#[inline]
const fn pair_index(mu: usize, nu: usize) -> usize {
    // row-major position of (mu, nu), mu < nu, in the strict upper triangle
    mu * (2 * DIM - mu - 1) / 2 + (nu - mu - 1)
}

/// Rank-2 antisymmetric tensor stored as its 15 upper-triangle entries.
///
/// `T[μ][ν] = -T[ν][μ]` holds by construction, and the diagonal is zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AntisymTensor2(pub [f64; ANTISYM_LEN]);

impl AntisymTensor2 {
    pub const ZERO: AntisymTensor2 = AntisymTensor2([0.0; ANTISYM_LEN]);

    /// Builds the tensor from its upper-triangle entries `f(μ, ν)`, `μ < ν`.
    pub fn from_upper(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut c = [0.0; ANTISYM_LEN];
        for mu in 0..DIM {
            for nu in mu + 1..DIM {
                c[pair_index(mu, nu)] = f(mu, nu);
            }
        }
        AntisymTensor2(c)
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        use std::cmp::Ordering;
        match mu.cmp(&nu) {
            Ordering::Less => self.0[pair_index(mu, nu)],
            Ordering::Greater => -self.0[pair_index(nu, mu)],
            Ordering::Equal => 0.0,
        }
    }

    /// Iterates `(μ, ν, value)` over the independent entries.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..DIM).flat_map(move |mu| (mu + 1..DIM).map(move |nu| (mu, nu, self.0[pair_index(mu, nu)])))
    }

    pub fn to_matrix(&self) -> [[f64; DIM]; DIM] {
        let mut m = [[0.0; DIM]; DIM];
        for (mu, row) in m.iter_mut().enumerate() {
            for (nu, x) in row.iter_mut().enumerate() {
                *x = self.get(mu, nu);
            }
        }
        m
    }

    /// Contraction on the first index, `v_μ T^{μν}`.
    pub fn contract_first(&self, v: &SixVector) -> SixVector {
        let vl = v.lower();
        let mut out = [0.0; DIM];
        for (nu, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|mu| vl[mu] * self.get(mu, nu)).sum();
        }
        SixVector(out)
    }

    /// Full contraction `T_{αβ} S^{αβ}`.
    pub fn contract_full(&self, other: &AntisymTensor2) -> f64 {
        // each independent pair appears twice; the metric sign is -1 iff one index is 0
        self.upper_entries()
            .zip(other.0.iter())
            .map(|((mu, _, a), b)| if mu == 0 { -2.0 * a * b } else { 2.0 * a * b })
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Add for AntisymTensor2 {
    type Output = AntisymTensor2;
    fn add(mut self, rhs: AntisymTensor2) -> AntisymTensor2 {
        self += rhs;
        self
    }
}

impl AddAssign for AntisymTensor2 {
    fn add_assign(&mut self, rhs: AntisymTensor2) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for AntisymTensor2 {
    type Output = AntisymTensor2;
    fn sub(mut self, rhs: AntisymTensor2) -> AntisymTensor2 {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Neg for AntisymTensor2 {
    type Output = AntisymTensor2;
    fn neg(self) -> AntisymTensor2 {
        AntisymTensor2(self.0.map(|x| -x))
    }
}

impl Mul<f64> for AntisymTensor2 {
    type Output = AntisymTensor2;
    fn mul(self, s: f64) -> AntisymTensor2 {
        AntisymTensor2(self.0.map(|x| x * s))
    }
}

impl Div<f64> for AntisymTensor2 {
    type Output = AntisymTensor2;
    fn div(self, s: f64) -> AntisymTensor2 {
        AntisymTensor2(self.0.map(|x| x / s))
    }
}

impl Mul<AntisymTensor2> for f64 {
    type Output = AntisymTensor2;
    fn mul(self, t: AntisymTensor2) -> AntisymTensor2 {
        t * self
    }
}

/// Wedge product `(a∧b)^{μν} = a^μ b^ν - a^ν b^μ`.
pub fn wedge(a: &SixVector, b: &SixVector) -> AntisymTensor2 {
    AntisymTensor2::from_upper(|mu, nu| a.0[mu] * b.0[nu] - a.0[nu] * b.0[mu])
}

/// General rank-2 tensor, both indices contravariant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rank2Tensor(pub [[f64; DIM]; DIM]);

impl Rank2Tensor {
    pub const ZERO: Rank2Tensor = Rank2Tensor([[0.0; DIM]; DIM]);

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = [[0.0; DIM]; DIM];
        for (mu, row) in m.iter_mut().enumerate() {
            for (nu, x) in row.iter_mut().enumerate() {
                *x = f(mu, nu);
            }
        }
        Rank2Tensor(m)
    }

    /// `a^μ b^ν`.
    pub fn outer(a: &SixVector, b: &SixVector) -> Self {
        Self::from_fn(|mu, nu| a.0[mu] * b.0[nu])
    }

    /// Inverse metric `η^{μν}`.
    pub fn metric() -> Self {
        Self::from_fn(|mu, nu| if mu == nu { METRIC[mu] } else { 0.0 })
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[mu][nu]
    }

    /// Contraction on the first index, `v_μ T^{μν}`.
    pub fn contract_first(&self, v: &SixVector) -> SixVector {
        let vl = v.lower();
        let mut out = [0.0; DIM];
        for (nu, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|mu| vl[mu] * self.0[mu][nu]).sum();
        }
        SixVector(out)
    }

    /// Contraction on the second index, `T^{μν} v_ν`.
    pub fn contract_second(&self, v: &SixVector) -> SixVector {
        let vl = v.lower();
        SixVector(self.0.map(|row| row.iter().zip(vl).map(|(t, x)| t * x).sum()))
    }

    /// `η_{μν} T^{μν}`.
    pub fn trace(&self) -> f64 {
        (0..DIM).map(|mu| METRIC[mu] * self.0[mu][mu]).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|mu, nu| self.0[nu][mu])
    }

    /// Largest `|T^{μν} - T^{νμ}|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for mu in 0..DIM {
            for nu in mu + 1..DIM {
                m = m.max((self.0[mu][nu] - self.0[nu][mu]).abs());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl Add for Rank2Tensor {
    type Output = Rank2Tensor;
    fn add(mut self, rhs: Rank2Tensor) -> Rank2Tensor {
        self += rhs;
        self
    }
}

impl AddAssign for Rank2Tensor {
    fn add_assign(&mut self, rhs: Rank2Tensor) {
        for (ra, rb) in self.0.iter_mut().zip(rhs.0) {
            for (a, b) in ra.iter_mut().zip(rb) {
                *a += b;
            }
        }
    }
}

impl Sub for Rank2Tensor {
    type Output = Rank2Tensor;
    fn sub(self, rhs: Rank2Tensor) -> Rank2Tensor {
        Rank2Tensor::from_fn(|mu, nu| self.0[mu][nu] - rhs.0[mu][nu])
    }
}

impl Mul<f64> for Rank2Tensor {
    type Output = Rank2Tensor;
    fn mul(self, s: f64) -> Rank2Tensor {
        Rank2Tensor(self.0.map(|row| row.map(|x| x * s)))
    }
}

/// Which way a [`LorentzMap`] carries components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoostDirection {
    /// Laboratory components to momentarily-comoving-frame components.
    ToRest,
    /// Momentarily-comoving-frame components back to the laboratory.
    ToLab,
}

/// A Lorentz transformation acting as `v'^μ = Λ^μ_ν v^ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMap {
    pub matrix: [[f64; DIM]; DIM],
    pub direction: BoostDirection,
}

impl LorentzMap {
    pub fn identity(direction: BoostDirection) -> Self {
        let mut m = [[0.0; DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        LorentzMap { matrix: m, direction }
    }

    /// Inverse map, `Λ⁻¹ = η Λᵀ η`.
    pub fn inverse(&self) -> Self {
        let mut m = [[0.0; DIM]; DIM];
        for (mu, row) in m.iter_mut().enumerate() {
            for (nu, x) in row.iter_mut().enumerate() {
                *x = METRIC[mu] * self.matrix[nu][mu] * METRIC[nu];
            }
        }
        let direction = match self.direction {
            BoostDirection::ToRest => BoostDirection::ToLab,
            BoostDirection::ToLab => BoostDirection::ToRest,
        };
        LorentzMap { matrix: m, direction }
    }

    pub fn apply(&self, v: &SixVector) -> SixVector {
        SixVector(self.matrix.map(|row| row.iter().zip(v.0).map(|(l, x)| l * x).sum()))
    }

    pub fn apply_antisym(&self, t: &AntisymTensor2) -> AntisymTensor2 {
        let m = t.to_matrix();
        let tmp = self.left_right(&m);
        AntisymTensor2::from_upper(|mu, nu| tmp[mu][nu])
    }

    pub fn apply_rank2(&self, t: &Rank2Tensor) -> Rank2Tensor {
        Rank2Tensor(self.left_right(&t.0))
    }

    fn left_right(&self, m: &[[f64; DIM]; DIM]) -> [[f64; DIM]; DIM] {
        let l = &self.matrix;
        let mut half = [[0.0; DIM]; DIM];
        for a in 0..DIM {
            for b in 0..DIM {
                half[a][b] = (0..DIM).map(|c| l[a][c] * m[c][b]).sum();
            }
        }
        let mut out = [[0.0; DIM]; DIM];
        for a in 0..DIM {
            for b in 0..DIM {
                out[a][b] = (0..DIM).map(|c| half[a][c] * l[b][c]).sum();
            }
        }
        out
    }

    /// Largest entry of `|Λᵀ η Λ - η|`.
    pub fn metric_defect(&self) -> f64 {
        let l = &self.matrix;
        let mut worst: f64 = 0.0;
        for mu in 0..DIM {
            for nu in 0..DIM {
                let g: f64 = (0..DIM).map(|a| l[a][mu] * METRIC[a] * l[a][nu]).sum();
                let target = if mu == nu { METRIC[mu] } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// Tolerance on `u·u + 1` accepted by [`mclf_boost`].
pub const UNIT_VELOCITY_TOL: f64 = 1e-9;

/// Pure boost taking laboratory components into the momentarily comoving
/// frame of a particle with six-velocity `u`.
pub fn mclf_boost(u: &SixVector) -> Result<LorentzMap> {
    if !u.is_finite() {
        return Err(Error::NonFinite("six-velocity"));
    }
    let norm = u.norm_sq();
    if (norm + 1.0).abs() > UNIT_VELOCITY_TOL * (1.0 + u.0[0] * u.0[0]) {
        return Err(Error::NotUnitTimelike { norm });
    }
    if u.0[0] <= 0.0 {
        return Err(Error::PastDirected { u0: u.0[0] });
    }
    Ok(to_lab_boost(u).inverse())
}

/// Pure boost sending `(1, 0, …, 0)` to `u`. No validation.
pub(crate) fn to_lab_boost(u: &SixVector) -> LorentzMap {
    let gamma = u.0[0];
    let s = u.spatial();
    let mut m = [[0.0; DIM]; DIM];
    m[0][0] = gamma;
    for i in 0..5 {
        m[0][i + 1] = s[i];
        m[i + 1][0] = s[i];
        for j in 0..5 {
            m[i + 1][j + 1] = s[i] * s[j] / (1.0 + gamma) + if i == j { 1.0 } else { 0.0 };
        }
    }
    LorentzMap {
        matrix: m,
        direction: BoostDirection::ToLab,
    }
}

/// Standard one-index-per-slot transformation of a vector.
pub fn apply_lorentz(map: &LorentzMap, v: &SixVector) -> SixVector {
    map.apply(v)
}

/// Standard one-index-per-slot transformation of an antisymmetric tensor.
pub fn apply_lorentz2(map: &LorentzMap, t: &AntisymTensor2) -> AntisymTensor2 {
    map.apply_antisym(t)
}
