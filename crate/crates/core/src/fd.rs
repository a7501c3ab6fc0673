//! Finite-difference stencils.

use std::ops::{Add, Mul};

use crate::tensor6::{AntisymTensor2, SixVector};

/// Values that can be linearly combined by a stencil.
pub trait Linear: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Linear for SixVector {
    fn zero() -> Self {
        SixVector::ZERO
    }
}

impl Linear for AntisymTensor2 {
    fn zero() -> Self {
        AntisymTensor2::ZERO
    }
}

/// Fornberg's algorithm: weights for derivatives `0..=max_order` at `x0`
/// from samples at `xs`. Returns `w[m][j]` for derivative `m`, node `j`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Central stencil on the integer offsets `-half..=half`, unit spacing.
#[derive(Clone, Debug)]
pub struct CentralStencil {
    pub half: usize,
    /// `weights[m][j]` for derivative `m` at offset `j - half`.
    pub weights: Vec<Vec<f64>>,
}

impl CentralStencil {
    pub fn new(half: usize, max_order: usize) -> Self {
        let xs: Vec<f64> = (-(half as i64)..=half as i64).map(|i| i as f64).collect();
        let mut weights = fornberg_weights(0.0, &xs, max_order);
        // exact antisymmetry/symmetry so constants and even/odd parts cancel exactly
        for (m, w) in weights.iter_mut().enumerate() {
            let len = w.len();
            for j in 0..half {
                let (lo, hi) = (w[j], w[len - 1 - j]);
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let avg = 0.5 * (hi + sign * lo);
                w[len - 1 - j] = avg;
                w[j] = sign * avg;
            }
            if m % 2 == 1 {
                w[half] = 0.0;
            }
        }
        CentralStencil { half, weights }
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> {
        let h = self.half as i64;
        -h..=h
    }

    /// Derivative of order `m` from precomputed samples `f(x + j h)`.
    pub fn apply<T: Linear>(&self, samples: &[T], m: usize, h: f64) -> T {
        let w = &self.weights[m];
        let mut acc = T::zero();
        for (s, &wj) in samples.iter().zip(w) {
            if wj != 0.0 {
                acc = acc + *s * wj;
            }
        }
        acc * (1.0 / h.powi(m as i32))
    }

    /// Evaluates `f` on the stencil and returns derivative `m`.
    pub fn derivative<T: Linear>(&self, f: impl Fn(f64) -> T, x: f64, h: f64, m: usize) -> T {
        let samples: Vec<T> = self.offsets().map(|j| f(x + j as f64 * h)).collect();
        self.apply(&samples, m, h)
    }
}

/// Fourth-order first derivative, five points.
pub fn d1_order4<T: Linear>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    (f(x - 2.0 * h) + f(x - h) * -8.0 + f(x + h) * 8.0 + f(x + 2.0 * h) * -1.0) * (1.0 / (12.0 * h))
}

/// Sixth-order first derivative, seven points.
pub fn d1_order6<T: Linear>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    let c = [1.0 / 60.0, -3.0 / 20.0, 3.0 / 4.0];
    let mut acc = T::zero();
    for (i, &w) in c.iter().enumerate() {
        let d = (3 - i) as f64 * h;
        acc = acc + (f(x + d) + f(x - d) * -1.0) * w;
    }
    acc * (1.0 / h)
}

/// Second-order second derivative, three points.
pub fn d2_order2<T: Linear>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    (f(x + h) + f(x - h) + f(x) * -2.0) * (1.0 / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_weights() {
        let s = CentralStencil::new(2, 2);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (w, e) in s.weights[1].iter().zip(expect) {
            assert!((w - e).abs() < 1e-14);
        }
        let expect2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (w, e) in s.weights[2].iter().zip(expect2) {
            assert!((w - e).abs() < 1e-13);
        }
    }

    #[test]
    fn eleven_point_fifth_derivative_of_sine() {
        let s = CentralStencil::new(5, 5);
        let d5 = s.derivative(f64::sin, 0.3, 0.05, 5);
        assert!((d5 - 0.3f64.cos()).abs() < 1e-8, "{d5}");
        let d1 = s.derivative(f64::exp, 0.0, 0.1, 1);
        assert!((d1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_weights_are_exactly_antisymmetric() {
        let s = CentralStencil::new(5, 5);
        for m in [1, 3, 5] {
            let w = &s.weights[m];
            assert_eq!(w[5], 0.0);
            for j in 0..5 {
                assert_eq!(w[j], -w[10 - j]);
            }
        }
    }

    #[test]
    fn explicit_stencils() {
        let x = 0.7;
        assert!((d1_order4(f64::sin, x, 1e-2) - x.cos()).abs() < 1e-9);
        assert!((d1_order6(f64::sin, x, 1e-2) - x.cos()).abs() < 1e-12);
        assert!((d2_order2(f64::sin, x, 1e-3) + x.sin()).abs() < 1e-6);
    }
}
