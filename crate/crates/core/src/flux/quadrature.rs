//! One-dimensional Gauss rules, adaptive panel integration and compensated
//! summation.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and P_{n-1}(z)
            let (mut p, mut prev) = (1.0, 0.0);
            for j in 1..=n {
                let older = prev;
                prev = p;
                p = ((2 * j - 1) as f64 * z * prev - (j - 1) as f64 * older) / j as f64;
            }
            dp = n as f64 * (z * p - prev) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Neumaier-compensated accumulator over a fixed number of components.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl CompensatedSum {
    pub fn new(len: usize) -> Self {
        CompensatedSum { sum: vec![0.0; len], comp: vec![0.0; len] }
    }

    pub fn add_scaled(&mut self, values: &[f64], scale: f64) {
        for ((s, c), v) in self.sum.iter_mut().zip(self.comp.iter_mut()).zip(values) {
            let x = v * scale;
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }

    pub fn add(&mut self, values: &[f64]) {
        self.add_scaled(values, 1.0);
    }

    pub fn total(&self) -> Vec<f64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }
}

/// Tolerances and limits for [`integrate_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
    /// Panels the interval is split into before refinement starts.
    pub initial_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions { rel_tol: 1e-10, abs_tol: 1e-300, max_depth: 30, initial_panels: 1 }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveResult {
    pub value: Vec<f64>,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const PANEL_POINTS: usize = 10;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Adaptive Gauss-Legendre panels for a vector integrand. A panel is
/// accepted when its 10-point value agrees with the sum over its two halves
/// within `max(abs_tol, rel_tol · |whole integral|)` scaled by the panel's
/// share of the interval, or when the difference is at the rounding level of
/// `∫|f|` over the panel.
pub fn integrate_adaptive(
    f: &dyn Fn(f64) -> Result<Vec<f64>>,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Result<AdaptiveResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("integration limits"));
    }
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
    }
    let (xs, ws) = gauss_legendre(PANEL_POINTS);
    let mut evaluations = 0usize;
    // value and the largest component of ∫|f|, which sets the rounding floor
    let mut panel = |lo: f64, hi: f64| -> Result<(Vec<f64>, f64)> {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut acc: Option<CompensatedSum> = None;
        let mut mass: Vec<f64> = Vec::new();
        for (x, w) in xs.iter().zip(&ws) {
            let v = f(c + h * x)?;
            evaluations += 1;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("integrand"));
            }
            acc.get_or_insert_with(|| CompensatedSum::new(v.len())).add_scaled(&v, w * h);
            mass.resize(v.len(), 0.0);
            for (m, x) in mass.iter_mut().zip(&v) {
                *m += (x * w * h).abs();
            }
        }
        Ok((acc.map(|s| s.total()).unwrap_or_default(), max_abs(&mass)))
    };

    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut stack: Vec<(f64, f64, Vec<f64>, usize)> = Vec::new();
    for i in 0..n0 {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == n0 { b } else { lo + width };
        let (whole, _) = panel(lo, hi)?;
        stack.push((lo, hi, whole, 0));
    }
    // global scale from the coarse estimate
    let mut coarse = CompensatedSum::new(stack[0].2.len());
    for (_, _, v, _) in &stack {
        coarse.add(v);
    }
    let mut scale = max_abs(&coarse.total());

    let mut total: Option<CompensatedSum> = None;
    let mut err = 0.0;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, mass_l) = panel(lo, mid)?;
        let (right, mass_r) = panel(mid, hi)?;
        let halves: Vec<f64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        let diff = whole.iter().zip(&halves).fold(0.0, |m: f64, (w, h)| m.max((w - h).abs()));
        scale = scale.max(max_abs(&halves));
        let allowed = (opts.abs_tol.max(opts.rel_tol * scale) * ((hi - lo) / (b - a)).max(1e-3))
            .max(64.0 * f64::EPSILON * (mass_l + mass_r));
        if diff <= allowed || hi - lo <= 1e-12 * (b - a) {
            if diff > allowed {
                return Err(Error::QuadratureNonConvergence(format!(
                    "panel [{lo}, {hi}] too narrow with error {diff:e}"
                )));
            }
            total.get_or_insert_with(|| CompensatedSum::new(halves.len())).add(&halves);
            err += diff;
        } else if depth >= opts.max_depth {
            return Err(Error::QuadratureNonConvergence(format!(
                "maximum refinement depth {} reached on [{lo}, {hi}] with error {diff:e}",
                opts.max_depth
            )));
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(AdaptiveResult {
        value: total.map(|s| s.total()).unwrap_or_default(),
        error_estimate: err,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_small_rules() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_eq!(x[1], 0.0);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in [5, 10, 24] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new(1);
        s.add(&[1.0]);
        for _ in 0..1000 {
            s.add(&[1e-16]);
        }
        s.add(&[-1.0]);
        assert!((s.total()[0] - 1e-13).abs() < 1e-20);
    }

    #[test]
    fn adaptive_integrates_peaked_function() {
        let f = |x: f64| Ok(vec![1.0 / (1e-4 + x * x), x.cosh()]);
        let res = integrate_adaptive(&f, -1.0, 1.0, &AdaptiveOptions::default()).unwrap();
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((res.value[0] - exact).abs() < 1e-8 * exact);
        assert!((res.value[1] - 2.0 * 1f64.sinh()).abs() < 1e-12);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let f = |x: f64| Ok(vec![if x > 0.1 { 1.0 } else { 0.0 }]);
        let opts = AdaptiveOptions { max_depth: 3, ..Default::default() };
        assert!(matches!(
            integrate_adaptive(&f, 0.0, 1.0, &opts),
            Err(Error::QuadratureNonConvergence(_))
        ));
    }
}
