use std::fmt;

use super::{KinematicState, Worldline};
use crate::error::{Error, Result};
use crate::fd::CentralStencil;
use crate::tensor6::SixVector;

type PositionFn = dyn Fn(f64) -> SixVector + Send + Sync;

/// Worldline given only by its position map; derivatives come from an
/// 11-point central stencil (order 10 for `u`, at least 6 for `a⃛`).
pub struct NumericWorldline {
    position: Box<PositionFn>,
    domain: (f64, f64),
    step: f64,
    stencil: CentralStencil,
}

impl fmt::Debug for NumericWorldline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericWorldline")
            .field("domain", &self.domain)
            .field("step", &self.step)
            .finish()
    }
}

const HALF_WIDTH: usize = 5;

/// Candidate steps scanned by [`NumericWorldline::new`].
fn step_grid() -> impl Iterator<Item = f64> {
    (0..=30).map(|i| 10f64.powf(-3.0 + i as f64 * 0.1))
}

impl NumericWorldline {
    /// Uses a fixed step `h`.
    pub fn with_step(
        position: impl Fn(f64) -> SixVector + Send + Sync + 'static,
        domain: (f64, f64),
        h: f64,
    ) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!("step {h} must be positive")));
        }
        if !(domain.0 < domain.1) {
            return Err(Error::InvalidParameter(format!(
                "empty domain [{}, {}]",
                domain.0, domain.1
            )));
        }
        Ok(NumericWorldline {
            position: Box::new(position),
            domain,
            step: h,
            stencil: CentralStencil::new(HALF_WIDTH, 5),
        })
    }

    /// Chooses the step on a log grid in `[1e-3, 1]` minimizing the largest
    /// kinematic-chain residual over a few probe times.
    pub fn new(
        position: impl Fn(f64) -> SixVector + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Result<Self> {
        let mut w = Self::with_step(position, domain, 1e-2)?;
        let probes = w.probe_times();
        let mut best: Option<(f64, f64)> = None;
        for h in step_grid() {
            w.step = h;
            let mut worst: f64 = 0.0;
            for &t in &probes {
                match w.evaluate(t) {
                    Ok(s) if s.is_finite() => worst = worst.max(s.chain_residuals().max()),
                    _ => worst = f64::INFINITY,
                }
            }
            if best.map_or(true, |(_, r)| worst < r) {
                best = Some((h, worst));
            }
        }
        match best {
            Some((h, r)) if r.is_finite() => {
                w.step = h;
                Ok(w)
            }
            _ => Err(Error::InvalidParameter(
                "no finite-difference step gives a finite kinematic chain".into(),
            )),
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn probe_times(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => [0.25, 0.5, 0.75].iter().map(|f| lo + f * (hi - lo)).collect(),
            (true, false) => vec![lo + 1.0, lo + 2.0, lo + 3.0],
            (false, true) => vec![hi - 3.0, hi - 2.0, hi - 1.0],
            (false, false) => vec![-1.0, 0.0, 1.0],
        }
    }

    fn stencil_fits(&self, tau: f64) -> Result<()> {
        let reach = HALF_WIDTH as f64 * self.step;
        let (lo, hi) = self.domain;
        if tau - reach < lo || tau + reach > hi {
            return Err(Error::OutsideDomain { tau, lo: lo + reach, hi: hi - reach });
        }
        Ok(())
    }
}

impl Worldline for NumericWorldline {
    fn domain(&self) -> (f64, f64) {
        let reach = HALF_WIDTH as f64 * self.step;
        (self.domain.0 + reach, self.domain.1 - reach)
    }

    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        self.stencil_fits(tau)?;
        let h = self.step;
        let samples: Vec<SixVector> = self
            .stencil
            .offsets()
            .map(|j| (self.position)(tau + j as f64 * h))
            .collect();
        let d = |m: usize| self.stencil.apply(&samples, m, h);
        Ok(KinematicState {
            tau,
            z: samples[HALF_WIDTH],
            u: d(1),
            a: d(2),
            adot: d(3),
            addot: d(4),
            adddot: d(5),
        })
    }

    fn position_velocity(&self, tau: f64) -> Result<(SixVector, SixVector)> {
        self.stencil_fits(tau)?;
        let h = self.step;
        let z = (self.position)(tau);
        let u = self.stencil.derivative(|t| (self.position)(t), tau, h, 1);
        Ok((z, u))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{kinematic_state, HelicalMotion, HyperbolicMotion, TAU_KIN};
    use super::*;

    fn hyperbolic_position(t: f64) -> SixVector {
        SixVector::new([t.sinh(), t.cosh(), 0.0, 0.0, 0.0, 0.0])
    }

    #[test]
    fn chosen_step_satisfies_chain() {
        let w = NumericWorldline::new(hyperbolic_position, (-10.0, 10.0)).unwrap();
        let exact = HyperbolicMotion::new(1.0).unwrap();
        for tau in [-2.0, 0.0, 1.3] {
            let s = kinematic_state(&w, tau).unwrap();
            assert!(s.chain_residuals().max() < TAU_KIN);
            let e = exact.evaluate(tau).unwrap();
            assert!((s.adddot - e.adddot).max_abs() < 1e-6 * e.adddot.max_abs());
        }
    }

    #[test]
    fn halving_step_shrinks_chain_residual_at_least_32_fold() {
        let helix = HelicalMotion::new(1.0, 0.5, 0.2).unwrap();
        let pos = move |t: f64| helix.evaluate(t).unwrap().z;
        let coarse = NumericWorldline::with_step(pos.clone(), (-50.0, 50.0), 0.4).unwrap();
        let fine = NumericWorldline::with_step(pos, (-50.0, 50.0), 0.2).unwrap();
        for tau in [0.0, 0.7, 3.1] {
            let rc = coarse.evaluate(tau).unwrap().chain_residuals().max();
            let rf = fine.evaluate(tau).unwrap().chain_residuals().max();
            assert!(rc / rf >= 32.0, "ratio {}", rc / rf);
        }
    }

    #[test]
    fn stencil_must_fit_in_domain() {
        let w = NumericWorldline::with_step(hyperbolic_position, (0.0, 1.0), 0.05).unwrap();
        assert!(matches!(w.evaluate(0.1), Err(Error::OutsideDomain { .. })));
        assert!(w.evaluate(0.5).is_ok());
    }
}
