use super::{KinematicState, Worldline};
use crate::error::{Error, Result};
use crate::tensor6::{LorentzMap, SixVector};

/// Image of a worldline under `z ↦ Λ z + b`.
pub struct PoincareTransformed<W> {
    inner: W,
    map: LorentzMap,
    shift: SixVector,
}

impl<W: Worldline> PoincareTransformed<W> {
    /// `map` must preserve the metric and the direction of time.
    pub fn new(inner: W, map: LorentzMap, shift: SixVector) -> Result<Self> {
        if map.metric_defect() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "map does not preserve the metric (defect {:e})",
                map.metric_defect()
            )));
        }
        if map.matrix[0][0] < 1.0 - 1e-12 {
            return Err(Error::InvalidParameter("map reverses time".into()));
        }
        if !shift.is_finite() {
            return Err(Error::NonFinite("translation"));
        }
        Ok(PoincareTransformed { inner, map, shift })
    }
}

impl<W: Worldline> Worldline for PoincareTransformed<W> {
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn evaluate(&self, tau: f64) -> Result<KinematicState> {
        let s = self.inner.evaluate(tau)?;
        let l = |v: SixVector| self.map.apply(&v);
        Ok(KinematicState {
            tau,
            z: l(s.z) + self.shift,
            u: l(s.u),
            a: l(s.a),
            adot: l(s.adot),
            addot: l(s.addot),
            adddot: l(s.adddot),
        })
    }

    fn position_velocity(&self, tau: f64) -> Result<(SixVector, SixVector)> {
        let (z, u) = self.inner.position_velocity(tau)?;
        Ok((self.map.apply(&z) + self.shift, self.map.apply(&u)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{kinematic_state, HelicalMotion};
    use super::*;
    use crate::tensor6::mclf_boost;

    #[test]
    fn boosted_helix_keeps_invariants() {
        let h = HelicalMotion::new(1.0, 0.5, 0.3).unwrap();
        let s0 = h.evaluate(0.4).unwrap();
        let boost = mclf_boost(&SixVector::new([1.25, 0.0, 0.0, 0.0, 0.75, 0.0])).unwrap();
        let w = PoincareTransformed::new(h, boost, SixVector::basis(2)).unwrap();
        let s = kinematic_state(&w, 0.4).unwrap();
        assert!((s.a2() - s0.a2()).abs() < 1e-12);
        assert!((s.adot2() - s0.adot2()).abs() < 1e-12);
    }
}
