//! Hyperbolic linear decision functions `h(x; w) = sign(w*x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{minkowski_dot, HyperboloidPoint};

/// Binary label / decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryDecision {
    Positive,
    Negative,
}

impl BinaryDecision {
    pub fn sign(self) -> f64 {
        match self {
            BinaryDecision::Positive => 1.0,
            BinaryDecision::Negative => -1.0,
        }
    }

    pub fn from_bool(positive: bool) -> Self {
        if positive {
            BinaryDecision::Positive
        } else {
            BinaryDecision::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == BinaryDecision::Positive
    }
}

/// Space-like normal vector `w` (`w*w < 0`) of a hyperbolic hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionWeights(Vec<f64>);

impl DecisionWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: w.len(),
            });
        }
        let q = minkowski_dot(&w, &w);
        if q.is_nan() || q >= 0.0 {
            return Err(Error::InfeasibleWeights(q));
        }
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `w*w`, always negative.
    pub fn norm_sq(&self) -> f64 {
        minkowski_dot(&self.0, &self.0)
    }

    pub fn scaled(&self, kappa: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * kappa).collect())
    }

    fn check_dim(&self, x: &HyperboloidPoint) -> Result<()> {
        if self.0.len() != x.coords().len() {
            return Err(Error::Dimension {
                expected: self.0.len(),
                got: x.coords().len(),
            });
        }
        Ok(())
    }
}

/// Ranking score `w*x`, a monotone transform of the geometric margin.
pub fn decision_value(w: &DecisionWeights, x: &HyperboloidPoint) -> Result<f64> {
    w.check_dim(x)?;
    Ok(minkowski_dot(w.as_slice(), x.coords()))
}

/// `+1` iff `w*x > 0`; the boundary itself is classified negative.
pub fn decide(w: &DecisionWeights, x: &HyperboloidPoint) -> Result<BinaryDecision> {
    Ok(BinaryDecision::from_bool(decision_value(w, x)? > 0.0))
}

/// Signed hyperbolic distance from `x` to `{z in L^n : w*z = 0}`:
/// `y * arsinh(w*x / sqrt(-w*w))`.
pub fn geometric_margin(
    w: &DecisionWeights,
    x: &HyperboloidPoint,
    y: BinaryDecision,
) -> Result<f64> {
    let value = decision_value(w, x)?;
    let scale = (-w.norm_sq()).sqrt();
    Ok(y.sign() * (value / scale).asinh())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w010() -> DecisionWeights {
        DecisionWeights::new(vec![0.0, 1.0, 0.0]).unwrap()
    }

    fn hp(c: Vec<f64>) -> HyperboloidPoint {
        HyperboloidPoint::new(c).unwrap()
    }

    #[test]
    fn rejects_time_like_weights() {
        assert!(matches!(
            DecisionWeights::new(vec![1.0, 0.0, 0.0]),
            Err(Error::InfeasibleWeights(_))
        ));
        assert!(DecisionWeights::new(vec![1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn decision_value_examples() {
        let w = w010();
        assert_eq!(
            decision_value(&w, &HyperboloidPoint::origin(2)).unwrap(),
            0.0
        );
        let x = hp(vec![1f64.cosh(), -(1f64.sinh()), 0.0]);
        let v = decision_value(&w, &x).unwrap();
        assert!((v - 1f64.sinh()).abs() < 1e-15);
        assert!((v - 1.17520).abs() < 1e-5);
        let w3 = w.scaled(3.0).unwrap();
        assert!((decision_value(&w3, &x).unwrap() - 3.0 * v).abs() < 1e-14);
    }

    #[test]
    fn decide_examples() {
        let w = w010();
        let pos = hp(vec![1f64.cosh(), -(1f64.sinh()), 0.0]);
        let neg = hp(vec![1f64.cosh(), 1f64.sinh(), 0.0]);
        assert_eq!(decide(&w, &pos).unwrap(), BinaryDecision::Positive);
        assert_eq!(decide(&w, &neg).unwrap(), BinaryDecision::Negative);
        assert_eq!(
            decide(&w, &HyperboloidPoint::origin(2)).unwrap(),
            BinaryDecision::Negative
        );
    }

    #[test]
    fn margin_examples() {
        let x = hp(vec![1f64.cosh(), -(1f64.sinh()), 0.0]);
        let m0 = geometric_margin(
            &w010(),
            &HyperboloidPoint::origin(2),
            BinaryDecision::Positive,
        );
        assert_eq!(m0.unwrap(), 0.0);
        let m1 = geometric_margin(&w010(), &x, BinaryDecision::Positive).unwrap();
        assert!((m1 - 1.0).abs() < 1e-12);
        let w2 = DecisionWeights::new(vec![0.0, 2.0, 0.0]).unwrap();
        let m2 = geometric_margin(&w2, &x, BinaryDecision::Positive).unwrap();
        assert!((m2 - 1.0).abs() < 1e-12);
        let neg = geometric_margin(&w010(), &x, BinaryDecision::Negative).unwrap();
        assert!((neg + 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let x = HyperboloidPoint::origin(3);
        assert!(matches!(
            decision_value(&w010(), &x),
            Err(Error::Dimension { .. })
        ));
    }
}
