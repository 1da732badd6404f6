//! Platt scaling: `P(y = +1 | s) = 1 / (1 + exp(A s + B))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ITERS: usize = 200;
const MAX_HALVINGS: usize = 20;
const GRAD_TOL: f64 = 1e-10;
/// Ridge added to the Hessian diagonal.
const HESSIAN_RIDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Platt {
    pub a: f64,
    pub b: f64,
}

impl Platt {
    /// Calibration that leaves the score as the logit: `A = -1`, `B = 0`.
    pub const IDENTITY: Platt = Platt { a: -1.0, b: 0.0 };

    /// Log-odds `-(A s + B)` of the positive class.
    pub fn logit(&self, score: f64) -> f64 {
        -(self.a * score + self.b)
    }

    pub fn probability(&self, score: f64) -> f64 {
        sigmoid(self.logit(score))
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Cross-entropy of targets `t` against `sigmoid(-(A s + B))`.
fn neg_log_likelihood(scores: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    scores
        .iter()
        .zip(targets)
        .map(|(&s, &t)| {
            let f = a * s + b;
            // log(1 + exp(f)) - (1 - t) f, evaluated without overflow.
            if f >= 0.0 {
                t * f + (-f).exp().ln_1p()
            } else {
                (t - 1.0) * f + f.exp().ln_1p()
            }
        })
        .sum()
}

/// Fits `(A, B)` by damped Newton iterations on Platt's smoothed targets
/// `t+ = (N+ + 1) / (N+ + 2)` and `t- = 1 / (N- + 2)`.
pub fn platt_fit(scores: &[f64], labels: &[bool]) -> Result<Platt> {
    if scores.len() != labels.len() {
        return Err(Error::Invalid(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Invalid("non-finite score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return Err(Error::DegenerateCalibration(
            "need at least one positive and one negative",
        ));
    }
    let hi = (n_pos + 1.0) / (n_pos + 2.0);
    let lo = 1.0 / (n_neg + 2.0);
    let targets: Vec<f64> = labels.iter().map(|&l| if l { hi } else { lo }).collect();

    let mut a = 0.0;
    let mut b = ((n_neg + 1.0) / (n_pos + 1.0)).ln();
    let mut fval = neg_log_likelihood(scores, &targets, a, b);

    for _ in 0..MAX_ITERS {
        let (mut h11, mut h22, mut h21) = (HESSIAN_RIDGE, HESSIAN_RIDGE, 0.0);
        let (mut g1, mut g2) = (0.0, 0.0);
        for (&s, &t) in scores.iter().zip(&targets) {
            let f = a * s + b;
            // p = P(y = -1) = sigmoid(f), q = 1 - p
            let (p, q) = if f >= 0.0 {
                let e = (-f).exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            } else {
                let e = f.exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            };
            let d2 = p * q;
            h11 += s * s * d2;
            h22 += d2;
            h21 += s * d2;
            let d1 = t - q;
            g1 += s * d1;
            g2 += d1;
        }
        if g1.hypot(g2) <= GRAD_TOL {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let slope = g1 * da + g2 * db;

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = neg_log_likelihood(scores, &targets, na, nb);
            if nf < fval + 1e-4 * step * slope {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(Platt { a, b })
}
