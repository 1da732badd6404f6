use super::{check_labels, descend, TrainConfig, TrainReport};
use crate::classifier::BinaryDecision;
use crate::error::{Error, Result};
use crate::geometry::dot;

/// `w^T [x, 1]` for weights carrying the bias last.
#[inline]
pub(crate) fn affine_score(w: &[f64], x: &[f64]) -> f64 {
    dot(&w[..x.len()], x) + w[x.len()]
}

fn objective_and_gradient(
    w: &[f64],
    features: &[Vec<f64>],
    y: &[BinaryDecision],
    c: f64,
    grad: &mut [f64],
) -> f64 {
    grad.copy_from_slice(w);
    let bias = grad.len() - 1;
    let mut hinge = 0.0;
    for (x, label) in features.iter().zip(y) {
        let margin = label.sign() * affine_score(w, x);
        if margin < 1.0 {
            hinge += 1.0 - margin;
            let coef = -c * label.sign();
            for (g, xi) in grad[..bias].iter_mut().zip(x) {
                *g += coef * xi;
            }
            grad[bias] += coef;
        }
    }
    0.5 * dot(w, w) + c * hinge
}

fn check_features(features: &[Vec<f64>]) -> Result<usize> {
    let dim = features.first().ok_or(Error::Empty("training data"))?.len();
    if let Some(bad) = features.iter().find(|x| x.len() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            got: bad.len(),
        });
    }
    Ok(dim)
}

/// `1/2 |w|^2 + C sum_j max(0, 1 - y_j w^T [x_j, 1])`; `w` carries the bias last.
pub fn euclidean_objective(
    w: &[f64],
    features: &[Vec<f64>],
    y: &[BinaryDecision],
    c: f64,
) -> Result<f64> {
    check_labels(features.len(), y.len())?;
    let dim = check_features(features)?;
    if w.len() != dim + 1 {
        return Err(Error::Dimension {
            expected: dim + 1,
            got: w.len(),
        });
    }
    let mut grad = vec![0.0; w.len()];
    Ok(objective_and_gradient(w, features, y, c, &mut grad))
}

/// Linear soft-margin SVM by deterministic full-batch subgradient descent
/// from `w = 0`. Returns `dim + 1` weights, the bias last.
pub fn euclidean_svm_train(
    features: &[Vec<f64>],
    y: &[BinaryDecision],
    config: &TrainConfig,
) -> Result<Vec<f64>> {
    euclidean_svm_train_with_report(features, y, config).map(|(w, _)| w)
}

pub fn euclidean_svm_train_with_report(
    features: &[Vec<f64>],
    y: &[BinaryDecision],
    config: &TrainConfig,
) -> Result<(Vec<f64>, TrainReport)> {
    config.validate()?;
    check_labels(features.len(), y.len())?;
    let dim = check_features(features)?;
    descend(
        vec![0.0; dim + 1],
        config,
        |w, g| objective_and_gradient(w, features, y, config.c, g),
        |_| {},
    )
}
