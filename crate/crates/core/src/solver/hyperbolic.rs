use super::{check_labels, descend, euclidean::euclidean_svm_train, TrainConfig, TrainReport};
use crate::classifier::{BinaryDecision, DecisionWeights};
use crate::error::{Error, Result};
use crate::geometry::{minkowski_dot, norm_sq, HyperboloidPoint};

/// `arsinh(1)`, the hinge threshold on the margin.
const ASINH_ONE: f64 = 0.881_373_587_019_543;

fn require_feasible(w: &[f64]) -> Result<()> {
    let q = minkowski_dot(w, w);
    if q < 0.0 {
        Ok(())
    } else {
        Err(Error::InfeasibleWeights(q))
    }
}

fn check_dims(w: &[f64], data: &[HyperboloidPoint]) -> Result<()> {
    match data.iter().find(|x| x.coords().len() != w.len()) {
        Some(x) => Err(Error::Dimension {
            expected: w.len(),
            got: x.coords().len(),
        }),
        None => Ok(()),
    }
}

/// Objective and gradient in one pass over the data.
fn objective_and_gradient(
    w: &[f64],
    data: &[HyperboloidPoint],
    y: &[BinaryDecision],
    c: f64,
    grad: &mut [f64],
) -> f64 {
    // d(-1/2 w*w)/dw = (-w_0, w_1, ..., w_n)
    grad[0] = -w[0];
    grad[1..].copy_from_slice(&w[1..]);
    let mut hinge = 0.0;
    for (x, label) in data.iter().zip(y) {
        let x = x.coords();
        let s = label.sign() * minkowski_dot(w, x);
        let loss = ASINH_ONE - s.asinh();
        if loss > 0.0 {
            hinge += loss;
            let coef = -c * label.sign() / (1.0 + s * s).sqrt();
            grad[0] += coef * x[0];
            for (g, xi) in grad[1..].iter_mut().zip(&x[1..]) {
                *g -= coef * xi;
            }
        }
    }
    -0.5 * minkowski_dot(w, w) + c * hinge
}

/// Soft-margin hyperbolic SVM objective
/// `-1/2 w*w + C sum_j max(0, arsinh(1) - arsinh(y_j (w*x_j)))`.
pub fn hsvm_objective(
    w: &[f64],
    data: &[HyperboloidPoint],
    y: &[BinaryDecision],
    c: f64,
) -> Result<f64> {
    require_feasible(w)?;
    check_dims(w, data)?;
    let mut grad = vec![0.0; w.len()];
    Ok(objective_and_gradient(w, data, y, c, &mut grad))
}

/// Gradient of [`hsvm_objective`] with respect to the ambient coordinates of `w`.
pub fn hsvm_gradient(
    w: &[f64],
    data: &[HyperboloidPoint],
    y: &[BinaryDecision],
    c: f64,
) -> Result<Vec<f64>> {
    require_feasible(w)?;
    check_dims(w, data)?;
    let mut grad = vec![0.0; w.len()];
    objective_and_gradient(w, data, y, c, &mut grad);
    Ok(grad)
}

/// Pulls `w` back to `w*w <= -feas_eps` by shrinking the time coordinate.
///
/// When the spatial part is (nearly) zero it is first inflated to norm
/// `sqrt(2 feas_eps)`, along the first spatial axis if it was exactly zero.
pub fn project_feasible(w: &[f64], feas_eps: f64) -> Vec<f64> {
    let mut w = w.to_vec();
    project_in_place(&mut w, feas_eps);
    w
}

pub(crate) fn project_in_place(w: &mut [f64], feas_eps: f64) {
    if minkowski_dot(w, w) <= -feas_eps {
        return;
    }
    let mut space = norm_sq(&w[1..]);
    if space <= feas_eps {
        let target = (2.0 * feas_eps).sqrt();
        if space == 0.0 {
            w[1] = target;
        } else {
            let scale = target / space.sqrt();
            w[1..].iter_mut().for_each(|v| *v *= scale);
        }
        space = 2.0 * feas_eps;
    }
    let sign = if w[0] < 0.0 { -1.0 } else { 1.0 };
    w[0] = sign * (space - feas_eps).max(0.0).sqrt();
    // Rounding in w0^2 - |ws|^2 can leave a tiny surplus when |ws| >> eps.
    for _ in 0..16 {
        let surplus = minkowski_dot(w, w) + feas_eps;
        if surplus <= 0.0 || w[0] == 0.0 {
            break;
        }
        let t = w[0].abs();
        w[0] = sign * (t - (surplus / t).max(t * f64::EPSILON)).max(0.0);
    }
}

/// Converts Euclidean weights `w'` (trained on ambient hyperboloid
/// coordinates with an appended bias) into Minkowski weights with
/// `w*x = w'^T x`, dropping the bias, then projects to feasibility.
pub fn warm_start_from_euclidean(
    w_euc: &[f64],
    ambient_dim: usize,
    feas_eps: f64,
) -> Result<Vec<f64>> {
    if w_euc.len() != ambient_dim + 1 || ambient_dim < 2 {
        return Err(Error::Dimension {
            expected: ambient_dim + 1,
            got: w_euc.len(),
        });
    }
    let mut w: Vec<f64> = w_euc[..ambient_dim].to_vec();
    w[1..].iter_mut().for_each(|v| *v = -*v);
    project_in_place(&mut w, feas_eps);
    Ok(w)
}

/// Trains a hyperbolic SVM by projected gradient descent warm-started from
/// a Euclidean SVM on the ambient coordinates.
pub fn hsvm_train(
    data: &[HyperboloidPoint],
    y: &[BinaryDecision],
    config: &TrainConfig,
) -> Result<(DecisionWeights, TrainReport)> {
    config.validate()?;
    check_labels(data.len(), y.len())?;
    let ambient = data[0].coords().len();
    let ambient_rows: Vec<Vec<f64>> = data.iter().map(|x| x.coords().to_vec()).collect();
    let w_euc = euclidean_svm_train(&ambient_rows, y, config)?;
    let w0 = warm_start_from_euclidean(&w_euc, ambient, config.feas_eps)?;
    check_dims(&w0, data)?;
    let feas_eps = config.feas_eps;
    let (w, report) = descend(
        w0,
        config,
        |w, g| objective_and_gradient(w, data, y, config.c, g),
        |w| project_in_place(w, feas_eps),
    )?;
    Ok((DecisionWeights::new(w)?, report))
}
