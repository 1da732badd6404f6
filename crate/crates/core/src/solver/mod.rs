//! Soft-margin training for the hyperbolic and Euclidean linear SVMs.
//!
//! Both trainers share one deterministic full-batch descent driver with the
//! step schedule `step_size / (1 + step_decay * t)`, gradient-norm
//! clipping, best-iterate tracking and a relative-change stopping rule.

pub(crate) mod euclidean;
mod hyperbolic;

pub use euclidean::{euclidean_objective, euclidean_svm_train, euclidean_svm_train_with_report};
pub use hyperbolic::{
    hsvm_gradient, hsvm_objective, hsvm_train, project_feasible, warm_start_from_euclidean,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Consecutive low-change iterations required before stopping early.
const STALL_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Misclassification tradeoff.
    pub c: f64,
    pub max_iters: usize,
    pub step_size: f64,
    pub step_decay: f64,
    /// Caps each step at `clip_norm * alpha_t * max(|w|, clip_floor)`, so
    /// the cap follows the scale of the iterate. `None` takes raw steps.
    pub clip_norm: Option<f64>,
    pub clip_floor: f64,
    pub feas_eps: f64,
    /// Relative objective-change threshold for early stopping.
    pub tol: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_iters: 10_000,
            step_size: 0.1,
            step_decay: 0.01,
            clip_norm: Some(1.0),
            clip_floor: 1e-4,
            feas_eps: 1e-8,
            tol: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn with_c(&self, c: f64) -> Self {
        Self { c, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.c, "C")?;
        positive(self.step_size, "step_size")?;
        positive(self.feas_eps, "feas_eps")?;
        positive(self.tol, "tol")?;
        positive(self.clip_floor, "clip_floor")?;
        if let Some(clip) = self.clip_norm {
            positive(clip, "clip_norm")?;
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be positive".into()));
        }
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return Err(Error::Invalid(format!(
                "step_decay must lie in (0, 1], got {}",
                self.step_decay
            )));
        }
        Ok(())
    }

    fn step(&self, t: usize) -> f64 {
        self.step_size / (1.0 + self.step_decay * t as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub final_objective: f64,
    pub iterations_used: usize,
    /// Objective after every step, starting with the initial point.
    pub objective_trace: Vec<f64>,
    pub warm_start_objective: f64,
}

/// Runs projected (sub)gradient descent from `w`.
///
/// `eval` returns the objective at its first argument and writes the
/// gradient into the second. Returns the lowest-objective iterate seen.
fn descend<E, P>(
    mut w: Vec<f64>,
    config: &TrainConfig,
    mut eval: E,
    project: P,
) -> Result<(Vec<f64>, TrainReport)>
where
    E: FnMut(&[f64], &mut [f64]) -> f64,
    P: Fn(&mut Vec<f64>),
{
    let mut grad = vec![0.0; w.len()];
    let mut f = eval(&w, &mut grad);
    check_finite(f, &grad, 0)?;
    let warm = f;
    let mut best = (f, w.clone());
    let mut trace = Vec::with_capacity(config.max_iters.min(1 << 16) + 1);
    trace.push(f);
    let mut stall = 0;
    let mut used = 0;
    for t in 0..config.max_iters {
        let mut alpha = config.step(t);
        if let Some(clip) = config.clip_norm {
            let clip = clip * euclidean_norm(&w).max(config.clip_floor);
            let norm = euclidean_norm(&grad);
            if norm > clip {
                alpha *= clip / norm;
            }
        }
        for (wi, gi) in w.iter_mut().zip(&grad) {
            *wi -= alpha * gi;
        }
        project(&mut w);
        let f_new = eval(&w, &mut grad);
        check_finite(f_new, &grad, t + 1)?;
        trace.push(f_new);
        used = t + 1;
        if f_new < best.0 {
            best = (f_new, w.clone());
        }
        let rel = (f_new - f).abs() / f.abs().max(f64::MIN_POSITIVE);
        f = f_new;
        if rel < config.tol {
            stall += 1;
            if stall >= STALL_WINDOW {
                break;
            }
        } else {
            stall = 0;
        }
    }
    let (final_objective, w_best) = best;
    Ok((
        w_best,
        TrainReport {
            final_objective,
            iterations_used: used,
            objective_trace: trace,
            warm_start_objective: warm,
        },
    ))
}

fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.hypot(*x))
}

fn check_finite(f: f64, grad: &[f64], iteration: usize) -> Result<()> {
    if !f.is_finite() {
        return Err(Error::Numerical {
            iteration,
            what: format!("objective is {f}"),
        });
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numerical {
            iteration,
            what: "gradient has a non-finite entry".into(),
        });
    }
    Ok(())
}

fn check_labels(n_points: usize, n_labels: usize) -> Result<()> {
    if n_points == 0 {
        return Err(Error::Empty("training data"));
    }
    if n_points != n_labels {
        return Err(Error::Invalid(format!(
            "{n_points} points but {n_labels} labels"
        )));
    }
    Ok(())
}
