//! One-vs-all training over hyperbolic or Euclidean binary SVMs, with Platt
//! calibration fitted on out-of-fold training scores.

mod platt;

pub use platt::{platt_fit, Platt};

use serde::{Deserialize, Serialize};

use crate::classifier::BinaryDecision;
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{minkowski_dot, HyperboloidPoint};
use crate::rng::{child_rng, derive_seed, hash_str};
use crate::solver::{euclidean_svm_train, hsvm_train, TrainConfig};

/// Positives below this count are trained but flagged.
pub const MIN_POSITIVES: usize = 2;
const PLATT_STREAM: u64 = 0x504c_4154;

/// Classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Geometry {
    #[serde(rename = "hyperbolic", alias = "hyperbolic_svm")]
    Hyperbolic,
    #[serde(rename = "euclidean", alias = "euclidean_svm")]
    Euclidean,
}

impl Geometry {
    pub fn as_str(self) -> &'static str {
        match self {
            Geometry::Hyperbolic => "hyperbolic",
            Geometry::Euclidean => "euclidean",
        }
    }

    pub fn method_name(self) -> &'static str {
        match self {
            Geometry::Hyperbolic => "hyperbolic_svm",
            Geometry::Euclidean => "euclidean_svm",
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" | "hyperbolic_svm" => Ok(Geometry::Hyperbolic),
            "euclidean" | "euclidean_svm" => Ok(Geometry::Euclidean),
            other => Err(Error::Invalid(format!("unknown method {other:?}"))),
        }
    }
}

/// Points prepared for one classifier family: hyperboloid points for the
/// hyperbolic SVM, ball coordinates (bias appended at training) for the
/// Euclidean SVM.
#[derive(Debug, Clone)]
pub enum Features {
    Hyperboloid(Vec<HyperboloidPoint>),
    Euclidean(Vec<Vec<f64>>),
}

impl Features {
    pub fn for_geometry(geometry: Geometry, data: &LabeledDataset) -> Result<Self> {
        Ok(match geometry {
            Geometry::Hyperbolic => Features::Hyperboloid(data.to_hyperboloid()?),
            Geometry::Euclidean => Features::Euclidean(
                data.to_ball()?
                    .into_iter()
                    .map(|b| b.into_inner())
                    .collect(),
            ),
        })
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            Features::Hyperboloid(_) => Geometry::Hyperbolic,
            Features::Euclidean(_) => Geometry::Euclidean,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Features::Hyperboloid(v) => v.len(),
            Features::Euclidean(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length of a weight vector for these features.
    pub fn weight_len(&self) -> Option<usize> {
        match self {
            Features::Hyperboloid(v) => v.first().map(|x| x.coords().len()),
            Features::Euclidean(v) => v.first().map(|x| x.len() + 1),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        match self {
            Features::Hyperboloid(v) => {
                Features::Hyperboloid(indices.iter().map(|&i| v[i].clone()).collect())
            }
            Features::Euclidean(v) => {
                Features::Euclidean(indices.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }

    /// Raw decision value of point `j`: `w*x` or `w^T [x, 1]`.
    pub fn score(&self, w: &[f64], j: usize) -> f64 {
        match self {
            Features::Hyperboloid(v) => minkowski_dot(w, v[j].coords()),
            Features::Euclidean(v) => crate::solver::euclidean::affine_score(w, &v[j]),
        }
    }

    pub fn scores(&self, w: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|j| self.score(w, j)).collect()
    }
}

/// Trains one binary classifier; returns the raw weight vector.
pub fn train_binary(
    features: &Features,
    y: &[BinaryDecision],
    config: &TrainConfig,
) -> Result<Vec<f64>> {
    match features {
        Features::Hyperboloid(points) => Ok(hsvm_train(points, y, config)?.0.into_inner()),
        Features::Euclidean(rows) => euclidean_svm_train(rows, y, config),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassStatus {
    Trained,
    /// Fewer than [`MIN_POSITIVES`] positives; trained anyway.
    FewPositives,
    /// No positives: constant probability 0, excluded from evaluation.
    NoPositives,
    /// Every training point is positive: constant probability 1, excluded.
    NoNegatives,
}

impl ClassStatus {
    pub fn is_degenerate(self) -> bool {
        matches!(self, ClassStatus::NoPositives | ClassStatus::NoNegatives)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassModel {
    pub id: String,
    pub weights: Vec<f64>,
    pub platt: Platt,
    pub status: ClassStatus,
    /// Where the Platt parameters came from.
    pub calibration: Calibration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    /// Fitted on out-of-fold scores from an internal 2-fold split.
    OutOfFold,
    /// A fold of the internal split lacked one label; fitted on in-sample scores.
    InSample,
    /// Raw scores used as logits.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvaModel {
    pub geometry: Geometry,
    /// Weight vector length.
    pub weight_len: usize,
    pub classes: Vec<ClassModel>,
    pub config: TrainConfig,
}

impl OvaModel {
    pub fn class_ids(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn warnings(&self) -> Vec<String> {
        self.classes
            .iter()
            .filter(|c| c.status != ClassStatus::Trained)
            .map(|c| format!("class {}: {:?}", c.id, c.status))
            .collect()
    }

    fn check_features(&self, features: &Features) -> Result<()> {
        if features.geometry() != self.geometry {
            return Err(Error::GeometryMismatch {
                model: self.geometry.as_str(),
                features: features.geometry().as_str(),
            });
        }
        if let Some(len) = features.weight_len() {
            if len != self.weight_len {
                return Err(Error::Dimension {
                    expected: self.weight_len,
                    got: len,
                });
            }
        }
        Ok(())
    }

    /// Calibrated log-odds, `[point][class]`. Same ordering as the
    /// probabilities but free of floating-point saturation.
    pub fn logits(&self, features: &Features) -> Result<Vec<Vec<f64>>> {
        self.check_features(features)?;
        Ok((0..features.len())
            .map(|j| {
                self.classes
                    .iter()
                    .map(|c| match c.status {
                        ClassStatus::NoPositives => f64::NEG_INFINITY,
                        ClassStatus::NoNegatives => f64::INFINITY,
                        _ => c.platt.logit(features.score(&c.weights, j)),
                    })
                    .collect()
            })
            .collect())
    }

    /// Per-class probabilities `[point][class]`; rows are not normalized.
    pub fn predict(&self, features: &Features) -> Result<Vec<Vec<f64>>> {
        let mut out = self.logits(features)?;
        out.iter_mut()
            .flatten()
            .for_each(|z| *z = platt::sigmoid(*z));
        Ok(out)
    }

    pub fn predict_dataset(&self, data: &LabeledDataset) -> Result<Vec<Vec<f64>>> {
        self.predict(&Features::for_geometry(self.geometry, data)?)
    }
}

/// Probability matrix for `points` under `model`.
pub fn ova_predict(model: &OvaModel, points: &Features) -> Result<Vec<Vec<f64>>> {
    model.predict(points)
}

/// One-vs-all training with Platt calibration.
pub fn ova_train(
    data: &LabeledDataset,
    config: &TrainConfig,
    geometry: Geometry,
) -> Result<OvaModel> {
    let features = Features::for_geometry(geometry, data)?;
    ova_train_features(&features, data, config, true)
}

/// One-vs-all training on prepared features. `labels` supplies the class
/// list and memberships and must be aligned with `features`. Without
/// calibration each class uses [`Platt::IDENTITY`].
pub fn ova_train_features(
    features: &Features,
    labels: &LabeledDataset,
    config: &TrainConfig,
    calibrate: bool,
) -> Result<OvaModel> {
    config.validate()?;
    if labels.num_classes() < 2 {
        return Err(Error::Invalid(format!(
            "one-vs-all needs at least 2 classes, got {}",
            labels.num_classes()
        )));
    }
    if features.len() != labels.len() {
        return Err(Error::Invalid(format!(
            "{} feature rows but {} labeled points",
            features.len(),
            labels.len()
        )));
    }
    let weight_len = features.weight_len().ok_or(Error::Empty("training data"))?;
    let classes = labels
        .classes()
        .iter()
        .enumerate()
        .map(|(k, id)| train_class(features, labels, k, id, config, calibrate, weight_len))
        .collect::<Result<Vec<_>>>()?;
    Ok(OvaModel {
        geometry: features.geometry(),
        weight_len,
        classes,
        config: config.clone(),
    })
}

fn train_class(
    features: &Features,
    labels: &LabeledDataset,
    k: usize,
    id: &str,
    config: &TrainConfig,
    calibrate: bool,
    weight_len: usize,
) -> Result<ClassModel> {
    let member = labels.membership(k);
    let n_pos = member.iter().filter(|&&m| m).count();
    let class_config = config.with_seed(derive_seed(config.seed, &[hash_str(id)]));
    let degenerate = |status| ClassModel {
        id: id.to_string(),
        weights: vec![0.0; weight_len],
        platt: Platt::IDENTITY,
        status,
        calibration: Calibration::None,
    };
    if n_pos == 0 {
        return Ok(degenerate(ClassStatus::NoPositives));
    }
    if n_pos == member.len() {
        return Ok(degenerate(ClassStatus::NoNegatives));
    }
    let status = if n_pos < MIN_POSITIVES {
        ClassStatus::FewPositives
    } else {
        ClassStatus::Trained
    };
    let y: Vec<BinaryDecision> = member
        .iter()
        .map(|&m| BinaryDecision::from_bool(m))
        .collect();
    let weights = train_binary(features, &y, &class_config)?;

    let (platt, calibration) = if calibrate {
        match out_of_fold_scores(features, &member, &class_config)? {
            Some(scores) => (platt_fit(&scores, &member)?, Calibration::OutOfFold),
            None => (
                platt_fit(&features.scores(&weights), &member)?,
                Calibration::InSample,
            ),
        }
    } else {
        (Platt::IDENTITY, Calibration::None)
    };
    Ok(ClassModel {
        id: id.to_string(),
        weights,
        platt,
        status,
        calibration,
    })
}

/// Scores each point with a model trained on the other half of a
/// stratified 2-fold split; `None` when either half lacks a label.
fn out_of_fold_scores(
    features: &Features,
    member: &[bool],
    config: &TrainConfig,
) -> Result<Option<Vec<f64>>> {
    let mut rng = child_rng(config.seed, &[PLATT_STREAM]);
    let folds = crate::eval::stratified_binary_split(member, &mut rng);
    for fold in &folds {
        let pos = fold.iter().filter(|&&i| member[i]).count();
        if pos == 0 || pos == fold.len() {
            return Ok(None);
        }
    }
    let mut scores = vec![0.0; member.len()];
    for (held, train) in [(&folds[0], &folds[1]), (&folds[1], &folds[0])] {
        let sub = features.subset(train);
        let y: Vec<BinaryDecision> = train
            .iter()
            .map(|&i| BinaryDecision::from_bool(member[i]))
            .collect();
        let w = train_binary(&sub, &y, config)?;
        for &i in held.iter() {
            scores[i] = features.score(&w, i);
        }
    }
    Ok(Some(scores))
}
