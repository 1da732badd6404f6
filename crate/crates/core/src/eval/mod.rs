//! Precision-recall evaluation of one-vs-all models and the nested
//! cross-validation harness.

mod cv;
mod metrics;
mod split;
mod stats;

pub use cv::{cross_validate, CvConfig, CvResult, FoldOutcome};
pub use metrics::{aupr, auroc, average_precision, DEFAULT_TIE_SEED};
pub use split::{stratified_binary_split, stratified_folds};
pub use stats::{mean_std, paired_t_test, PairedTTest};

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::multiclass::{Features, OvaModel};

/// Per-class and averaged ranking metrics. Excluded classes carry `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub class_ids: Vec<String>,
    pub per_class_aupr: Vec<Option<f64>>,
    pub macro_aupr: f64,
    pub micro_aupr: f64,
    pub per_class_auroc: Vec<Option<f64>>,
    pub macro_auroc: f64,
    pub micro_auroc: f64,
    pub excluded_classes: Vec<String>,
}

/// Scores `holdout` with the model's calibrated outputs.
pub fn evaluate(model: &OvaModel, holdout: &LabeledDataset) -> Result<EvalReport> {
    evaluate_with_seed(model, holdout, DEFAULT_TIE_SEED)
}

pub fn evaluate_with_seed(
    model: &OvaModel,
    holdout: &LabeledDataset,
    tie_seed: u64,
) -> Result<EvalReport> {
    let features = Features::for_geometry(model.geometry, holdout)?;
    evaluate_features(model, &features, holdout, tie_seed)
}

/// As [`evaluate`] on prepared features aligned with `holdout`.
pub fn evaluate_features(
    model: &OvaModel,
    features: &Features,
    holdout: &LabeledDataset,
    tie_seed: u64,
) -> Result<EvalReport> {
    if holdout.is_empty() {
        return Err(Error::Empty("holdout"));
    }
    if model.class_ids()
        != holdout
            .classes()
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>()
    {
        return Err(Error::Invalid(
            "model and holdout declare different class lists".into(),
        ));
    }
    // Logits rank identically to the probabilities without saturating at 0 or 1.
    let scores = model.logits(features)?;
    let skip: Vec<bool> = model
        .classes
        .iter()
        .map(|c| c.status.is_degenerate())
        .collect();
    score_report(&scores, holdout, &skip, tie_seed)
}

/// Metrics from a `[point][class]` score matrix. Classes flagged in `skip`,
/// or lacking positives or negatives in `holdout`, are excluded.
pub fn score_report(
    scores: &[Vec<f64>],
    holdout: &LabeledDataset,
    skip: &[bool],
    tie_seed: u64,
) -> Result<EvalReport> {
    let k = holdout.num_classes();
    let mut per_class_aupr = Vec::with_capacity(k);
    let mut per_class_auroc = Vec::with_capacity(k);
    let mut excluded = Vec::new();
    let mut flat_scores = Vec::new();
    let mut flat_labels = Vec::new();
    for (c, id) in holdout.classes().iter().enumerate() {
        let member = holdout.membership(c);
        let pos = member.iter().filter(|&&m| m).count();
        if skip[c] || pos == 0 || pos == member.len() {
            excluded.push(id.clone());
            per_class_aupr.push(None);
            per_class_auroc.push(None);
            continue;
        }
        let col: Vec<f64> = scores.iter().map(|row| row[c]).collect();
        per_class_aupr.push(Some(average_precision(&col, &member, tie_seed)?));
        per_class_auroc.push(Some(auroc(&col, &member)?));
        flat_scores.extend(col);
        flat_labels.extend(member);
    }
    let included: Vec<f64> = per_class_aupr.iter().flatten().copied().collect();
    if included.is_empty() {
        return Err(Error::AllClassesExcluded);
    }
    let macro_aupr = included.iter().sum::<f64>() / included.len() as f64;
    let aurocs: Vec<f64> = per_class_auroc.iter().flatten().copied().collect();
    let macro_auroc = aurocs.iter().sum::<f64>() / aurocs.len() as f64;
    Ok(EvalReport {
        class_ids: holdout.classes().to_vec(),
        per_class_aupr,
        macro_aupr,
        micro_aupr: average_precision(&flat_scores, &flat_labels, tie_seed)?,
        per_class_auroc,
        macro_auroc,
        micro_auroc: auroc(&flat_scores, &flat_labels)?,
        excluded_classes: excluded,
    })
}
