use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::stratified_folds;
use super::stats::mean_std;
use super::{evaluate_features, score_report, EvalReport};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::multiclass::{ova_train_features, Features, Geometry};
use crate::rng::{child_rng, derive_seed};
use crate::solver::TrainConfig;

const INNER_FOLDS: usize = 2;
const INNER_STREAM: u64 = 1;
const TIE_STREAM: u64 = 2;
const TRAIN_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    /// Candidate values of `C`, tried in order; ties keep the earliest.
    pub c_grid: Vec<f64>,
    pub folds: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            c_grid: vec![0.1, 1.0, 10.0],
            folds: 2,
            trials: 5,
            seed: 0,
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Invalid(format!(
                "folds must be >= 2, got {}",
                self.folds
            )));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be positive".into()));
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::Invalid(format!("invalid C grid {:?}", self.c_grid)));
        }
        Ok(())
    }
}

/// One outer evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub trial: usize,
    pub fold: usize,
    pub chosen_c: f64,
    /// Inner-CV macro-AUPR for each grid value (`None` if no inner fold was scorable).
    pub inner_macro_aupr: Vec<Option<f64>>,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub method: Geometry,
    /// Mean macro-AUPR over the folds of each trial.
    pub per_trial_macro_aupr: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation of `per_trial_macro_aupr`.
    pub std: f64,
    /// Selected `C`, trial-major.
    pub chosen_c: Vec<f64>,
    pub folds: Vec<FoldOutcome>,
}

/// Repeated k-fold cross-validation with nested 2-fold selection of `C` by
/// macro-AUPR.
///
/// Fold memberships depend only on `(data, cv.seed)`, so different methods
/// run with the same seed are evaluated on identical splits.
pub fn cross_validate(
    data: &LabeledDataset,
    geometry: Geometry,
    train: &TrainConfig,
    cv: &CvConfig,
) -> Result<CvResult> {
    cv.validate()?;
    train.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let features = Features::for_geometry(geometry, data)?;
    let splits: Vec<Vec<Vec<usize>>> = (0..cv.trials)
        .map(|t| {
            let mut rng = child_rng(cv.seed, &[t as u64]);
            stratified_folds(data.labels(), data.num_classes(), cv.folds, &mut rng)
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cv.trials)
        .flat_map(|t| (0..cv.folds).map(move |f| (t, f)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(t, f)| run_fold(data, &features, &splits[t], t, f, train, cv))
        .collect::<Result<Vec<_>>>()?;

    let per_trial: Vec<f64> = (0..cv.trials)
        .map(|t| {
            let runs: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.trial == t)
                .map(|o| o.report.macro_aupr)
                .collect();
            runs.iter().sum::<f64>() / runs.len() as f64
        })
        .collect();
    let (mean, std) = mean_std(&per_trial);
    Ok(CvResult {
        method: geometry,
        chosen_c: outcomes.iter().map(|o| o.chosen_c).collect(),
        per_trial_macro_aupr: per_trial,
        mean,
        std,
        folds: outcomes,
    })
}

fn complement(folds: &[Vec<usize>], held: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = folds
        .iter()
        .enumerate()
        .filter(|&(f, _)| f != held)
        .flat_map(|(_, v)| v.iter().copied())
        .collect();
    idx.sort_unstable();
    idx
}

fn run_fold(
    data: &LabeledDataset,
    features: &Features,
    folds: &[Vec<usize>],
    trial: usize,
    fold: usize,
    train: &TrainConfig,
    cv: &CvConfig,
) -> Result<FoldOutcome> {
    let path = [trial as u64, fold as u64];
    let train_idx = complement(folds, fold);
    let test_idx = &folds[fold];
    let train_data = data.subset(&train_idx);
    let train_features = features.subset(&train_idx);

    let inner_macro_aupr = select_scores(&train_data, &train_features, train, cv, &path)?;
    let chosen_c = inner_macro_aupr
        .iter()
        .zip(&cv.c_grid)
        .filter_map(|(score, &c)| score.map(|s| (s, c)))
        .fold(None, |best: Option<(f64, f64)>, (s, c)| match best {
            Some((bs, _)) if bs >= s => best,
            _ => Some((s, c)),
        })
        .map_or(cv.c_grid[0], |(_, c)| c);

    let config = train.with_c(chosen_c).with_seed(derive_seed(
        cv.seed,
        &[trial as u64, fold as u64, TRAIN_STREAM],
    ));
    let model = ova_train_features(&train_features, &train_data, &config, true)?;
    let test_data = data.subset(test_idx);
    let test_features = features.subset(test_idx);
    let tie_seed = derive_seed(cv.seed, &[trial as u64, fold as u64, TIE_STREAM]);
    let report = evaluate_features(&model, &test_features, &test_data, tie_seed)?;
    Ok(FoldOutcome {
        trial,
        fold,
        chosen_c,
        inner_macro_aupr,
        report,
    })
}

/// Mean inner-fold macro-AUPR for each grid value, from uncalibrated
/// scores (per-class AUPR does not depend on a monotone calibration).
fn select_scores(
    data: &LabeledDataset,
    features: &Features,
    train: &TrainConfig,
    cv: &CvConfig,
    path: &[u64; 2],
) -> Result<Vec<Option<f64>>> {
    let mut rng = child_rng(cv.seed, &[path[0], path[1], INNER_STREAM]);
    let inner = stratified_folds(data.labels(), data.num_classes(), INNER_FOLDS, &mut rng);
    let tie_seed = derive_seed(cv.seed, &[path[0], path[1], INNER_STREAM, TIE_STREAM]);
    cv.c_grid
        .iter()
        .map(|&c| {
            let mut scores = Vec::new();
            for held in 0..INNER_FOLDS {
                let tr = complement(&inner, held);
                let te = &inner[held];
                if tr.is_empty() || te.is_empty() {
                    continue;
                }
                let config = train.with_c(c).with_seed(derive_seed(
                    cv.seed,
                    &[path[0], path[1], INNER_STREAM, held as u64],
                ));
                let model =
                    ova_train_features(&features.subset(&tr), &data.subset(&tr), &config, false)?;
                let te_features = features.subset(te);
                let logits = model.logits(&te_features)?;
                let skip: Vec<bool> = model
                    .classes
                    .iter()
                    .map(|m| m.status.is_degenerate())
                    .collect();
                match score_report(&logits, &data.subset(te), &skip, tie_seed) {
                    Ok(r) => scores.push(r.macro_aupr),
                    Err(Error::AllClassesExcluded) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok((!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_gaussian_mixture, GaussianMixtureSpec};

    fn small_data() -> LabeledDataset {
        gen_gaussian_mixture(&GaussianMixtureSpec {
            num_classes: 3,
            points_per_class: 20,
            seed: 11,
            ..Default::default()
        })
        .unwrap()
    }

    fn fast() -> TrainConfig {
        TrainConfig {
            max_iters: 300,
            ..Default::default()
        }
    }

    #[test]
    fn structure_and_grid_membership() {
        let data = small_data();
        let cv = CvConfig {
            trials: 2,
            ..Default::default()
        };
        let r = cross_validate(&data, Geometry::Euclidean, &fast(), &cv).unwrap();
        assert_eq!(r.folds.len(), 4);
        assert_eq!(r.per_trial_macro_aupr.len(), 2);
        assert!(r.chosen_c.iter().all(|c| cv.c_grid.contains(c)));
        let (m, s) = mean_std(&r.per_trial_macro_aupr);
        assert!((m - r.mean).abs() <= 1e-12 && (s - r.std).abs() <= 1e-12);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let data = small_data();
        let cv = CvConfig {
            trials: 1,
            seed: 4,
            ..Default::default()
        };
        let a = cross_validate(&data, Geometry::Hyperbolic, &fast(), &cv).unwrap();
        let b = cross_validate(&data, Geometry::Hyperbolic, &fast(), &cv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_config() {
        let data = small_data();
        let cv = CvConfig {
            folds: 1,
            ..Default::default()
        };
        assert!(cross_validate(&data, Geometry::Euclidean, &fast(), &cv).is_err());
        let cv = CvConfig {
            c_grid: vec![],
            ..Default::default()
        };
        assert!(cross_validate(&data, Geometry::Euclidean, &fast(), &cv).is_err());
    }
}
