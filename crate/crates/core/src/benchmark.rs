//! Benchmark orchestration: generate or load datasets, cross-validate every
//! method on each, and compare methods with a paired t-test.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::eval::{cross_validate, mean_std, paired_t_test, CvConfig, PairedTTest};
use crate::io::read_dataset;
use crate::multiclass::Geometry;
use crate::rng::{child_rng, derive_seed};
use crate::solver::TrainConfig;
use crate::synth::{
    gen_gaussian_mixture, propagate_labels, ps_dataset, ps_generate, GaussianMixtureSpec,
    LabelSpec, PsSpec,
};

pub const SUMMARY_FORMAT: &str = "hsvm-benchmark/1";

const GAUSSIAN_STREAM: u64 = 10;
const NETWORK_STREAM: u64 = 20;
const LABEL_STREAM: u64 = 21;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DataSource {
    /// `datasets` mixtures; each draws its own seed from the benchmark seed.
    Gaussian {
        #[serde(default)]
        spec: GaussianMixtureSpec,
        datasets: usize,
    },
    /// `networks` PS networks; for each network, every size range and
    /// repeat yields one labeled dataset.
    Ps {
        #[serde(default)]
        spec: PsSpec,
        networks: usize,
        #[serde(default)]
        labels: LabelSpec,
        size_ranges: Vec<(usize, usize)>,
        #[serde(default = "one")]
        repeats: usize,
    },
    Files {
        paths: Vec<PathBuf>,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub source: DataSource,
    pub methods: Vec<Geometry>,
    #[serde(default)]
    pub cv: CvConfig,
    #[serde(default)]
    pub train: TrainConfig,
    /// Where the CLI writes the summary; not part of the embedded copy.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Invalid("benchmark needs at least one method".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort_by_key(|g| g.as_str());
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::Invalid("duplicate method".into()));
        }
        self.cv.validate()?;
        self.train.validate()?;
        match &self.source {
            DataSource::Gaussian { spec, datasets } => {
                if *datasets == 0 {
                    return Err(Error::Invalid("datasets must be positive".into()));
                }
                spec.validate()
            }
            DataSource::Ps {
                spec,
                networks,
                labels,
                size_ranges,
                repeats,
            } => {
                if *networks == 0 || *repeats == 0 || size_ranges.is_empty() {
                    return Err(Error::Invalid(
                        "networks, repeats and size ranges must be non-empty".into(),
                    ));
                }
                spec.validate()?;
                for &(lo, hi) in size_ranges {
                    LabelSpec {
                        size_min: lo,
                        size_max: hi,
                        ..labels.clone()
                    }
                    .validate()?;
                }
                Ok(())
            }
            DataSource::Files { paths } => {
                if paths.is_empty() {
                    Err(Error::Invalid("no input files".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Geometry,
    pub mean_macro_aupr: f64,
    pub std_macro_aupr: f64,
    pub per_trial_macro_aupr: Vec<f64>,
    pub chosen_c: Vec<f64>,
    /// Classes excluded from at least one outer fold.
    pub excluded_classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub provenance: Value,
    pub points: usize,
    pub classes: usize,
    pub results: Vec<MethodSummary>,
}

/// Hyperbolic minus Euclidean, one pair per dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub hyperbolic_means: Vec<f64>,
    pub euclidean_means: Vec<f64>,
    pub differences: Vec<f64>,
    pub mean_difference: f64,
    pub std_difference: f64,
    /// One-sided test of hyperbolic > Euclidean; absent with fewer than 2 datasets.
    pub t_test: Option<PairedTTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    pub format: String,
    pub config: BenchmarkConfig,
    pub datasets: Vec<DatasetSummary>,
    pub method_means: Vec<(Geometry, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<Comparison>,
}

/// A benchmark input with its name and provenance record.
#[derive(Debug, Clone)]
pub struct NamedDataset {
    pub name: String,
    pub provenance: Value,
    pub data: LabeledDataset,
}

/// Generates or loads every dataset named by `config.source`.
pub fn load_datasets(config: &BenchmarkConfig) -> Result<Vec<NamedDataset>> {
    let seed = config.cv.seed;
    match &config.source {
        DataSource::Gaussian { spec, datasets } => (0..*datasets)
            .into_par_iter()
            .map(|i| {
                let spec = GaussianMixtureSpec {
                    seed: derive_seed(seed, &[GAUSSIAN_STREAM, i as u64]),
                    ..spec.clone()
                };
                let data = gen_gaussian_mixture(&spec)
                    .map_err(|e| e.context(format!("gaussian dataset {i}")))?;
                Ok(NamedDataset {
                    name: format!("gaussian-{i}"),
                    provenance: json!({ "generator": "gaussian", "spec": spec }),
                    data,
                })
            })
            .collect(),
        DataSource::Ps {
            spec,
            networks,
            labels,
            size_ranges,
            repeats,
        } => {
            let mut jobs = Vec::new();
            for n in 0..*networks {
                for (r, &range) in size_ranges.iter().enumerate() {
                    for q in 0..*repeats {
                        jobs.push((n, r, range, q));
                    }
                }
            }
            let nets = (0..*networks)
                .into_par_iter()
                .map(|n| ps_generate(spec, &mut child_rng(seed, &[NETWORK_STREAM, n as u64])))
                .collect::<Result<Vec<_>>>()?;
            jobs.into_par_iter()
                .map(|(n, r, (lo, hi), q)| {
                    let name = format!("ps-{n}-{lo}-{hi}-{q}");
                    let label_spec = LabelSpec {
                        size_min: lo,
                        size_max: hi,
                        ..labels.clone()
                    };
                    let mut rng = child_rng(seed, &[LABEL_STREAM, n as u64, r as u64, q as u64]);
                    let assignment = propagate_labels(&nets[n], &label_spec, &mut rng)
                        .map_err(|e| e.context(name.clone()))?;
                    Ok(NamedDataset {
                        provenance: json!({
                            "generator": "ps",
                            "network": n,
                            "spec": spec,
                            "labels": label_spec,
                            "repeat": q,
                        }),
                        data: ps_dataset(&nets[n], &assignment)?,
                        name,
                    })
                })
                .collect()
        }
        DataSource::Files { paths } => paths
            .iter()
            .map(|p| {
                let (data, meta) = read_dataset(p)?;
                Ok(NamedDataset {
                    name: p.display().to_string(),
                    provenance: json!({ "file": p, "metadata": meta }),
                    data,
                })
            })
            .collect(),
    }
}

/// Runs the full benchmark. The result depends only on `config`.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkSummary> {
    config.validate()?;
    let prepared = load_datasets(config)?;
    let datasets = prepared
        .par_iter()
        .map(|p| {
            let results = config
                .methods
                .iter()
                .map(|&method| {
                    let r = cross_validate(&p.data, method, &config.train, &config.cv)
                        .map_err(|e| e.context(format!("{} / {}", p.name, method.method_name())))?;
                    let mut excluded: Vec<String> = r
                        .folds
                        .iter()
                        .flat_map(|f| f.report.excluded_classes.iter().cloned())
                        .collect();
                    excluded.sort();
                    excluded.dedup();
                    Ok(MethodSummary {
                        method,
                        mean_macro_aupr: r.mean,
                        std_macro_aupr: r.std,
                        per_trial_macro_aupr: r.per_trial_macro_aupr,
                        chosen_c: r.chosen_c,
                        excluded_classes: excluded,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DatasetSummary {
                name: p.name.clone(),
                provenance: p.provenance.clone(),
                points: p.data.len(),
                classes: p.data.num_classes(),
                results,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let means_of = |g: Geometry| -> Option<Vec<f64>> {
        datasets
            .iter()
            .map(|d| {
                d.results
                    .iter()
                    .find(|r| r.method == g)
                    .map(|r| r.mean_macro_aupr)
            })
            .collect()
    };
    let method_means = config
        .methods
        .iter()
        .map(|&g| {
            let m = means_of(g).unwrap_or_default();
            (g, mean_std(&m).0)
        })
        .collect();
    let comparison = match (
        means_of(Geometry::Hyperbolic),
        means_of(Geometry::Euclidean),
    ) {
        (Some(h), Some(e)) if config.methods.len() == 2 => {
            let differences: Vec<f64> = h.iter().zip(&e).map(|(a, b)| a - b).collect();
            let (mean_difference, std_difference) = mean_std(&differences);
            let t_test = if h.len() >= 2 {
                Some(paired_t_test(&h, &e)?)
            } else {
                None
            };
            Some(Comparison {
                hyperbolic_means: h,
                euclidean_means: e,
                differences,
                mean_difference,
                std_difference,
                t_test,
            })
        }
        _ => None,
    };
    Ok(BenchmarkSummary {
        format: SUMMARY_FORMAT.into(),
        config: config.clone(),
        datasets,
        method_means,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(methods: Vec<Geometry>) -> BenchmarkConfig {
        BenchmarkConfig {
            source: DataSource::Gaussian {
                spec: GaussianMixtureSpec {
                    num_classes: 3,
                    points_per_class: 15,
                    ..Default::default()
                },
                datasets: 2,
            },
            methods,
            cv: CvConfig {
                trials: 2,
                ..Default::default()
            },
            train: TrainConfig {
                max_iters: 200,
                ..Default::default()
            },
            output: None,
        }
    }

    #[test]
    fn two_methods_give_comparison() {
        let s = run_benchmark(&small(vec![Geometry::Hyperbolic, Geometry::Euclidean])).unwrap();
        assert_eq!(s.datasets.len(), 2);
        let c = s.comparison.unwrap();
        assert_eq!(c.differences.len(), 2);
        assert!(c.t_test.is_some());
        for (d, diff) in s.datasets.iter().zip(&c.differences) {
            let h = d.results[0].mean_macro_aupr;
            let e = d.results[1].mean_macro_aupr;
            assert_eq!(*diff, h - e);
        }
    }

    #[test]
    fn single_method_has_no_comparison() {
        let s = run_benchmark(&small(vec![Geometry::Euclidean])).unwrap();
        assert!(s.comparison.is_none());
        assert_eq!(s.method_means.len(), 1);
    }

    #[test]
    fn validation() {
        assert!(run_benchmark(&small(vec![])).is_err());
        let mut c = small(vec![Geometry::Euclidean]);
        c.cv.folds = 1;
        assert!(run_benchmark(&c).is_err());
        let c = small(vec![Geometry::Euclidean, Geometry::Euclidean]);
        assert!(run_benchmark(&c).is_err());
    }

    #[test]
    fn ps_source_produces_dataset_per_range() {
        let config = BenchmarkConfig {
            source: DataSource::Ps {
                spec: PsSpec {
                    nodes: 120,
                    ..Default::default()
                },
                networks: 1,
                labels: LabelSpec {
                    num_labels: 3,
                    ..Default::default()
                },
                size_ranges: vec![(5, 20), (10, 40)],
                repeats: 1,
            },
            methods: vec![Geometry::Hyperbolic],
            cv: CvConfig {
                trials: 1,
                ..Default::default()
            },
            train: TrainConfig {
                max_iters: 100,
                ..Default::default()
            },
            output: None,
        };
        let s = run_benchmark(&config).unwrap();
        assert_eq!(s.datasets.len(), 2);
        assert!(s.datasets.iter().all(|d| d.points == 120 && d.classes == 3));
    }
}
