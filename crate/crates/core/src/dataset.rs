//! Labeled point sets in a declared hyperbolic model.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallPoint, HalfSpacePoint, HyperboloidPoint};

/// Coordinate model a dataset's rows are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointModel {
    Ball,
    Hyperboloid,
    Halfspace,
}

impl PointModel {
    pub fn as_str(self) -> &'static str {
        match self {
            PointModel::Ball => "ball",
            PointModel::Hyperboloid => "hyperboloid",
            PointModel::Halfspace => "halfspace",
        }
    }

    /// Row length for intrinsic dimension `n`.
    pub fn row_len(self, n: usize) -> usize {
        match self {
            PointModel::Hyperboloid => n + 1,
            PointModel::Ball | PointModel::Halfspace => n,
        }
    }
}

/// Points plus per-point class memberships (multi-label capable).
///
/// `labels[j]` holds indices into `classes`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    model: PointModel,
    dim: usize,
    points: Vec<Vec<f64>>,
    classes: Vec<String>,
    labels: Vec<Vec<usize>>,
}

impl LabeledDataset {
    /// Validates every row against the model's invariants.
    pub fn new(
        model: PointModel,
        dim: usize,
        points: Vec<Vec<f64>>,
        classes: Vec<String>,
        labels: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        if points.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} points but {} label lists",
                points.len(),
                labels.len()
            )));
        }
        let unique: BTreeSet<&String> = classes.iter().collect();
        if unique.len() != classes.len() {
            return Err(Error::Invalid("duplicate class id".into()));
        }
        let row_len = model.row_len(dim);
        for row in &points {
            if row.len() != row_len {
                return Err(Error::Dimension {
                    expected: row_len,
                    got: row.len(),
                });
            }
            match model {
                PointModel::Ball => {
                    BallPoint::new(row.clone())?;
                }
                PointModel::Hyperboloid => {
                    HyperboloidPoint::new(row.clone())?;
                }
                PointModel::Halfspace => {
                    HalfSpacePoint::new(row.clone())?.to_ball()?;
                }
            }
        }
        let mut labels = labels;
        for l in &mut labels {
            l.sort_unstable();
            l.dedup();
            if let Some(&bad) = l.iter().find(|&&c| c >= classes.len()) {
                return Err(Error::Invalid(format!("label index {bad} out of range")));
            }
        }
        Ok(Self {
            model,
            dim,
            points,
            classes,
            labels,
        })
    }

    pub fn from_hyperboloid(
        points: Vec<HyperboloidPoint>,
        classes: Vec<String>,
        labels: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.dim())
            .ok_or(Error::Empty("points"))?;
        let rows = points
            .into_iter()
            .map(HyperboloidPoint::into_inner)
            .collect();
        Self::new(PointModel::Hyperboloid, dim, rows, classes, labels)
    }

    pub fn from_ball(
        points: Vec<BallPoint>,
        classes: Vec<String>,
        labels: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.dim())
            .ok_or(Error::Empty("points"))?;
        let rows = points.into_iter().map(BallPoint::into_inner).collect();
        Self::new(PointModel::Ball, dim, rows, classes, labels)
    }

    pub fn model(&self) -> PointModel {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    /// Membership mask of class `k` over all points.
    pub fn membership(&self, k: usize) -> Vec<bool> {
        self.labels
            .iter()
            .map(|l| l.binary_search(&k).is_ok())
            .collect()
    }

    pub fn positives(&self, k: usize) -> usize {
        self.labels
            .iter()
            .filter(|l| l.binary_search(&k).is_ok())
            .count()
    }

    /// Points converted to the hyperboloid.
    pub fn to_hyperboloid(&self) -> Result<Vec<HyperboloidPoint>> {
        self.points
            .iter()
            .map(|row| match self.model {
                PointModel::Hyperboloid => HyperboloidPoint::new(row.clone()),
                PointModel::Ball => Ok(BallPoint::new(row.clone())?.to_hyperboloid()),
                PointModel::Halfspace => HalfSpacePoint::new(row.clone())?.to_hyperboloid(),
            })
            .collect()
    }

    /// Points converted to the ball.
    pub fn to_ball(&self) -> Result<Vec<BallPoint>> {
        self.points
            .iter()
            .map(|row| match self.model {
                PointModel::Hyperboloid => Ok(HyperboloidPoint::new(row.clone())?.to_ball()),
                PointModel::Ball => BallPoint::new(row.clone()),
                PointModel::Halfspace => HalfSpacePoint::new(row.clone())?.to_ball(),
            })
            .collect()
    }

    /// Rows at `indices`, in that order, sharing the class list.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            model: self.model,
            dim: self.dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            classes: self.classes.clone(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}
