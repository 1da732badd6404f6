//! Maximum-margin classification in hyperbolic space.
//!
//! Points live on the hyperboloid `L^n` (or any of the conformal models in
//! [`geometry`]); a classifier is a space-like Minkowski vector `w` and
//! predicts `sign(w*x)`. Training minimizes the soft-margin objective
//! `-1/2 w*w + C sum max(0, arsinh(1) - arsinh(y (w*x)))` by projected
//! gradient descent, warm-started from a Euclidean linear SVM.
//!
//! The crate also carries the benchmark machinery: one-vs-all training with
//! Platt calibration, precision-recall evaluation with nested selection of
//! `C`, and generators for hyperbolic Gaussian mixtures and
//! popularity-similarity networks.

pub mod benchmark;
pub mod classifier;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod multiclass;
mod rng;
pub mod solver;
pub mod synth;

pub use classifier::{BinaryDecision, DecisionWeights};
pub use dataset::{LabeledDataset, PointModel};
pub use error::{Error, Result};
pub use geometry::{BallPoint, HalfSpacePoint, HyperboloidPoint};
pub use solver::{TrainConfig, TrainReport};
