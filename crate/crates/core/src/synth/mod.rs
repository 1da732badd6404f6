//! Synthetic benchmark generators.

mod gaussian;
mod ps;

pub use gaussian::{
    gen_gaussian_clusters, gen_gaussian_mixture, sample_hyperbolic_gaussian, GaussianMixtureSpec,
};
pub use ps::{
    gen_ps_labeled, hyperbolic_embedding_of, propagate_labels, ps_dataset, ps_generate,
    LabelAssignment, LabelSpec, PsDistance, PsEdge, PsNetwork, PsNode, PsParams, PsSpec,
};
