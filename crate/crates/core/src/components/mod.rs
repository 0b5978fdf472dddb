//! Datasets, preprocessors and predictors.

mod cart;
mod dataset;
pub mod predictors;
mod preprocess;
mod registry;

pub use cart::{Criterion, DecisionTree, TreeParams};
pub use dataset::Dataset;
pub use predictors::Model;
pub use preprocess::{subset_size, ImputeStrategy, Transform};
pub use registry::{apply_preprocessor, fit, fit_predictor, fit_preprocessor, Algorithm, ComponentPool, TrainedModel, LANDMARKERS};

/// Index of the first maximum.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
