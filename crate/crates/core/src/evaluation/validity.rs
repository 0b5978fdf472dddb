//! Rule-based pipeline validity checks, evaluated without any training.

use std::collections::BTreeSet;
use std::fmt;

use crate::components::{subset_size, Algorithm, Dataset};
use crate::configspace::{Assignment, Pipeline};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    MissingValuesUnhandled { component: String },
    DuplicatePreprocessor { component: String },
    NoFeaturesLeft,
    UnknownComponent { component: String },
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::MissingValuesUnhandled { component } => {
                write!(f, "missing values unhandled (`{component}` needs complete data)")
            }
            InvalidReason::DuplicatePreprocessor { component } => write!(f, "duplicate preprocessor `{component}`"),
            InvalidReason::NoFeaturesLeft => f.write_str("feature subset leaves 0 features"),
            InvalidReason::UnknownComponent { component } => write!(f, "unknown component `{component}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Checks a component chain against a dataset.
pub fn check_components(components: &[(&str, &Assignment)], dataset: &Dataset) -> Validity {
    let mut seen = BTreeSet::new();
    let mut missing = dataset.has_missing();
    let mut n_features = dataset.n_features();
    let last = components.len().saturating_sub(1);
    for (pos, &(id, hp)) in components.iter().enumerate() {
        let Some(algo) = Algorithm::from_id(id) else {
            return Validity::Invalid(InvalidReason::UnknownComponent { component: id.into() });
        };
        if pos < last && !seen.insert(id) {
            return Validity::Invalid(InvalidReason::DuplicatePreprocessor { component: id.into() });
        }
        if missing && !algo.handles_missing() {
            return Validity::Invalid(InvalidReason::MissingValuesUnhandled { component: id.into() });
        }
        match algo {
            Algorithm::Impute => {
                n_features -= dataset.all_missing_columns().min(n_features);
                missing = false;
            }
            Algorithm::RandomSubset => {
                let fraction = hp.get("fraction").and_then(|v| v.as_f64()).unwrap_or(0.5);
                n_features = subset_size(n_features, fraction);
            }
            _ => {}
        }
        if n_features == 0 {
            return Validity::Invalid(InvalidReason::NoFeaturesLeft);
        }
    }
    Validity::Valid
}

pub fn check_validity(pipeline: &Pipeline, dataset: &Dataset) -> Validity {
    let chain: Vec<(&str, &Assignment)> = pipeline
        .components
        .iter()
        .zip(&pipeline.hyperparams)
        .map(|(c, hp)| (c.id.as_str(), hp))
        .collect();
    check_components(&chain, dataset)
}
