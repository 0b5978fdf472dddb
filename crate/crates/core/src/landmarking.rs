//! Relative landmarking: characterise a dataset by the errors of a few fast
//! predictors, match it to the prior dataset whose landmark errors correlate
//! best, and cull the configuration space to that dataset's best predictors.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::components::{Algorithm, ComponentPool, Dataset};
use crate::configspace::{build_tree, ConfigTree, Pipeline, StructureTemplate};
use crate::error::{Error, Result};
use crate::evaluation::{charge_landmarkers, check_validity, cross_validate, Budget, Clock, EvaluationRecord, Status};
use crate::metabase::{MetaKnowledgeBase, TopK, TopKMode};

/// Fewest shared landmarkers for a prior dataset to be comparable.
pub const MIN_COMMON_LANDMARKS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandmarkVector {
    pub entries: Vec<(String, Option<f64>)>,
}

impl LandmarkVector {
    pub fn from_values<S: AsRef<str>>(landmarkers: &[S], values: &[Option<f64>]) -> Self {
        Self {
            entries: landmarkers
                .iter()
                .map(|l| l.as_ref().to_string())
                .zip(values.iter().copied())
                .collect(),
        }
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|(_, v)| *v).collect()
    }

    /// Landmark errors of a prior dataset, read from its metabase cells.
    pub fn from_base<S: AsRef<str>>(base: &MetaKnowledgeBase, dataset: &str, landmarkers: &[S]) -> Self {
        Self {
            entries: landmarkers
                .iter()
                .map(|l| (l.as_ref().to_string(), base.cell(dataset, l.as_ref()).map(|c| c.mean_error)))
                .collect(),
        }
    }
}

fn common(a: &[Option<f64>], b: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    a.iter().zip(b).filter_map(|(x, y)| Some((((*x)?), (*y)?))).unzip()
}

/// Pearson correlation over the positions where both vectors have a value.
/// Undefined with fewer than two such positions or when either side is
/// constant there.
pub fn pearson(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let (x, y) = common(a, b);
    if x.len() < 2 {
        return None;
    }
    let constant = |v: &[f64]| v.iter().all(|e| *e == v[0]);
    if constant(&x) || constant(&y) {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(&y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// [`pearson`] with the stricter comparability rule used for matching.
pub fn similarity(a: &LandmarkVector, b: &LandmarkVector) -> Option<f64> {
    let (va, vb) = (a.values(), b.values());
    if common(&va, &vb).0.len() < MIN_COMMON_LANDMARKS {
        return None;
    }
    pearson(&va, &vb)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub coefficients: BTreeMap<String, Option<f64>>,
    pub chosen: Option<String>,
    pub tie_note: Option<String>,
}

/// A prior dataset's coefficient and its total evaluation count.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub dataset: String,
    pub coefficient: Option<f64>,
    pub evaluations: u64,
}

/// Highest coefficient wins; ties go to more evaluations, then to the
/// lexicographically smaller name.
pub fn most_similar(candidates: &[Candidate]) -> Result<(String, Option<String>)> {
    let defined: Vec<(&Candidate, f64)> = candidates.iter().filter_map(|c| c.coefficient.map(|v| (c, v))).collect();
    let best = defined.iter().map(|&(_, v)| v).reduce(f64::max).ok_or(Error::NoComparableDataset)?;
    let mut tied: Vec<&Candidate> = defined.iter().filter(|&&(_, v)| v == best).map(|&(c, _)| c).collect();
    tied.sort_by(|a, b| b.evaluations.cmp(&a.evaluations).then(a.dataset.cmp(&b.dataset)));
    let chosen = tied[0].dataset.clone();
    let note = (tied.len() > 1).then(|| {
        let names: Vec<&str> = tied.iter().map(|c| c.dataset.as_str()).collect();
        format!(
            "coefficient {best} shared by {}; chose `{chosen}` by evaluation count then name",
            names.join(", ")
        )
    });
    Ok((chosen, note))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkRun {
    pub vector: LandmarkVector,
    pub records: Vec<EvaluationRecord>,
    /// The input budget after deducting landmarker time.
    pub budget: Budget,
    /// Landmarkers that needed imputation prepended to be valid.
    pub imputed: Vec<String>,
    /// Set when the budget ran out before every landmarker finished.
    pub exhausted: bool,
}

fn landmark_tree(landmarkers: &[String]) -> Result<ConfigTree> {
    let pool = ComponentPool::with_predictors(landmarkers)?;
    let defs: Vec<_> = pool
        .defs()
        .into_iter()
        .filter(|d| d.component.is_predictor() || d.component.id == Algorithm::Impute.id())
        .collect();
    build_tree(&defs, &StructureTemplate::new(vec![vec![Algorithm::Impute.id().to_string()]]))
}

/// Runs every landmarker at its default hyperparameters as a one-component
/// pipeline, then deducts the total time from `budget`.
pub fn evaluate_landmarkers<S: AsRef<str>>(
    landmarkers: &[S],
    dataset: &Dataset,
    budget: &Budget,
    folds: usize,
    clock: Clock,
    seed: u64,
) -> Result<LandmarkRun> {
    if landmarkers.is_empty() {
        return Err(Error::Config("no landmarkers given".into()));
    }
    let ids: Vec<String> = landmarkers.iter().map(|l| l.as_ref().to_string()).collect();
    let tree = landmark_tree(&ids)?;
    let mut scratch = budget.remainder();
    let mut values = Vec::with_capacity(ids.len());
    let mut records = Vec::new();
    let mut imputed = Vec::new();
    let mut exhausted = false;
    for id in &ids {
        let path = |chain: &[&str]| -> Pipeline { tree.default_pipeline(tree.find_path(chain).expect("landmark tree holds every chain")) };
        let mut pipeline = path(&[id]);
        if !check_validity(&pipeline, dataset).is_valid() {
            pipeline = path(&[Algorithm::Impute.id(), id]);
            imputed.push(id.clone());
        }
        if scratch.is_exhausted() {
            exhausted = true;
            values.push(None);
            continue;
        }
        let record = cross_validate(&pipeline, dataset, folds, &mut scratch, clock, seed)?;
        exhausted |= record.status == Status::Incomplete;
        values.push(record.mean_error.filter(|_| record.is_complete()));
        records.push(record);
    }
    let (budget, over) = charge_landmarkers(budget, &records);
    Ok(LandmarkRun {
        vector: LandmarkVector::from_values(&ids, &values),
        records,
        budget,
        imputed,
        exhausted: exhausted || over,
    })
}

/// Correlates `query` with every dataset in `base`.
pub fn similarity_report<S: AsRef<str>>(
    base: &MetaKnowledgeBase,
    query: &LandmarkVector,
    landmarkers: &[S],
) -> (SimilarityReport, Result<String>) {
    let candidates: Vec<Candidate> = base
        .datasets()
        .map(|d| Candidate {
            dataset: d.to_string(),
            coefficient: similarity(query, &LandmarkVector::from_base(base, d, landmarkers)),
            evaluations: base.evaluations(d),
        })
        .collect();
    let chosen = most_similar(&candidates);
    let report = SimilarityReport {
        coefficients: candidates.iter().map(|c| (c.dataset.clone(), c.coefficient)).collect(),
        chosen: chosen.as_ref().ok().map(|(d, _)| d.clone()),
        tie_note: chosen.as_ref().ok().and_then(|(_, n)| n.clone()),
    };
    (report, chosen.map(|(d, _)| d))
}

#[derive(Debug, Clone)]
pub struct DesignedSpace {
    pub tree: ConfigTree,
    pub report: SimilarityReport,
    pub landmarks: LandmarkRun,
    /// Predictors kept; `None` when no prior dataset was comparable and the
    /// space was left uncut.
    pub top_k: Option<TopK>,
}

impl DesignedSpace {
    pub fn budget(&self) -> Budget {
        self.landmarks.budget
    }

    pub fn fell_back(&self) -> bool {
        self.top_k.is_none()
    }
}

/// Settings for [`design_space`].
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSettings {
    pub landmarkers: Vec<String>,
    pub k: usize,
    pub folds: usize,
    pub clock: Clock,
}

/// Culls `tree` to the `k` best predictors of the prior dataset most similar
/// to `dataset`. Records of `dataset` itself are never consulted.
pub fn design_space(
    base: &MetaKnowledgeBase,
    tree: &ConfigTree,
    dataset: &Dataset,
    settings: &LandmarkSettings,
    budget: &Budget,
    seed: u64,
) -> Result<DesignedSpace> {
    let (prior, _) = base.leave_one_out(dataset.name());
    let landmarks = evaluate_landmarkers(&settings.landmarkers, dataset, budget, settings.folds, settings.clock, seed)?;
    let (report, chosen) = similarity_report(&prior, &landmarks.vector, &settings.landmarkers);
    let mut tree = tree.clone();
    let top_k = match chosen {
        Ok(d) => {
            let top = prior.top_k(&TopKMode::Landmarked(d), settings.k)?;
            let keep: Vec<&str> = top
                .predictors
                .iter()
                .map(String::as_str)
                .filter(|p| tree.component(p).is_some())
                .collect();
            tree.deactivate_predictors(&keep)?;
            Some(top)
        }
        Err(Error::NoComparableDataset) => None,
        Err(e) => return Err(e),
    };
    Ok(DesignedSpace {
        tree,
        report,
        landmarks,
        top_k,
    })
}
