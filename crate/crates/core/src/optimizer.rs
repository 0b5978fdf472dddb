//! Incumbent-neighbourhood sequential model-based optimization over the
//! active subspace of a configuration tree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::components::Dataset;
use crate::configspace::{ConfigTree, Pipeline, PipelineDescriptor};
use crate::error::{Error, Result};
use crate::evaluation::{check_validity, cross_validate_with, Budget, Clock, EvaluationRecord, FoldPlan, Status, DEFAULT_FOLDS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerPolicy {
    pub explore_probability: f64,
    pub incumbent_count: usize,
    /// Restricts the search to one structure; the first candidate uses the
    /// schema defaults.
    pub structure_fixed: Option<PipelineDescriptor>,
    pub validity_check: bool,
    pub folds: usize,
    pub clock: Clock,
    /// Stops after this many evaluations even if budget remains.
    pub max_evaluations: Option<usize>,
    /// Stops after this many consecutive candidates rejected by the validity check.
    pub max_rejections: usize,
}

impl Default for OptimizerPolicy {
    fn default() -> Self {
        Self {
            explore_probability: 0.3,
            incumbent_count: 5,
            structure_fixed: None,
            validity_check: true,
            folds: DEFAULT_FOLDS,
            clock: Clock::Virtual,
            max_evaluations: None,
            max_rejections: 1000,
        }
    }
}

impl OptimizerPolicy {
    pub fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.explore_probability) {
            return Err(Error::Config("explore probability must lie in [0, 1]".into()));
        }
        if self.incumbent_count == 0 {
            return Err(Error::Config("incumbent count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    Incomplete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Option<EvaluationRecord>,
    pub log: Vec<EvaluationRecord>,
    pub status: RunStatus,
    pub budget: Budget,
    /// Candidates rejected by the validity check (never evaluated).
    pub rejected: usize,
}

impl RunResult {
    fn empty(budget: Budget) -> Self {
        Self {
            best: None,
            log: Vec::new(),
            status: RunStatus::Incomplete,
            budget,
            rejected: 0,
        }
    }
}

/// Perturbs exactly one active hyperparameter of a randomly chosen incumbent.
/// Incumbents without hyperparameters are returned unchanged.
pub fn propose_exploit<R: Rng + ?Sized>(tree: &ConfigTree, incumbents: &[Pipeline], rng: &mut R) -> Pipeline {
    assert!(!incumbents.is_empty(), "exploitation needs an incumbent");
    let base = &incumbents[rng.gen_range(0..incumbents.len())];
    let mut slots = Vec::new();
    for (pos, (node, hp)) in base.structure.iter().zip(&base.hyperparams).enumerate() {
        let schema = &tree.node(*node).schema;
        for name in schema.active_names(hp) {
            slots.push((pos, name.to_string()));
        }
    }
    let mut out = base.clone();
    if slots.is_empty() {
        return out;
    }
    let (pos, name) = &slots[rng.gen_range(0..slots.len())];
    let schema = &tree.node(base.structure[*pos]).schema;
    out.hyperparams[*pos] = schema.perturb_one(&base.hyperparams[*pos], name, rng);
    out
}

pub fn propose_explore<R: Rng + ?Sized>(tree: &ConfigTree, rng: &mut R) -> Result<Pipeline> {
    tree.sample_pipeline(rng)
}

/// Best complete records, ascending by mean error; earlier records win ties.
struct Incumbents {
    cap: usize,
    entries: Vec<(f64, usize, Pipeline)>,
}

impl Incumbents {
    fn offer(&mut self, error: f64, order: usize, p: Pipeline) {
        let at = self.entries.partition_point(|(e, o, _)| (*e, *o) <= (error, order));
        if at < self.cap {
            self.entries.insert(at, (error, order, p));
            self.entries.truncate(self.cap);
        }
    }

    fn pipelines(&self) -> Vec<Pipeline> {
        self.entries.iter().map(|(_, _, p)| p.clone()).collect()
    }
}

/// Minimum mean-error complete record; the earliest wins ties.
pub fn best_record(log: &[EvaluationRecord]) -> Option<&EvaluationRecord> {
    log.iter()
        .filter(|r| r.is_complete())
        .fold(None, |best: Option<&EvaluationRecord>, r| match best {
            Some(b) if b.mean_error <= r.mean_error => Some(b),
            _ => Some(r),
        })
}

/// Searches until the budget (or the evaluation cap) is used up.
pub fn run(tree: &ConfigTree, dataset: &Dataset, budget: Budget, policy: &OptimizerPolicy, seed: u64) -> RunResult {
    let mut budget = budget;
    if policy.check().is_err() {
        return RunResult::empty(budget);
    }
    let fixed = match &policy.structure_fixed {
        Some(d) => match tree.find_path(&d.components) {
            Some(s) => Some(s),
            None => return RunResult::empty(budget),
        },
        None => {
            if tree.active_leaves().is_empty() {
                return RunResult::empty(budget);
            }
            None
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = FoldPlan::stratified(dataset.labels(), policy.folds, seed);
    let mut incumbents = Incumbents {
        cap: policy.incumbent_count,
        entries: Vec::new(),
    };
    let mut result = RunResult::empty(budget);
    let mut rejections = 0;
    let mut first = true;
    while !budget.is_exhausted() && policy.max_evaluations.is_none_or(|m| result.log.len() < m) {
        let explore = incumbents.entries.is_empty() || rng.gen_bool(policy.explore_probability);
        let candidate = match (&fixed, first) {
            (Some(s), true) => tree.default_pipeline(s.clone()),
            _ if !explore => propose_exploit(tree, &incumbents.pipelines(), &mut rng),
            (Some(s), false) => tree.sample_hyperparams(s.clone(), &mut rng),
            (None, _) => match propose_explore(tree, &mut rng) {
                Ok(p) => p,
                Err(_) => break,
            },
        };
        first = false;
        if policy.validity_check && !check_validity(&candidate, dataset).is_valid() {
            result.rejected += 1;
            rejections += 1;
            if rejections >= policy.max_rejections {
                break;
            }
            continue;
        }
        rejections = 0;
        let eval_seed = rng.gen();
        let Ok(record) = cross_validate_with(&candidate, dataset, &plan, &mut budget, policy.clock, eval_seed) else {
            break;
        };
        if record.status == Status::Complete {
            incumbents.offer(record.mean_error.unwrap_or(1.0), result.log.len(), candidate);
        }
        result.log.push(record);
    }
    result.best = best_record(&result.log).cloned();
    result.status = if result.best.is_some() {
        RunStatus::Complete
    } else {
        RunStatus::Incomplete
    };
    result.budget = budget;
    result
}
