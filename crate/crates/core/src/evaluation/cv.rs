use std::time::Instant;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::budget::{seconds_to_us, us_to_seconds, Budget, Clock};
use crate::components::{fit_predictor, fit_preprocessor, Algorithm, Dataset};
use crate::configspace::{Assignment, Pipeline, PipelineDescriptor};
use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    Incomplete,
    Invalid,
}

/// One cross-validated pipeline evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub dataset: String,
    pub pipeline: PipelineDescriptor,
    pub predictor: String,
    pub fold_errors: Vec<f64>,
    /// Mean of `fold_errors`; absent when no fold finished.
    pub mean_error: Option<f64>,
    /// Charged time in seconds.
    pub wall_time: f64,
    pub status: Status,
}

impl EvaluationRecord {
    pub fn wall_time_us(&self) -> u64 {
        seconds_to_us(self.wall_time)
    }

    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }

    /// Record for a candidate rejected before any training.
    pub fn rejected(dataset: &str, pipeline: &Pipeline) -> Self {
        Self {
            dataset: dataset.to_string(),
            pipeline: pipeline.descriptor(),
            predictor: pipeline.predictor().id.clone(),
            fold_errors: Vec::new(),
            mean_error: None,
            wall_time: 0.0,
            status: Status::Invalid,
        }
    }
}

/// Assignment of every instance to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FoldPlan {
    k: usize,
    fold_of: Vec<usize>,
}

impl FoldPlan {
    /// Stratified partition: each class is shuffled with `seed` and dealt
    /// round-robin, continuing from where the previous class stopped.
    pub fn stratified(labels: &[usize], k: usize, seed: u64) -> Self {
        let k = k.clamp(1, labels.len().max(1));
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fold_of = vec![0; labels.len()];
        let mut offset = 0;
        for c in 0..n_classes {
            let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            members.shuffle(&mut rng);
            for (j, &i) in members.iter().enumerate() {
                fold_of[i] = (offset + j) % k;
            }
            offset += members.len();
        }
        Self { k, fold_of }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    /// Training and held-out indices for `fold`.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.fold_of.len()).partition(|&i| self.fold_of[i] != fold)
    }
}

struct FoldOutcome {
    cost_us: u64,
    error: Result<f64>,
}

fn resolve(pipeline: &Pipeline) -> Result<Vec<(Algorithm, &Assignment)>> {
    pipeline
        .components
        .iter()
        .zip(&pipeline.hyperparams)
        .map(|(c, hp)| {
            Algorithm::from_id(&c.id)
                .map(|a| (a, hp))
                .ok_or_else(|| Error::UnknownComponent(c.id.clone()))
        })
        .collect()
}

/// Runs one fold. Under the virtual clock the cost is known before the
/// predictor is trained, so a fold that cannot fit in `remaining_us` is
/// abandoned without training.
fn run_fold(
    chain: &[(Algorithm, &Assignment)],
    dataset: &Dataset,
    train: &[usize],
    test: &[usize],
    clock: Clock,
    remaining_us: u64,
    seed: u64,
) -> FoldOutcome {
    let start = Instant::now();
    let n_classes = dataset.n_classes();
    let mut xtr: Array2<f64> = dataset.features().select(Axis(0), train);
    let mut xte: Array2<f64> = dataset.features().select(Axis(0), test);
    let ytr: Vec<usize> = train.iter().map(|&i| dataset.labels()[i]).collect();
    let mut virtual_s = 0.0;
    let (&(predictor, phps), preprocessors) = chain.split_last().expect("non-empty pipeline");
    for &(algo, hp) in preprocessors {
        virtual_s += train.len() as f64 * algo.cost_per_instance(hp, xtr.ncols(), n_classes);
        match fit_preprocessor(algo, hp, &xtr) {
            Ok(t) => {
                xtr = t.apply(&xtr);
                xte = t.apply(&xte);
            }
            Err(e) => {
                return FoldOutcome {
                    cost_us: seconds_to_us(virtual_s).max(1),
                    error: Err(e),
                }
            }
        }
    }
    virtual_s += train.len() as f64 * predictor.cost_per_instance(phps, xtr.ncols(), n_classes);
    let virtual_us = seconds_to_us(virtual_s).max(1);
    if clock == Clock::Virtual && virtual_us > remaining_us {
        return FoldOutcome {
            cost_us: virtual_us,
            error: Err(Error::BudgetExhausted),
        };
    }
    let error = fit_predictor(predictor, phps, &xtr, &ytr, n_classes, seed).and_then(|m| {
        let pred = m.predict(xte.view())?;
        let wrong = pred.iter().zip(test).filter(|(p, &i)| **p != dataset.labels()[i]).count();
        Ok(wrong as f64 / test.len().max(1) as f64)
    });
    let cost_us = match clock {
        Clock::Virtual => virtual_us,
        Clock::Wall => (start.elapsed().as_micros() as u64).max(1),
    };
    FoldOutcome { cost_us, error }
}

/// k-fold cross-validation of `pipeline` on a given partition, charging
/// every fold to `budget`.
pub fn cross_validate_with(
    pipeline: &Pipeline,
    dataset: &Dataset,
    plan: &FoldPlan,
    budget: &mut Budget,
    clock: Clock,
    seed: u64,
) -> Result<EvaluationRecord> {
    if budget.is_exhausted() {
        return Err(Error::BudgetExhausted);
    }
    let chain = resolve(pipeline)?;
    let mut record = EvaluationRecord {
        dataset: dataset.name().to_string(),
        pipeline: pipeline.descriptor(),
        predictor: pipeline.predictor().id.clone(),
        fold_errors: Vec::with_capacity(plan.k()),
        mean_error: None,
        wall_time: 0.0,
        status: Status::Complete,
    };
    let mut spent = 0u64;
    for fold in 0..plan.k() {
        let (train, test) = plan.split(fold);
        let fold_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(fold as u64);
        let outcome = run_fold(&chain, dataset, &train, &test, clock, budget.remaining_us(), fold_seed);
        let before = budget.consumed_us();
        let fitted = budget.charge_us(outcome.cost_us);
        spent += budget.consumed_us() - before;
        match outcome.error {
            Ok(e) if fitted => record.fold_errors.push(e),
            Ok(_) | Err(Error::BudgetExhausted) => {
                record.status = Status::Incomplete;
                break;
            }
            Err(_) => {
                record.status = Status::Invalid;
                break;
            }
        }
    }
    if !record.fold_errors.is_empty() {
        record.mean_error = Some(record.fold_errors.iter().sum::<f64>() / record.fold_errors.len() as f64);
    }
    record.wall_time = us_to_seconds(spent);
    Ok(record)
}

/// Cross-validation with a fresh stratified partition derived from `seed`.
pub fn cross_validate(
    pipeline: &Pipeline,
    dataset: &Dataset,
    folds: usize,
    budget: &mut Budget,
    clock: Clock,
    seed: u64,
) -> Result<EvaluationRecord> {
    let plan = FoldPlan::stratified(dataset.labels(), folds, seed);
    cross_validate_with(pipeline, dataset, &plan, budget, clock, seed)
}

/// Deducts landmarker time from `budget`. The flag is set when the
/// deduction did not fit and the budget was clamped to exhausted.
pub fn charge_landmarkers(budget: &Budget, records: &[EvaluationRecord]) -> (Budget, bool) {
    let mut out = *budget;
    let total: u64 = records.iter().map(EvaluationRecord::wall_time_us).sum();
    let fitted = out.charge_us(total);
    (out, !fitted)
}
