use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::scenario::{Mode, ScenarioSpec};
use crate::analysis::{analyse, export, AnalysisBundle, ErrorTable};
use crate::components::Dataset;
use crate::configspace::{build_tree, ConfigTree, PipelineDescriptor, StructureTemplate};
use crate::error::{Error, Result};
use crate::evaluation::{append_log, Budget, EvaluationRecord};
use crate::landmarking::{design_space, LandmarkSettings, SimilarityReport};
use crate::metabase::{MetaKnowledgeBase, TopKMode};
use crate::optimizer::{run, RunStatus};

/// Number of landmarkers taken from the fastest predictors when the
/// configuration does not name them.
pub const LANDMARKER_COUNT: usize = 5;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable seed for a named sub-task of a master seed.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64 ^ splitmix64(master);
    for p in parts {
        for b in p.bytes().chain(std::iter::once(0xFF)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    splitmix64(h)
}

fn full_tree(config: &ExperimentConfig) -> Result<ConfigTree> {
    build_tree(&config.pool()?.defs(), &StructureTemplate::default())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRun {
    pub dataset: String,
    pub status: RunStatus,
    pub evaluations: usize,
    pub best_error: Option<f64>,
}

/// Prior experience: one full-space run per dataset, ingested into a base.
#[derive(Debug, Clone)]
pub struct Bootstrap {
    pub base: MetaKnowledgeBase,
    /// Best pipeline of every complete run, used by the r30 setting.
    pub best: BTreeMap<String, PipelineDescriptor>,
    pub runs: Vec<BootstrapRun>,
    pub logs: Vec<(String, Vec<EvaluationRecord>)>,
}

pub const BEST_PIPELINES_FILE: &str = "best_pipelines.json";

pub fn bootstrap(config: &ExperimentConfig, datasets: &[Dataset]) -> Result<Bootstrap> {
    let tree = full_tree(config)?;
    let policy = config.bootstrap_policy();
    let budget = Budget::from_seconds(config.bootstrap_budget());
    let results: Vec<_> = datasets
        .par_iter()
        .map(|d| {
            let seed = derive_seed(config.seed, &["bootstrap", d.name()]);
            (d.name().to_string(), run(&tree, d, budget, &policy, seed))
        })
        .collect();
    let pool = config.pool()?;
    let ids: Vec<&str> = pool.predictors().iter().map(|a| a.id()).collect();
    let mut base = MetaKnowledgeBase::new().with_predictors(&ids);
    let mut best = BTreeMap::new();
    let mut runs = Vec::new();
    let mut logs = Vec::new();
    for (name, r) in results {
        base.extend(&r.log);
        if let Some(b) = &r.best {
            best.insert(name.clone(), b.pipeline.clone());
        }
        runs.push(BootstrapRun {
            dataset: name.clone(),
            status: r.status,
            evaluations: r.log.len(),
            best_error: r.best.as_ref().and_then(|b| b.mean_error),
        });
        logs.push((name, r.log));
    }
    Ok(Bootstrap { base, best, runs, logs })
}

pub fn write_bootstrap(b: &Bootstrap, config: &ExperimentConfig, skipped: &[(std::path::PathBuf, String)]) -> Result<()> {
    let dir = config.output.join("bootstrap");
    create_dir(&dir)?;
    let base_path = config.metabase_path();
    if let Some(parent) = base_path.parent() {
        create_dir(parent)?;
    }
    b.base.save(&base_path)?;
    write_json(&dir.join(BEST_PIPELINES_FILE), &b.best)?;
    let skipped: Vec<(String, String)> = skipped.iter().map(|(p, e)| (p.display().to_string(), e.clone())).collect();
    write_json(
        &dir.join("summary.json"),
        &serde_json::json!({ "runs": b.runs, "skipped_datasets": skipped }),
    )?;
    if config.write_logs {
        let logs = dir.join("logs");
        create_dir(&logs)?;
        for (name, log) in &b.logs {
            let path = logs.join(format!("{name}.jsonl"));
            if path.exists() {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            }
            append_log(&path, log)?;
        }
    }
    Ok(())
}

/// Reads the metabase and the best bootstrap pipelines named by `config`.
pub fn load_bootstrap(config: &ExperimentConfig) -> Result<(MetaKnowledgeBase, BTreeMap<String, PipelineDescriptor>)> {
    let base = MetaKnowledgeBase::load(config.metabase_path())?;
    let best_path = config.output.join("bootstrap").join(BEST_PIPELINES_FILE);
    let best = if best_path.exists() {
        read_json(&best_path)?
    } else {
        BTreeMap::new()
    };
    Ok((base, best))
}

/// Outcome of one seeded optimizer run for a (setting, dataset) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub setting: String,
    pub dataset: String,
    pub repeat: usize,
    pub seed: u64,
    pub skipped: bool,
    pub status: RunStatus,
    pub best_error: Option<f64>,
    pub best_pipeline: Option<String>,
    pub predictors_kept: Option<Vec<String>>,
    pub evaluations: usize,
    pub rejected: usize,
    pub budget_us: u64,
    pub landmark_us: u64,
    pub optimizer_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandmarkAudit {
    pub setting: String,
    pub dataset: String,
    pub repeat: usize,
    pub landmarkers: Vec<String>,
    pub landmark_errors: Vec<Option<f64>>,
    pub imputed: Vec<String>,
    pub exhausted: bool,
    pub report: SimilarityReport,
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub table: ErrorTable,
    pub repeats: Vec<RepeatRecord>,
    pub audits: Vec<LandmarkAudit>,
    pub notes: Vec<String>,
    pub logs: Vec<((usize, usize, usize), Vec<EvaluationRecord>)>,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    tree: ConfigTree,
    base: &'a MetaKnowledgeBase,
    best: &'a BTreeMap<String, PipelineDescriptor>,
    /// Leave-one-out view of the base for each dataset.
    priors: Vec<MetaKnowledgeBase>,
    landmarkers: Vec<Vec<String>>,
}

struct JobOutput {
    record: RepeatRecord,
    log: Vec<EvaluationRecord>,
    audit: Option<LandmarkAudit>,
    note: Option<String>,
}

fn cull(tree: &ConfigTree, keep: &[String]) -> Result<ConfigTree> {
    let mut t = tree.clone();
    let keep: Vec<&str> = keep.iter().map(String::as_str).filter(|p| t.component(p).is_some()).collect();
    t.deactivate_predictors(&keep)?;
    Ok(t)
}

fn run_job(ctx: &Context, dataset: &Dataset, d: usize, scenario: &ScenarioSpec, repeat: usize) -> Result<JobOutput> {
    let config = ctx.config;
    let seed = derive_seed(config.seed, &["run", dataset.name(), &repeat.to_string()]);
    let budget = Budget::from_seconds(config.budget);
    let mut policy = config.policy(scenario.validity_check());
    let mut record = RepeatRecord {
        setting: scenario.name.clone(),
        dataset: dataset.name().to_string(),
        repeat,
        seed,
        skipped: false,
        status: RunStatus::Incomplete,
        best_error: None,
        best_pipeline: None,
        predictors_kept: None,
        evaluations: 0,
        rejected: 0,
        budget_us: budget.total_us(),
        landmark_us: 0,
        optimizer_us: 0,
    };
    let skip = |mut record: RepeatRecord, why: String| {
        record.skipped = true;
        Ok(JobOutput {
            record,
            log: Vec::new(),
            audit: None,
            note: Some(why),
        })
    };
    let mut audit = None;
    let mut note = None;
    let (tree, start) = match scenario.mode {
        Mode::Baseline | Mode::Avatar => (ctx.tree.clone(), budget),
        Mode::R30 => match ctx.best.get(dataset.name()) {
            Some(desc) => {
                policy.structure_fixed = Some(desc.clone());
                (ctx.tree.clone(), budget)
            }
            None => return skip(record, format!("{}: no bootstrap pipeline for `{}`", scenario, dataset.name())),
        },
        Mode::Global(k) => {
            if ctx.priors[d].is_empty() {
                return skip(record, format!("{}: no prior datasets for `{}`", scenario, dataset.name()));
            }
            let top = ctx.priors[d].top_k(&TopKMode::Global, k)?;
            record.predictors_kept = Some(top.predictors.clone());
            (cull(&ctx.tree, &top.predictors)?, budget)
        }
        Mode::Oracle(k) => match ctx.base.top_k(&TopKMode::Oracle(dataset.name().to_string()), k) {
            Ok(top) => {
                record.predictors_kept = Some(top.predictors.clone());
                (cull(&ctx.tree, &top.predictors)?, budget)
            }
            Err(Error::DatasetAbsent(_)) => return skip(record, format!("{}: `{}` absent from the metabase", scenario, dataset.name())),
            Err(e) => return Err(e),
        },
        Mode::Landmarked(k) => {
            let settings = LandmarkSettings {
                landmarkers: ctx.landmarkers[d].clone(),
                k,
                folds: config.folds,
                clock: config.clock,
            };
            let designed = design_space(&ctx.priors[d], &ctx.tree, dataset, &settings, &budget, seed)?;
            record.landmark_us = designed.budget().consumed_us();
            record.predictors_kept = designed.top_k.as_ref().map(|t| t.predictors.clone());
            if designed.fell_back() {
                note = Some(format!(
                    "{}: no comparable prior dataset for `{}`, space left uncut",
                    scenario,
                    dataset.name()
                ));
            }
            audit = Some(LandmarkAudit {
                setting: scenario.name.clone(),
                dataset: dataset.name().to_string(),
                repeat,
                landmarkers: settings.landmarkers.clone(),
                landmark_errors: designed.landmarks.vector.values(),
                imputed: designed.landmarks.imputed.clone(),
                exhausted: designed.landmarks.exhausted,
                report: designed.report.clone(),
                fallback: designed.fell_back(),
            });
            let b = designed.budget();
            (designed.tree, b)
        }
    };
    let result = run(&tree, dataset, start, &policy, seed);
    record.status = result.status;
    record.evaluations = result.log.len();
    record.rejected = result.rejected;
    record.optimizer_us = result.log.iter().map(EvaluationRecord::wall_time_us).sum();
    if let Some(b) = &result.best {
        record.best_error = b.mean_error;
        record.best_pipeline = Some(b.pipeline.to_string());
    }
    Ok(JobOutput {
        record,
        log: result.log,
        audit,
        note,
    })
}

/// Runs every (dataset, scenario, repeat) job and aggregates each cell as
/// the minimum best error over its repeats. All scenarios share the seed of
/// a given (dataset, repeat) pair.
pub fn run_experiment(
    config: &ExperimentConfig,
    datasets: &[Dataset],
    base: &MetaKnowledgeBase,
    best: &BTreeMap<String, PipelineDescriptor>,
) -> Result<ExperimentOutput> {
    config.check()?;
    let priors: Vec<MetaKnowledgeBase> = datasets.iter().map(|d| base.leave_one_out(d.name()).0).collect();
    let landmarkers = priors
        .iter()
        .map(|p| config.landmarkers.clone().unwrap_or_else(|| p.fastest_predictors(LANDMARKER_COUNT)))
        .collect();
    let ctx = Context {
        config,
        tree: full_tree(config)?,
        base,
        best,
        priors,
        landmarkers,
    };
    let jobs: Vec<(usize, usize, usize)> = (0..config.scenarios.len())
        .flat_map(|s| (0..datasets.len()).flat_map(move |d| (0..config.repeats).map(move |r| (s, d, r))))
        .collect();
    let outputs: Vec<Result<JobOutput>> = jobs
        .par_iter()
        .map(|&(s, d, r)| run_job(&ctx, &datasets[d], d, &config.scenarios[s], r))
        .collect();
    let mut table = ErrorTable::new(
        config.scenarios.iter().map(|s| s.name.clone()).collect(),
        datasets.iter().map(|d| d.name().to_string()).collect(),
    );
    let mut out = ExperimentOutput {
        table: table.clone(),
        repeats: Vec::with_capacity(jobs.len()),
        audits: Vec::new(),
        notes: Vec::new(),
        logs: Vec::new(),
    };
    for (&(s, d, r), job) in jobs.iter().zip(outputs) {
        let job = job?;
        if let Some(e) = job.record.best_error {
            let cell = table.get(s, d).map_or(e, |c| c.min(e));
            table.set(s, d, Some(cell));
        }
        if job.note.as_ref().is_some_and(|n| !out.notes.contains(n)) {
            out.notes.push(job.note.expect("checked"));
        }
        out.audits.extend(job.audit);
        out.repeats.push(job.record);
        out.logs.push(((s, d, r), job.log));
    }
    out.table = table;
    Ok(out)
}

pub const RUN_DIR: &str = "run";
pub const REPORT_DIR: &str = "report";

pub fn write_experiment(out: &ExperimentOutput, config: &ExperimentConfig) -> Result<()> {
    let dir = config.output.join(RUN_DIR);
    create_dir(&dir)?;
    let path = dir.join(crate::analysis::ERROR_TABLE_FILE);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    out.table.write_csv(file)?;
    write_json(&dir.join("repeats.json"), &out.repeats)?;
    write_json(&dir.join("landmarking.json"), &out.audits)?;
    write_json(&dir.join("notes.json"), &out.notes)?;
    if config.write_logs {
        for &((s, d, r), ref log) in &out.logs {
            let sub = dir.join("logs").join(&out.table.settings[s]);
            create_dir(&sub)?;
            let path = sub.join(format!("{}-r{r}.jsonl", out.table.datasets[d]));
            if path.exists() {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            }
            append_log(&path, log)?;
        }
    }
    Ok(())
}

/// Rank analysis of an error table, written to `dir`.
pub fn report(table: &ErrorTable, alpha: f64, dir: impl AsRef<Path>) -> Result<AnalysisBundle> {
    let (matrix, bundle) = analyse(table, alpha)?;
    export(table, &matrix, &bundle, dir)?;
    Ok(bundle)
}

/// Reads the error table written by [`write_experiment`].
pub fn read_error_table(config: &ExperimentConfig) -> Result<ErrorTable> {
    let path = config.output.join(RUN_DIR).join(crate::analysis::ERROR_TABLE_FILE);
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    ErrorTable::read_csv(file)
}
