use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scenario::{ScenarioSpec, STANDARD_KS};
use crate::components::{ComponentPool, Dataset};
use crate::error::{Error, Result};
use crate::evaluation::{Clock, DEFAULT_FOLDS};
use crate::optimizer::OptimizerPolicy;

/// Search settings shared by every scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSettings {
    pub explore_probability: f64,
    pub incumbent_count: usize,
    pub max_rejections: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        let p = OptimizerPolicy::default();
        Self {
            explore_probability: p.explore_probability,
            incumbent_count: p.incumbent_count,
            max_rejections: p.max_rejections,
        }
    }
}

/// An experiment description, usually read from TOML. Relative paths are
/// resolved against the directory holding the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<PathBuf>,
    /// Label column name; the last column when omitted.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_scenarios")]
    pub scenarios: Vec<ScenarioSpec>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Seconds per optimizer run.
    pub budget: f64,
    /// Seconds per bootstrap run; defaults to `budget`.
    #[serde(default)]
    pub bootstrap_budget: Option<f64>,
    /// Explore probability of bootstrap runs; defaults to the search setting.
    #[serde(default)]
    pub bootstrap_explore_probability: Option<f64>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Metabase file; defaults to `<output>/bootstrap/metabase.tsv`.
    #[serde(default)]
    pub metabase: Option<PathBuf>,
    #[serde(default)]
    pub clock: Clock,
    /// Predictor subset of the built-in pool; all twelve when omitted.
    #[serde(default)]
    pub predictors: Option<Vec<String>>,
    /// Landmarker ids; the five fastest predictors of the metabase when omitted.
    #[serde(default)]
    pub landmarkers: Option<Vec<String>>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Write one evaluation log per optimizer run.
    #[serde(default = "default_true")]
    pub write_logs: bool,
    #[serde(default)]
    pub search: SearchSettings,
}

fn default_scenarios() -> Vec<ScenarioSpec> {
    ScenarioSpec::standard_set(&STANDARD_KS)
}

fn default_repeats() -> usize {
    5
}

fn default_folds() -> usize {
    DEFAULT_FOLDS
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_alpha() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    pub fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        self.datasets.iter_mut().for_each(fix);
        fix(&mut self.output);
        if let Some(m) = self.metabase.as_mut() {
            fix(m);
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if !(self.budget > 0.0) {
            return Err(Error::Config("budget must be positive".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config("at least two folds are needed".into()));
        }
        if self.scenarios.is_empty() {
            return Err(Error::Config("no scenarios".into()));
        }
        let probabilities = [Some(self.search.explore_probability), self.bootstrap_explore_probability];
        if probabilities.into_iter().flatten().any(|p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Config("explore probability must lie in [0, 1]".into()));
        }
        self.pool()?;
        Ok(())
    }

    pub fn pool(&self) -> Result<ComponentPool> {
        match &self.predictors {
            Some(p) => ComponentPool::with_predictors(p),
            None => Ok(ComponentPool::standard()),
        }
    }

    pub fn bootstrap_budget(&self) -> f64 {
        self.bootstrap_budget.unwrap_or(self.budget)
    }

    pub fn bootstrap_policy(&self) -> OptimizerPolicy {
        OptimizerPolicy {
            explore_probability: self.bootstrap_explore_probability.unwrap_or(self.search.explore_probability),
            ..self.policy(true)
        }
    }

    pub fn metabase_path(&self) -> PathBuf {
        self.metabase
            .clone()
            .unwrap_or_else(|| self.output.join("bootstrap").join("metabase.tsv"))
    }

    pub fn policy(&self, validity_check: bool) -> OptimizerPolicy {
        OptimizerPolicy {
            explore_probability: self.search.explore_probability,
            incumbent_count: self.search.incumbent_count,
            max_rejections: self.search.max_rejections,
            validity_check,
            folds: self.folds,
            clock: self.clock,
            ..OptimizerPolicy::default()
        }
    }

    /// Loads every dataset, collecting failures instead of stopping.
    pub fn load_datasets(&self) -> (Vec<Dataset>, Vec<(PathBuf, String)>) {
        let mut ok: Vec<Dataset> = Vec::new();
        let mut failed = Vec::new();
        for path in &self.datasets {
            match Dataset::from_csv(path, self.label.as_deref()) {
                Ok(d) if ok.iter().any(|o| o.name() == d.name()) => {
                    failed.push((path.clone(), format!("duplicate dataset name `{}`", d.name())))
                }
                Ok(d) => ok.push(d),
                Err(e) => failed.push((path.clone(), e.to_string())),
            }
        }
        (ok, failed)
    }
}
