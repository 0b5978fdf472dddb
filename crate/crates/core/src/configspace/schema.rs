//! Hyperparameter schemas with conditional entries.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratio at which a positive numeric domain is sampled log-uniformly.
const LOG_SCALE_RATIO: f64 = 1000.0;

/// Fraction of a continuous range covered by one exploit step in either direction.
const CONTINUOUS_STEP: f64 = 0.1;

/// A concrete hyperparameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HpValue {
    Int(i64),
    Float(f64),
    Cat(String),
}

impl HpValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            HpValue::Int(v) => Some(*v as f64),
            HpValue::Float(v) => Some(*v),
            HpValue::Cat(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            HpValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            HpValue::Cat(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for HpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HpValue::Int(v) => write!(f, "{v}"),
            HpValue::Float(v) => write!(f, "{v}"),
            HpValue::Cat(v) => f.write_str(v),
        }
    }
}

/// Values assigned to the active hyperparameters of one component.
pub type Assignment = BTreeMap<String, HpValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    Continuous { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    Categorical { values: Vec<String> },
}

impl Domain {
    /// Log-uniform sampling applies when a positive domain spans three or more
    /// orders of magnitude.
    pub fn is_log_scale(&self) -> bool {
        match *self {
            Domain::Continuous { lo, hi } => lo > 0.0 && hi / lo >= LOG_SCALE_RATIO,
            Domain::Integer { lo, hi } => lo > 0 && hi as f64 / lo as f64 >= LOG_SCALE_RATIO,
            Domain::Categorical { .. } => false,
        }
    }

    pub fn contains(&self, value: &HpValue) -> bool {
        match (self, value) {
            (Domain::Continuous { lo, hi }, HpValue::Float(v)) => v.is_finite() && lo <= v && v <= hi,
            // integral floats are accepted for continuous domains written as integers
            (Domain::Continuous { lo, hi }, HpValue::Int(v)) => *lo <= *v as f64 && *v as f64 <= *hi,
            (Domain::Integer { lo, hi }, HpValue::Int(v)) => lo <= v && v <= hi,
            (Domain::Categorical { values }, HpValue::Cat(v)) => values.iter().any(|c| c == v),
            _ => false,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HpValue {
        match self {
            &Domain::Continuous { lo, hi } => {
                if lo == hi {
                    HpValue::Float(lo)
                } else if self.is_log_scale() {
                    HpValue::Float(rng.gen_range(lo.ln()..=hi.ln()).exp().clamp(lo, hi))
                } else {
                    HpValue::Float(rng.gen_range(lo..=hi))
                }
            }
            &Domain::Integer { lo, hi } => {
                if self.is_log_scale() {
                    let x = rng.gen_range((lo as f64).ln()..(hi as f64 + 1.0).ln()).exp();
                    HpValue::Int((x.floor() as i64).clamp(lo, hi))
                } else {
                    HpValue::Int(rng.gen_range(lo..=hi))
                }
            }
            Domain::Categorical { values } => HpValue::Cat(values[rng.gen_range(0..values.len())].clone()),
        }
    }

    /// One local step from `value`: continuous moves by up to 10% of the range
    /// (in log space for log-scaled domains), integers by ±1, categoricals are
    /// resampled. Results are clamped into the domain.
    pub fn perturb<R: Rng + ?Sized>(&self, value: &HpValue, rng: &mut R) -> HpValue {
        match self {
            &Domain::Continuous { lo, hi } => {
                let x = value.as_f64().unwrap_or(lo);
                if lo == hi {
                    return HpValue::Float(lo);
                }
                let step = rng.gen_range(-CONTINUOUS_STEP..=CONTINUOUS_STEP);
                let next = if self.is_log_scale() {
                    (x.max(lo).ln() + step * (hi.ln() - lo.ln())).exp()
                } else {
                    x + step * (hi - lo)
                };
                HpValue::Float(next.clamp(lo, hi))
            }
            &Domain::Integer { lo, hi } => {
                let x = value.as_i64().unwrap_or(lo);
                let delta = if rng.gen_bool(0.5) { 1 } else { -1 };
                HpValue::Int((x + delta).clamp(lo, hi))
            }
            Domain::Categorical { .. } => self.sample(rng),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            Domain::Continuous { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo <= hi) => {
                Err(Error::Schema(format!("`{name}`: need finite lo <= hi")))
            }
            Domain::Integer { lo, hi } if lo > hi => Err(Error::Schema(format!("`{name}`: need lo <= hi"))),
            Domain::Categorical { values } if values.is_empty() => {
                Err(Error::Schema(format!("`{name}`: categorical domain has no values")))
            }
            _ => Ok(()),
        }
    }
}

/// Activates a hyperparameter only when a categorical parent takes `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub parent: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparamSpec {
    pub name: String,
    pub domain: Domain,
    pub default: HpValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
}

impl HyperparamSpec {
    pub fn new(name: impl Into<String>, domain: Domain, default: HpValue) -> Self {
        Self {
            name: name.into(),
            domain,
            default,
            condition: None,
        }
    }

    pub fn continuous(name: &str, lo: f64, hi: f64, default: f64) -> Self {
        Self::new(name, Domain::Continuous { lo, hi }, HpValue::Float(default))
    }

    pub fn integer(name: &str, lo: i64, hi: i64, default: i64) -> Self {
        Self::new(name, Domain::Integer { lo, hi }, HpValue::Int(default))
    }

    pub fn categorical(name: &str, values: &[&str], default: &str) -> Self {
        Self::new(
            name,
            Domain::Categorical {
                values: values.iter().map(|v| v.to_string()).collect(),
            },
            HpValue::Cat(default.to_string()),
        )
    }

    pub fn when(mut self, parent: &str, value: &str) -> Self {
        self.condition = Some(Condition {
            parent: parent.to_string(),
            value: value.to_string(),
        });
        self
    }
}

/// Ordered hyperparameter entries of one component.
///
/// Conditional entries are only active when their parent is active and set to
/// the conditioning value. Inactive entries never appear in an [`Assignment`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HyperparamSchema {
    entries: Vec<HyperparamSpec>,
    /// Entry indices with every parent before its children.
    order: Vec<usize>,
}

impl Serialize for HyperparamSchema {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HyperparamSchema {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<HyperparamSpec>::deserialize(deserializer)?;
        HyperparamSchema::new(entries).map_err(serde::de::Error::custom)
    }
}

impl HyperparamSchema {
    pub fn new(entries: Vec<HyperparamSpec>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.name.as_str(), i).is_some() {
                return Err(Error::Schema(format!("duplicate hyperparameter `{}`", e.name)));
            }
            e.domain.validate(&e.name)?;
            if !e.domain.contains(&e.default) {
                return Err(Error::Schema(format!("default of `{}` outside its domain", e.name)));
            }
        }
        for e in &entries {
            if let Some(cond) = &e.condition {
                let parent = index
                    .get(cond.parent.as_str())
                    .map(|&i| &entries[i])
                    .ok_or_else(|| Error::Schema(format!("`{}` conditioned on unknown `{}`", e.name, cond.parent)))?;
                if !parent.domain.contains(&HpValue::Cat(cond.value.clone())) {
                    return Err(Error::Schema(format!(
                        "`{}` conditioned on value `{}` not in the domain of `{}`",
                        e.name, cond.value, cond.parent
                    )));
                }
            }
        }

        // Topological order over the parent relation; leftovers form a cycle.
        let mut order = Vec::with_capacity(entries.len());
        let mut placed = vec![false; entries.len()];
        while order.len() < entries.len() {
            let before = order.len();
            for (i, e) in entries.iter().enumerate() {
                if placed[i] {
                    continue;
                }
                let ready = match &e.condition {
                    None => true,
                    Some(c) => placed[index[c.parent.as_str()]],
                };
                if ready {
                    placed[i] = true;
                    order.push(i);
                }
            }
            if order.len() == before {
                return Err(Error::Schema("cyclic conditional hyperparameters".into()));
            }
        }
        Ok(Self { entries, order })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[HyperparamSpec] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&HyperparamSpec> {
        self.entries.iter().find(|e| e.name == name)
    }

    fn condition_holds(spec: &HyperparamSpec, assigned: &Assignment) -> bool {
        match &spec.condition {
            None => true,
            Some(c) => matches!(assigned.get(&c.parent), Some(HpValue::Cat(v)) if *v == c.value),
        }
    }

    /// Builds an assignment entry by entry in dependency order.
    fn build(&self, mut value_for: impl FnMut(&HyperparamSpec) -> HpValue) -> Assignment {
        let mut out = Assignment::new();
        for &i in &self.order {
            let spec = &self.entries[i];
            if Self::condition_holds(spec, &out) {
                out.insert(spec.name.clone(), value_for(spec));
            }
        }
        out
    }

    pub fn defaults(&self) -> Assignment {
        self.build(|spec| spec.default.clone())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Assignment {
        self.build(|spec| spec.domain.sample(rng))
    }

    /// Keeps existing values of entries that remain active, fills newly active
    /// entries with defaults and drops inactive ones.
    pub fn repair(&self, assignment: &Assignment) -> Assignment {
        self.build(|spec| match assignment.get(&spec.name) {
            Some(v) if spec.domain.contains(v) => v.clone(),
            _ => spec.default.clone(),
        })
    }

    /// Checks that exactly the active entries are assigned, each within its domain.
    pub fn validate(&self, assignment: &Assignment) -> Result<()> {
        for name in assignment.keys() {
            if self.get(name).is_none() {
                return Err(Error::Schema(format!("unknown hyperparameter `{name}`")));
            }
        }
        for &i in &self.order {
            let spec = &self.entries[i];
            let active = Self::condition_holds(spec, assignment);
            match (active, assignment.get(&spec.name)) {
                (true, None) => return Err(Error::Schema(format!("active `{}` unassigned", spec.name))),
                (false, Some(_)) => return Err(Error::Schema(format!("inactive `{}` assigned", spec.name))),
                (true, Some(v)) if !spec.domain.contains(v) => {
                    return Err(Error::Schema(format!("`{}` = {v} outside its domain", spec.name)))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Names of the entries active under `assignment`, in declaration order.
    pub fn active_names<'a>(&'a self, assignment: &Assignment) -> Vec<&'a str> {
        self.entries
            .iter()
            .filter(|e| assignment.contains_key(&e.name))
            .map(|e| e.name.as_str())
            .collect()
    }

    /// Perturbs the single entry `name` and re-resolves conditional children.
    pub fn perturb_one<R: Rng + ?Sized>(&self, assignment: &Assignment, name: &str, rng: &mut R) -> Assignment {
        let mut next = assignment.clone();
        if let (Some(spec), Some(current)) = (self.get(name), assignment.get(name)) {
            next.insert(name.to_string(), spec.domain.perturb(current, rng));
        }
        self.repair(&next)
    }
}
