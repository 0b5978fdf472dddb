use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use super::ranks::{ErrorTable, RankMatrix};
use super::stats::{Friedman, PairComparison};
use crate::error::{Error, Result};
use crate::metabase::MetaKnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    Baseline,
    R30,
    Avatar,
    Global,
    Landmarked,
    Oracle,
}

impl Family {
    /// Family of a setting named `baseline`, `avatar`, `r30`, `M-k<n>`,
    /// `L-k<n>` or `O-k<n>`.
    pub fn of(setting: &str) -> Option<Family> {
        match setting {
            "baseline" => Some(Family::Baseline),
            "avatar" => Some(Family::Avatar),
            "r30" => Some(Family::R30),
            s if s.starts_with("M-k") => Some(Family::Global),
            s if s.starts_with("L-k") => Some(Family::Landmarked),
            s if s.starts_with("O-k") => Some(Family::Oracle),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::Baseline => "baseline",
            Family::R30 => "r30",
            Family::Avatar => "avatar",
            Family::Global => "M-kn",
            Family::Landmarked => "L-kn",
            Family::Oracle => "O-kn",
        }
    }
}

/// Expected orderings, as (worse, better) pairs of families.
pub const EXPECTED_ORDER: [(Family, Family); 5] = [
    (Family::Baseline, Family::R30),
    (Family::Baseline, Family::Avatar),
    (Family::Avatar, Family::Global),
    (Family::Global, Family::Landmarked),
    (Family::Landmarked, Family::Oracle),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyCheck {
    pub worse: &'static str,
    pub better: &'static str,
    /// `None` when either family has no setting.
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub family_means: BTreeMap<&'static str, f64>,
    pub checks: Vec<HierarchyCheck>,
}

/// Averages the average ranks within each family and checks every expected
/// ordering. A larger rank is worse; a tie does not satisfy an ordering.
pub fn hierarchy_report(averages: &[(&str, f64)]) -> HierarchyReport {
    let mut groups: BTreeMap<Family, Vec<f64>> = BTreeMap::new();
    for &(name, avg) in averages {
        if let Some(f) = Family::of(name) {
            groups.entry(f).or_default().push(avg);
        }
    }
    let means: BTreeMap<Family, f64> = groups
        .into_iter()
        .map(|(f, v)| (f, v.iter().sum::<f64>() / v.len() as f64))
        .collect();
    let checks = EXPECTED_ORDER
        .iter()
        .map(|&(worse, better)| HierarchyCheck {
            worse: worse.label(),
            better: better.label(),
            satisfied: match (means.get(&worse), means.get(&better)) {
                (Some(w), Some(b)) => Some(w > b),
                _ => None,
            },
        })
        .collect();
    HierarchyReport {
        family_means: means.into_iter().map(|(f, m)| (f.label(), m)).collect(),
        checks,
    }
}

/// Predictor sets per dataset.
pub type CulledSets = BTreeMap<String, BTreeSet<String>>;

/// For each labelled collection of culled sets, counts the datasets whose
/// best-ranked predictor inside the culled set ranks at least as well as
/// the best one inside the reference set.
pub fn metric_k(base: &MetaKnowledgeBase, culled: &[(String, CulledSets)], reference: &CulledSets) -> Vec<(String, usize)> {
    let rows: Vec<_> = base.datasets().filter_map(|d| base.per_dataset_ranking(d).ok()).collect();
    let best_in = |row: &crate::metabase::RankRow, set: Option<&BTreeSet<String>>| -> Option<f64> {
        let set = set?;
        row.ranks.iter().filter(|(p, _)| set.contains(p)).map(|&(_, r)| r).reduce(f64::min)
    };
    culled
        .iter()
        .map(|(label, sets)| {
            let count = rows
                .iter()
                .filter(
                    |row| match (best_in(row, sets.get(&row.dataset)), best_in(row, reference.get(&row.dataset))) {
                        (Some(k), Some(r)) => k <= r,
                        (Some(_), None) => true,
                        _ => false,
                    },
                )
                .count();
            (label.clone(), count)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolinSeries {
    pub setting: String,
    pub ranks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalDifference {
    pub alpha: f64,
    pub cd: f64,
    pub pairs: Vec<PairComparison>,
}

/// Everything written by [`export`], in file field order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisBundle {
    pub settings: Vec<String>,
    pub datasets: Vec<String>,
    pub dropped_datasets: Vec<String>,
    pub average_ranks: Vec<f64>,
    pub friedman: Option<Friedman>,
    pub critical_difference: Option<CriticalDifference>,
    pub hierarchy: HierarchyReport,
    pub violin: Vec<ViolinSeries>,
    pub notes: Vec<String>,
}

/// Runs the full rank analysis of `table`. Steps whose preconditions fail
/// are replaced by a note.
pub fn analyse(table: &ErrorTable, alpha: f64) -> Result<(RankMatrix, AnalysisBundle)> {
    let matrix = super::rank_settings(table)?;
    let mut notes = Vec::new();
    for d in &matrix.dropped {
        notes.push(format!("dataset `{d}` dropped: some setting has no result"));
    }
    let friedman = match super::friedman(&matrix) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("Friedman test skipped: {e}"));
            None
        }
    };
    let critical_difference = if matrix.n_settings() < 3 {
        notes.push("insufficient settings for a critical-difference analysis".into());
        None
    } else if matrix.n_datasets() == 0 {
        notes.push("no complete dataset for a critical-difference analysis".into());
        None
    } else {
        match super::nemenyi_cd(matrix.n_settings(), matrix.n_datasets(), alpha) {
            Ok(cd) => Some(CriticalDifference {
                alpha,
                cd,
                pairs: super::pairwise_critical(&matrix, cd),
            }),
            Err(e) => {
                notes.push(format!("critical difference skipped: {e}"));
                None
            }
        }
    };
    let named: Vec<(&str, f64)> = matrix
        .settings
        .iter()
        .map(String::as_str)
        .zip(matrix.averages.iter().copied())
        .collect();
    let bundle = AnalysisBundle {
        settings: matrix.settings.clone(),
        datasets: matrix.datasets.clone(),
        dropped_datasets: matrix.dropped.clone(),
        average_ranks: matrix.averages.clone(),
        friedman,
        critical_difference,
        hierarchy: hierarchy_report(&named),
        violin: matrix
            .settings
            .iter()
            .zip(&matrix.ranks)
            .map(|(s, r)| ViolinSeries {
                setting: s.clone(),
                ranks: r.clone(),
            })
            .collect(),
        notes,
    };
    Ok((matrix, bundle))
}

pub const ERROR_TABLE_FILE: &str = "error_table.csv";
pub const RANK_MATRIX_FILE: &str = "rank_matrix.csv";
pub const ANALYSIS_FILE: &str = "analysis.json";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Writes the error table, rank matrix and analysis bundle into `dir`.
pub fn export(table: &ErrorTable, matrix: &RankMatrix, bundle: &AnalysisBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    table.write_csv(create(&dir.join(ERROR_TABLE_FILE))?)?;
    matrix.write_csv(create(&dir.join(RANK_MATRIX_FILE))?)?;
    let path = dir.join(ANALYSIS_FILE);
    let mut text = serde_json::to_string_pretty(bundle)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
