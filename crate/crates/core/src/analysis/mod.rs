//! Rank-based comparison of experimental settings.

mod ranks;
mod report;
mod stats;

pub use ranks::{average_ranks, rank_settings, ErrorTable, RankMatrix};
pub use report::{
    analyse, export, hierarchy_report, metric_k, AnalysisBundle, CriticalDifference, CulledSets, Family, HierarchyCheck, HierarchyReport,
    ViolinSeries, ANALYSIS_FILE, ERROR_TABLE_FILE, EXPECTED_ORDER, RANK_MATRIX_FILE,
};
pub use stats::{chi2_critical_05, compare_averages, friedman, nemenyi_cd, nemenyi_q, pairwise_critical, Friedman, PairComparison};
