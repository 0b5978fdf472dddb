use serde::Serialize;

use super::ranks::RankMatrix;
use crate::error::{Error, Result};

const NEMENYI_TABLE: &str = include_str!("../../data/nemenyi_q.tsv");
const CHI2_TABLE: &str = include_str!("../../data/chi2_0.05.tsv");

/// Parses a bundled table: `#` comments, one header line, then
/// tab-separated numeric rows keyed by an integer in the first column.
fn table_rows(text: &str) -> impl Iterator<Item = (usize, Vec<f64>)> + '_ {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .map(|l| {
            let mut it = l.split('\t');
            let key = it.next().and_then(|k| k.parse().ok()).expect("bundled table key");
            let vals = it.map(|v| v.parse().expect("bundled table value")).collect();
            (key, vals)
        })
}

/// Nemenyi critical value q_alpha for `s` settings. Supported levels are
/// 0.05 and 0.10.
pub fn nemenyi_q(s: usize, alpha: f64) -> Result<f64> {
    let column = if (alpha - 0.05).abs() < 1e-12 {
        0
    } else if (alpha - 0.10).abs() < 1e-12 {
        1
    } else {
        return Err(Error::Analysis(format!("no Nemenyi table for alpha = {alpha}")));
    };
    table_rows(NEMENYI_TABLE)
        .find(|(k, _)| *k == s)
        .map(|(_, v)| v[column])
        .ok_or_else(|| Error::Analysis(format!("{s} settings is outside the Nemenyi table (2..=20)")))
}

/// Upper 5% chi-square point for `df` degrees of freedom.
pub fn chi2_critical_05(df: usize) -> Result<f64> {
    table_rows(CHI2_TABLE)
        .find(|(k, _)| *k == df)
        .map(|(_, v)| v[0])
        .ok_or_else(|| Error::Analysis(format!("no chi-square critical value for df = {df}")))
}

/// Critical difference in average rank between two of `s` settings
/// compared over `n` datasets.
pub fn nemenyi_cd(s: usize, n: usize, alpha: f64) -> Result<f64> {
    if s < 2 || n < 1 {
        return Err(Error::Analysis("critical difference needs s >= 2 and N >= 1".into()));
    }
    let q = nemenyi_q(s, alpha)?;
    Ok(q * ((s * (s + 1)) as f64 / (6 * n) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Friedman {
    pub statistic: f64,
    pub df: usize,
    pub critical: f64,
    pub significant: bool,
}

pub fn friedman(m: &RankMatrix) -> Result<Friedman> {
    let s = m.n_settings();
    let n = m.n_datasets();
    if s < 3 || n < 2 {
        return Err(Error::Analysis(format!(
            "Friedman test needs s >= 3 and N >= 2 (got s = {s}, N = {n})"
        )));
    }
    let centre = (s + 1) as f64 / 2.0;
    let spread: f64 = m.averages.iter().map(|r| (r - centre).powi(2)).sum();
    let statistic = 12.0 * n as f64 / (s * (s + 1)) as f64 * spread;
    let critical = chi2_critical_05(s - 1)?;
    Ok(Friedman {
        statistic,
        df: s - 1,
        critical,
        significant: statistic > critical,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairComparison {
    pub a: String,
    pub b: String,
    pub difference: f64,
    pub critical: bool,
}

/// All pairs of named average ranks, flagged when their gap exceeds `cd`.
pub fn compare_averages(averages: &[(&str, f64)], cd: f64) -> Vec<PairComparison> {
    let mut out = Vec::new();
    for (i, &(a, ra)) in averages.iter().enumerate() {
        for &(b, rb) in &averages[i + 1..] {
            let difference = (ra - rb).abs();
            out.push(PairComparison {
                a: a.to_string(),
                b: b.to_string(),
                difference,
                critical: difference > cd,
            });
        }
    }
    out
}

pub fn pairwise_critical(m: &RankMatrix, cd: f64) -> Vec<PairComparison> {
    let named: Vec<(&str, f64)> = m.settings.iter().map(String::as_str).zip(m.averages.iter().copied()).collect();
    compare_averages(&named, cd)
}
