//! Opportunistic meta-knowledge: per-(dataset, predictor) error and timing
//! statistics harvested from evaluation logs, with the rankings derived
//! from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::analysis::average_ranks;
use crate::error::{Error, Result};
use crate::evaluation::EvaluationRecord;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub mean_error: f64,
    pub n: u64,
    pub mean_time: f64,
}

impl Cell {
    fn absorb(&mut self, other: &Cell) {
        let n = self.n + other.n;
        let (a, b) = (self.n as f64, other.n as f64);
        self.mean_error = (self.mean_error * a + other.mean_error * b) / n as f64;
        self.mean_time = (self.mean_time * a + other.mean_time * b) / n as f64;
        self.n = n;
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetaKnowledgeBase {
    cells: BTreeMap<(String, String), Cell>,
    datasets: BTreeSet<String>,
    predictors: BTreeSet<String>,
}

/// One dataset's ranking of the predictors evaluated on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub dataset: String,
    /// Best first: ascending by rank, then mean error, mean time and id.
    pub ranks: Vec<(String, f64)>,
    /// Known predictors never evaluated on this dataset.
    pub coverage_gap: Vec<String>,
}

impl RankRow {
    pub fn rank_of(&self, predictor: &str) -> Option<f64> {
        self.ranks.iter().find(|(p, _)| p == predictor).map(|&(_, r)| r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardEntry {
    pub predictor: String,
    /// `None` for predictors evaluated on no dataset; they sort last.
    pub average_rank: Option<f64>,
    pub datasets: usize,
    /// Mean over datasets of the cell mean errors.
    pub overall_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopKMode {
    Global,
    Oracle(String),
    /// Ranking of the prior dataset matched by landmarking.
    Landmarked(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopK {
    pub predictors: Vec<String>,
    /// Set when fewer than `k` predictors were rankable.
    pub clamped: bool,
}

impl MetaKnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers predictors that may never appear in any cell.
    pub fn with_predictors<S: AsRef<str>>(mut self, predictors: &[S]) -> Self {
        self.predictors.extend(predictors.iter().map(|p| p.as_ref().to_string()));
        self
    }

    /// Builds a base from complete records only; each record counts
    /// towards its terminal predictor whatever preprocessing preceded it.
    pub fn ingest<'a, I: IntoIterator<Item = &'a EvaluationRecord>>(records: I) -> Self {
        let mut base = Self::new();
        base.extend(records);
        base
    }

    pub fn extend<'a, I: IntoIterator<Item = &'a EvaluationRecord>>(&mut self, records: I) {
        for r in records {
            let Some(err) = r.mean_error.filter(|_| r.is_complete()) else {
                continue;
            };
            self.add(
                &r.dataset,
                &r.predictor,
                Cell {
                    mean_error: err,
                    n: 1,
                    mean_time: r.wall_time,
                },
            );
        }
    }

    fn add(&mut self, dataset: &str, predictor: &str, cell: Cell) {
        self.datasets.insert(dataset.to_string());
        self.predictors.insert(predictor.to_string());
        self.cells
            .entry((dataset.to_string(), predictor.to_string()))
            .and_modify(|c| c.absorb(&cell))
            .or_insert(cell);
    }

    /// Cell-wise weighted merge.
    pub fn merge(&mut self, other: &MetaKnowledgeBase) {
        self.predictors.extend(other.predictors.iter().cloned());
        for ((d, p), c) in &other.cells {
            self.add(d, p, *c);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn datasets(&self) -> impl Iterator<Item = &str> {
        self.datasets.iter().map(String::as_str)
    }

    pub fn predictors(&self) -> impl Iterator<Item = &str> {
        self.predictors.iter().map(String::as_str)
    }

    pub fn contains_dataset(&self, dataset: &str) -> bool {
        self.datasets.contains(dataset)
    }

    pub fn cell(&self, dataset: &str, predictor: &str) -> Option<&Cell> {
        self.cells.get(&(dataset.to_string(), predictor.to_string()))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&str, &str, &Cell)> {
        self.cells.iter().map(|((d, p), c)| (d.as_str(), p.as_str(), c))
    }

    fn dataset_cells<'a>(&'a self, dataset: &'a str) -> impl Iterator<Item = (&'a str, &'a Cell)> + 'a {
        self.cells
            .range((dataset.to_string(), String::new())..)
            .take_while(move |((d, _), _)| d == dataset)
            .map(|((_, p), c)| (p.as_str(), c))
    }

    /// Total evaluation count over a dataset's cells.
    pub fn evaluations(&self, dataset: &str) -> u64 {
        self.dataset_cells(dataset).map(|(_, c)| c.n).sum()
    }

    pub fn per_dataset_ranking(&self, dataset: &str) -> Result<RankRow> {
        let cells: Vec<(&str, &Cell)> = self.dataset_cells(dataset).collect();
        if cells.is_empty() {
            return Err(Error::DatasetAbsent(dataset.to_string()));
        }
        let errors: Vec<f64> = cells.iter().map(|(_, c)| c.mean_error).collect();
        let ranks = average_ranks(&errors);
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, ca) = cells[a];
            let (pb, cb) = cells[b];
            ranks[a]
                .total_cmp(&ranks[b])
                .then(ca.mean_time.total_cmp(&cb.mean_time))
                .then(pa.cmp(pb))
        });
        let seen: BTreeSet<&str> = cells.iter().map(|(p, _)| *p).collect();
        Ok(RankRow {
            dataset: dataset.to_string(),
            ranks: order.iter().map(|&i| (cells[i].0.to_string(), ranks[i])).collect(),
            coverage_gap: self.predictors.iter().filter(|p| !seen.contains(p.as_str())).cloned().collect(),
        })
    }

    pub fn global_leaderboard(&self) -> Vec<LeaderboardEntry> {
        let mut sums: BTreeMap<&str, (f64, f64, usize)> = self.predictors.iter().map(|p| (p.as_str(), (0.0, 0.0, 0))).collect();
        for d in &self.datasets {
            let row = self.per_dataset_ranking(d).expect("listed datasets have cells");
            for (p, r) in &row.ranks {
                let e = sums.get_mut(p.as_str()).expect("registered predictor");
                e.0 += r;
                e.1 += self.cell(d, p).expect("ranked cell").mean_error;
                e.2 += 1;
            }
        }
        let mut out: Vec<LeaderboardEntry> = sums
            .into_iter()
            .map(|(p, (rank_sum, err_sum, count))| LeaderboardEntry {
                predictor: p.to_string(),
                average_rank: (count > 0).then(|| rank_sum / count as f64),
                datasets: count,
                overall_error: (count > 0).then(|| err_sum / count as f64),
            })
            .collect();
        out.sort_by(|a, b| {
            let key = |e: &LeaderboardEntry| (e.average_rank.unwrap_or(f64::INFINITY), e.overall_error.unwrap_or(f64::INFINITY));
            let (ra, ea) = key(a);
            let (rb, eb) = key(b);
            ra.total_cmp(&rb).then(ea.total_cmp(&eb)).then(a.predictor.cmp(&b.predictor))
        });
        out
    }

    pub fn top_k(&self, mode: &TopKMode, k: usize) -> Result<TopK> {
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let ranked: Vec<String> = match mode {
            TopKMode::Global => self
                .global_leaderboard()
                .into_iter()
                .filter(|e| e.average_rank.is_some())
                .map(|e| e.predictor)
                .collect(),
            TopKMode::Oracle(d) | TopKMode::Landmarked(d) => self.per_dataset_ranking(d)?.ranks.into_iter().map(|(p, _)| p).collect(),
        };
        let clamped = ranked.len() < k;
        Ok(TopK {
            predictors: ranked.into_iter().take(k).collect(),
            clamped,
        })
    }

    /// Predictors ordered by evaluation-weighted mean time, fastest first.
    pub fn fastest_predictors(&self, n: usize) -> Vec<String> {
        let mut acc: BTreeMap<&str, (f64, u64)> = BTreeMap::new();
        for ((_, p), c) in &self.cells {
            let e = acc.entry(p.as_str()).or_default();
            e.0 += c.mean_time * c.n as f64;
            e.1 += c.n;
        }
        let mut timed: Vec<(&str, f64)> = acc.into_iter().map(|(p, (t, n))| (p, t / n as f64)).collect();
        timed.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(b.0)));
        timed.into_iter().take(n).map(|(p, _)| p.to_string()).collect()
    }

    /// A copy without `dataset`. The flag reports whether it was present.
    pub fn leave_one_out(&self, dataset: &str) -> (MetaKnowledgeBase, bool) {
        let mut view = self.clone();
        let present = view.datasets.remove(dataset);
        view.cells.retain(|(d, _), _| d != dataset);
        (view, present)
    }

    /// Canonical text form: sorted keys, floats in shortest exact notation.
    pub fn to_text(&self) -> Result<String> {
        let check = |s: &str| {
            if s.is_empty() || s.contains(['\t', '\n', '\r']) {
                Err(Error::Config(format!("name `{s}` cannot be stored in a metabase file")))
            } else {
                Ok(())
            }
        };
        let mut out = String::new();
        writeln!(out, "format-version\t{FORMAT_VERSION}").unwrap();
        out.push_str("predictors");
        for p in &self.predictors {
            check(p)?;
            write!(out, "\t{p}").unwrap();
        }
        out.push_str("\ndatasets");
        for d in &self.datasets {
            check(d)?;
            write!(out, "\t{d}").unwrap();
        }
        out.push('\n');
        for ((d, p), c) in &self.cells {
            writeln!(out, "cell\t{d}\t{p}\t{:e}\t{}\t{:e}", c.mean_error, c.n, c.mean_time).unwrap();
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let corrupt = |m: &str| Error::Corrupt(m.to_string());
        let mut lines = text.lines();
        let version_line = lines.next().filter(|l| !l.trim().is_empty()).ok_or_else(|| corrupt("empty file"))?;
        let version: u32 = version_line
            .strip_prefix("format-version\t")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| corrupt("missing format-version header"))?;
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let mut list = |tag: &str| -> Result<Vec<String>> {
            let line = lines.next().ok_or_else(|| corrupt(&format!("missing {tag} line")))?;
            let mut parts = line.split('\t');
            if parts.next() != Some(tag) {
                return Err(corrupt(&format!("expected {tag} line")));
            }
            Ok(parts.map(str::to_string).collect())
        };
        let mut base = MetaKnowledgeBase {
            predictors: list("predictors")?.into_iter().collect(),
            datasets: list("datasets")?.into_iter().collect(),
            cells: BTreeMap::new(),
        };
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || corrupt(&format!("malformed cell row {}", i + 1));
            if f.len() != 6 || f[0] != "cell" {
                return Err(bad());
            }
            let cell = Cell {
                mean_error: f[3].parse().map_err(|_| bad())?,
                n: f[4].parse().map_err(|_| bad())?,
                mean_time: f[5].parse().map_err(|_| bad())?,
            };
            if cell.n == 0 || !(0.0..=1.0).contains(&cell.mean_error) {
                return Err(bad());
            }
            if !base.datasets.contains(f[1]) || !base.predictors.contains(f[2]) {
                return Err(corrupt(&format!("cell row {} names an unlisted dataset or predictor", i + 1)));
            }
            base.cells.insert((f[1].to_string(), f[2].to_string()), cell);
        }
        Ok(base)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}
