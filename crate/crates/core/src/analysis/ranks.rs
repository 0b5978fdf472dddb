use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Ascending ranks starting at 1. Exactly equal values share the mean of
/// the positions they occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end.
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

/// Mean error per (setting, dataset); `None` marks a missing result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub settings: Vec<String>,
    pub datasets: Vec<String>,
    /// Indexed `[setting][dataset]`.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl ErrorTable {
    pub fn new(settings: Vec<String>, datasets: Vec<String>) -> Self {
        let cells = vec![vec![None; datasets.len()]; settings.len()];
        Self { settings, datasets, cells }
    }

    pub fn from_rows(settings: Vec<String>, datasets: Vec<String>, cells: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if cells.len() != settings.len() || cells.iter().any(|r| r.len() != datasets.len()) {
            return Err(Error::Analysis("error table shape does not match its labels".into()));
        }
        Ok(Self { settings, datasets, cells })
    }

    pub fn set(&mut self, setting: usize, dataset: usize, value: Option<f64>) {
        self.cells[setting][dataset] = value;
    }

    pub fn get(&self, setting: usize, dataset: usize) -> Option<f64> {
        self.cells[setting][dataset]
    }

    /// Indices of datasets with a value for every setting.
    pub fn complete_datasets(&self) -> Vec<usize> {
        (0..self.datasets.len())
            .filter(|&d| self.cells.iter().all(|row| row[d].is_some()))
            .collect()
    }

    /// CSV with a `setting` column followed by one column per dataset.
    /// Absent cells are empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|r| r.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()).collect())
            .collect();
        write_grid(w, &self.settings, &self.datasets, &rows)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let (settings, datasets, rows) = read_grid(r)?;
        let cells = rows
            .into_iter()
            .map(|r| r.iter().map(|f| parse_opt(f)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Self::from_rows(settings, datasets, cells)
    }
}

fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::Analysis(format!("`{field}` is not a number")))
}

fn write_grid<W: Write>(w: W, rows_label: &[String], cols: &[String], cells: &[Vec<String>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["setting".to_string()];
    header.extend(cols.iter().cloned());
    out.write_record(&header)?;
    for (name, row) in rows_label.iter().zip(cells) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().cloned());
        out.write_record(&rec)?;
    }
    out.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

type Grid = (Vec<String>, Vec<String>, Vec<Vec<String>>);

fn read_grid<R: Read>(r: R) -> Result<Grid> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let cols: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        names.push(rec.get(0).unwrap_or_default().to_string());
        rows.push(rec.iter().skip(1).map(str::to_string).collect());
    }
    Ok((names, cols, rows))
}

/// Tie-averaged ranks of settings within each complete dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankMatrix {
    pub settings: Vec<String>,
    pub datasets: Vec<String>,
    /// Indexed `[setting][dataset]`.
    pub ranks: Vec<Vec<f64>>,
    pub averages: Vec<f64>,
    /// Datasets left out because some setting had no result.
    pub dropped: Vec<String>,
}

impl RankMatrix {
    pub fn from_ranks(settings: Vec<String>, datasets: Vec<String>, ranks: Vec<Vec<f64>>) -> Self {
        let n = datasets.len().max(1) as f64;
        let averages = ranks.iter().map(|r| r.iter().sum::<f64>() / n).collect();
        Self {
            settings,
            datasets,
            ranks,
            averages,
            dropped: Vec::new(),
        }
    }

    pub fn n_settings(&self) -> usize {
        self.settings.len()
    }

    pub fn n_datasets(&self) -> usize {
        self.datasets.len()
    }

    pub fn average_of(&self, setting: &str) -> Option<f64> {
        self.settings.iter().position(|s| s == setting).map(|i| self.averages[i])
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let rows: Vec<Vec<String>> = self.ranks.iter().map(|r| r.iter().map(f64::to_string).collect()).collect();
        write_grid(w, &self.settings, &self.datasets, &rows)
    }

    /// Reads ranks written by [`RankMatrix::write_csv`]; averages are recomputed.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let (settings, datasets, rows) = read_grid(r)?;
        let ranks = rows
            .into_iter()
            .map(|r| {
                r.iter()
                    .map(|f| parse_opt(f)?.ok_or_else(|| Error::Analysis("empty rank".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_ranks(settings, datasets, ranks))
    }
}

pub fn rank_settings(table: &ErrorTable) -> Result<RankMatrix> {
    if table.settings.len() < 2 {
        return Err(Error::Analysis("ranking needs at least two settings".into()));
    }
    let keep = table.complete_datasets();
    let mut ranks = vec![Vec::with_capacity(keep.len()); table.settings.len()];
    for &d in &keep {
        let column: Vec<f64> = table.cells.iter().map(|row| row[d].expect("complete column")).collect();
        for (s, r) in average_ranks(&column).into_iter().enumerate() {
            ranks[s].push(r);
        }
    }
    let mut m = RankMatrix::from_ranks(
        table.settings.clone(),
        keep.iter().map(|&d| table.datasets[d].clone()).collect(),
        ranks,
    );
    m.dropped = (0..table.datasets.len())
        .filter(|d| !keep.contains(d))
        .map(|d| table.datasets[d].clone())
        .collect();
    Ok(m)
}
