use std::collections::BTreeSet;
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// A classification dataset. Missing feature values are stored as `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Array2<f64>,
    labels: Vec<usize>,
    classes: Vec<String>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset and checks it is usable for stratified classification:
    /// at least two classes, each with at least two instances.
    pub fn new(name: impl Into<String>, features: Array2<f64>, labels: Vec<usize>, classes: Vec<String>) -> Result<Self> {
        let feature_names = (0..features.ncols()).map(|j| format!("f{j}")).collect();
        let ds = Self {
            name: name.into(),
            features,
            labels,
            classes,
            feature_names,
        };
        ds.check()?;
        Ok(ds)
    }

    fn check(&self) -> Result<()> {
        if self.labels.len() != self.features.nrows() {
            return Err(Error::Dataset(format!(
                "{} labels for {} instances",
                self.labels.len(),
                self.features.nrows()
            )));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= self.classes.len()) {
            return Err(Error::Dataset(format!("label index {bad} out of range")));
        }
        let counts = self.class_counts();
        if counts.iter().filter(|&&c| c > 0).count() < 2 {
            return Err(Error::Dataset("need at least two classes".into()));
        }
        if let Some(i) = counts.iter().position(|&c| c < 2) {
            return Err(Error::Dataset(format!("class `{}` has fewer than two instances", self.classes[i])));
        }
        Ok(())
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.features.ncols() {
            return Err(Error::Dataset("feature name count differs from column count".into()));
        }
        self.feature_names = names;
        Ok(self)
    }

    /// Loads a CSV with a header row. The label column is `label` when given,
    /// otherwise the last column. Empty fields are missing values.
    pub fn from_csv(path: impl AsRef<Path>, label: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        Self::read_csv(name, file, label)
    }

    pub fn read_csv<R: std::io::Read>(name: impl Into<String>, reader: R, label: Option<&str>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.len() < 2 {
            return Err(Error::Dataset("need at least one feature and a label column".into()));
        }
        let label_idx = match label {
            Some(l) => header
                .iter()
                .position(|h| h == l)
                .ok_or_else(|| Error::Dataset(format!("no label column `{l}`")))?,
            None => header.len() - 1,
        };
        let mut values = Vec::new();
        let mut raw_labels = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::Dataset(format!("row {} has {} fields", row + 1, rec.len())));
            }
            for (j, field) in rec.iter().enumerate() {
                if j == label_idx {
                    if field.is_empty() {
                        return Err(Error::Dataset(format!("row {} has no label", row + 1)));
                    }
                    raw_labels.push(field.to_string());
                } else if field.is_empty() || field == "?" {
                    values.push(f64::NAN);
                } else {
                    let v: f64 = field
                        .parse()
                        .map_err(|_| Error::Dataset(format!("row {}: `{field}` is not numeric", row + 1)))?;
                    values.push(v);
                }
            }
        }
        let classes: Vec<String> = raw_labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let labels = raw_labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label collected above"))
            .collect();
        let n = raw_labels.len();
        let features = Array2::from_shape_vec((n, header.len() - 1), values).map_err(|e| Error::Dataset(e.to_string()))?;
        let names = header
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != label_idx)
            .map(|(_, h)| h.clone())
            .collect();
        Self::new(name, features, labels, classes)?.with_feature_names(names)
    }

    /// Writes the dataset as CSV with the label in a trailing `class` column.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = self.feature_names.clone();
        header.push("class".into());
        w.write_record(&header)?;
        for (row, &label) in self.features.rows().into_iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| if v.is_nan() { String::new() } else { v.to_string() }).collect();
            rec.push(self.classes[label].clone());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn has_missing(&self) -> bool {
        self.features.iter().any(|v| v.is_nan())
    }

    /// Columns in which every value is missing.
    pub fn all_missing_columns(&self) -> usize {
        self.features.axis_iter(Axis(1)).filter(|c| c.iter().all(|v| v.is_nan())).count()
    }

    /// Swaps in a transformed feature matrix with the same row count.
    pub(crate) fn replace_features(&mut self, features: Array2<f64>, names: Vec<String>) {
        debug_assert_eq!(features.nrows(), self.labels.len());
        self.features = features;
        self.feature_names = names;
    }

    /// Rows at `indices`; the class list is kept even if some classes vanish.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn csv_round_trip_with_missing() {
        let text = "a,b,label\n1,,x\n2,3,y\n,4,x\n5,6,y\n";
        let ds = Dataset::read_csv("t", text.as_bytes(), None).unwrap();
        assert_eq!(ds.n_instances(), 4);
        assert_eq!(ds.n_features(), 2);
        assert!(ds.has_missing());
        assert_eq!(ds.classes(), &["x".to_string(), "y".to_string()]);
        assert_eq!(ds.labels(), &[0, 1, 0, 1]);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        ds.write_csv(&p).unwrap();
        let back = Dataset::from_csv(&p, Some("class")).unwrap();
        assert_eq!(back.labels(), ds.labels());
        assert_eq!(back.features().iter().filter(|v| v.is_nan()).count(), 2);
    }

    #[test]
    fn named_label_column() {
        let text = "label,a\nx,1\ny,2\nx,3\ny,4\n";
        let ds = Dataset::read_csv("t", text.as_bytes(), Some("label")).unwrap();
        assert_eq!(ds.feature_names(), &["a".to_string()]);
    }

    #[test]
    fn rejects_degenerate_datasets() {
        let x = array![[1.0], [2.0], [3.0]];
        assert!(Dataset::new("d", x.clone(), vec![0, 0, 0], vec!["a".into(), "b".into()]).is_err());
        assert!(Dataset::new("d", x.clone(), vec![0, 0, 1], vec!["a".into(), "b".into()]).is_err());
        assert!(Dataset::new("d", x, vec![0, 1], vec!["a".into(), "b".into()]).is_err());
    }
}
