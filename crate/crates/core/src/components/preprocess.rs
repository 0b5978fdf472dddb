//! Preprocessors. Statistics are fitted on the training split only and then
//! applied unchanged to any other split.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, Axis};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImputeStrategy {
    Mean,
    Mode,
}

/// A fitted preprocessor.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    /// Fills missing values; columns with no observed value are dropped.
    Impute {
        keep: Vec<usize>,
        fill: Array1<f64>,
    },
    /// Min-max scaling to `[0, 1]` on the training range; constant columns map to 0.
    Normalize {
        lo: Array1<f64>,
        scale: Array1<f64>,
    },
    Select {
        columns: Vec<usize>,
    },
}

impl Transform {
    pub fn fit_impute(x: &Array2<f64>, strategy: ImputeStrategy) -> Self {
        let mut keep = Vec::new();
        let mut fill = Vec::new();
        for (j, col) in x.axis_iter(Axis(1)).enumerate() {
            let observed: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
            if observed.is_empty() {
                continue;
            }
            keep.push(j);
            fill.push(match strategy {
                ImputeStrategy::Mean => observed.iter().sum::<f64>() / observed.len() as f64,
                ImputeStrategy::Mode => mode(&observed),
            });
        }
        Transform::Impute {
            keep,
            fill: Array1::from(fill),
        }
    }

    pub fn fit_normalize(x: &Array2<f64>) -> Self {
        let lo = x.fold_axis(Axis(0), f64::INFINITY, |a, &b| if b.is_nan() { *a } else { a.min(b) });
        let hi = x.fold_axis(Axis(0), f64::NEG_INFINITY, |a, &b| if b.is_nan() { *a } else { a.max(b) });
        let scale = ndarray::Zip::from(&lo)
            .and(&hi)
            .map_collect(|&l, &h| if h > l { 1.0 / (h - l) } else { 0.0 });
        let lo = lo.mapv(|v| if v.is_finite() { v } else { 0.0 });
        Transform::Normalize { lo, scale }
    }

    /// Picks `round(fraction * n_features)` columns using `seed`.
    pub fn fit_random_subset(n_features: usize, fraction: f64, seed: u64) -> Result<Self> {
        let count = subset_size(n_features, fraction);
        if count == 0 {
            return Err(Error::NoFeatures);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut columns = sample(&mut rng, n_features, count).into_vec();
        columns.sort_unstable();
        Ok(Transform::Select { columns })
    }

    /// Number of dropped all-missing columns (imputation only).
    pub fn dropped_columns(&self, n_features: usize) -> usize {
        match self {
            Transform::Impute { keep, .. } => n_features - keep.len(),
            _ => 0,
        }
    }

    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        match self {
            Transform::Impute { keep, fill } => {
                let mut out = x.select(Axis(1), keep);
                for mut row in out.rows_mut() {
                    for (v, f) in row.iter_mut().zip(fill.iter()) {
                        if v.is_nan() {
                            *v = *f;
                        }
                    }
                }
                out
            }
            Transform::Normalize { lo, scale } => {
                let mut out = x - lo;
                out *= scale;
                out
            }
            Transform::Select { columns } => x.select(Axis(1), columns),
        }
    }

    /// Canonical byte form of the fitted state.
    pub fn fingerprint(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut push = |v: f64| out.extend_from_slice(&v.to_bits().to_le_bytes());
        match self {
            Transform::Impute { keep, fill } => {
                keep.iter().for_each(|&k| push(k as f64));
                fill.iter().for_each(|&f| push(f));
            }
            Transform::Normalize { lo, scale } => {
                lo.iter().for_each(|&f| push(f));
                scale.iter().for_each(|&f| push(f));
            }
            Transform::Select { columns } => columns.iter().for_each(|&c| push(c as f64)),
        }
        out
    }
}

pub fn subset_size(n_features: usize, fraction: f64) -> usize {
    ((n_features as f64 * fraction).round() as usize).min(n_features)
}

/// Most frequent value; ties go to the smallest.
fn mode(values: &[f64]) -> f64 {
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for &v in values {
        let key = if v == 0.0 { 0.0f64.to_bits() } else { v.to_bits() };
        counts.entry(key).or_insert((v, 0)).1 += 1;
    }
    counts
        .values()
        .fold(None::<(f64, usize)>, |best, &(v, c)| match best {
            Some((bv, bc)) if bc > c || (bc == c && bv <= v) => Some((bv, bc)),
            _ => Some((v, c)),
        })
        .map(|(v, _)| v)
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn min_max_identity() {
        let x = array![[2.0], [4.0], [6.0]];
        let t = Transform::fit_normalize(&x);
        assert_eq!(t.apply(&x), array![[0.0], [0.5], [1.0]]);
    }

    #[test]
    fn mean_imputation() {
        let x = array![[1.0], [f64::NAN], [3.0]];
        let t = Transform::fit_impute(&x, ImputeStrategy::Mean);
        assert_eq!(t.apply(&x), array![[1.0], [2.0], [3.0]]);
    }

    #[test]
    fn mode_imputation_ties_to_smallest() {
        let x = array![[3.0], [1.0], [3.0], [1.0], [f64::NAN]];
        let t = Transform::fit_impute(&x, ImputeStrategy::Mode);
        assert_eq!(t.apply(&x)[[4, 0]], 1.0);
    }

    #[test]
    fn all_missing_column_is_dropped() {
        let x = array![[1.0, f64::NAN], [2.0, f64::NAN]];
        let t = Transform::fit_impute(&x, ImputeStrategy::Mean);
        assert_eq!(t.dropped_columns(2), 1);
        assert_eq!(t.apply(&x).ncols(), 1);
    }

    #[test]
    fn random_subset_is_seeded() {
        let a = Transform::fit_random_subset(10, 0.5, 17).unwrap();
        let b = Transform::fit_random_subset(10, 0.5, 17).unwrap();
        assert_eq!(a, b);
        match a {
            Transform::Select { columns } => {
                assert_eq!(columns.len(), 5);
                assert!(columns.windows(2).all(|w| w[0] < w[1]));
            }
            _ => unreachable!(),
        }
        assert!(matches!(Transform::fit_random_subset(1, 0.3, 1), Err(Error::NoFeatures)));
    }
}
