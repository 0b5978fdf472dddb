//! Weighted binary decision trees shared by the tree-based predictors.

use ndarray::{Array2, ArrayView1};
use rand::seq::index::sample;
use rand::Rng;

use super::argmax;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Gini,
    Entropy,
}

impl Criterion {
    fn impurity(self, counts: &[f64], total: f64) -> f64 {
        if total <= 0.0 {
            return 0.0;
        }
        match self {
            Criterion::Gini => 1.0 - counts.iter().map(|c| (c / total).powi(2)).sum::<f64>(),
            Criterion::Entropy => -counts
                .iter()
                .filter(|&&c| c > 0.0)
                .map(|c| {
                    let p = c / total;
                    p * p.log2()
                })
                .sum::<f64>(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    /// Minimum number of instances on each side of a split.
    pub min_leaf: usize,
    /// Features examined per split; `None` examines all of them.
    pub features_per_split: Option<usize>,
    pub criterion: Criterion,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_leaf: 1,
            features_per_split: None,
            criterion: Criterion::Gini,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Side taken by missing values (the heavier child at training time).
        missing_left: bool,
    },
}

#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

struct Grower<'a, R> {
    x: &'a Array2<f64>,
    y: &'a [usize],
    w: &'a [f64],
    n_classes: usize,
    params: &'a TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl<R: Rng> Grower<'_, R> {
    fn class_weights(&self, idx: &[usize]) -> Vec<f64> {
        let mut counts = vec![0.0; self.n_classes];
        for &i in idx {
            counts[self.y[i]] += self.w[i];
        }
        counts
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<BestSplit> {
        let n_features = self.x.ncols();
        let features: Vec<usize> = match self.params.features_per_split {
            Some(k) if k < n_features => sample(self.rng, n_features, k.max(1)).into_vec(),
            _ => (0..n_features).collect(),
        };
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<BestSplit> = None;
        let mut column: Vec<(f64, usize, f64)> = Vec::with_capacity(idx.len());
        for f in features {
            column.clear();
            column.extend(
                idx.iter()
                    .filter(|&&i| !self.x[[i, f]].is_nan())
                    .map(|&i| (self.x[[i, f]], self.y[i], self.w[i])),
            );
            if column.len() < 2 * min_leaf {
                continue;
            }
            column.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut right = vec![0.0; self.n_classes];
            for &(_, c, w) in &column {
                right[c] += w;
            }
            let total: f64 = right.iter().sum();
            if total <= 0.0 {
                continue;
            }
            let parent = self.params.criterion.impurity(&right, total);
            let mut left = vec![0.0; self.n_classes];
            let mut left_total = 0.0;
            for pos in 0..column.len() - 1 {
                let (v, c, w) = column[pos];
                left[c] += w;
                right[c] -= w;
                left_total += w;
                let next = column[pos + 1].0;
                if next <= v || pos + 1 < min_leaf || column.len() - pos - 1 < min_leaf {
                    continue;
                }
                let right_total = total - left_total;
                let child = (left_total * self.params.criterion.impurity(&left, left_total)
                    + right_total * self.params.criterion.impurity(&right, right_total))
                    / total;
                let gain = parent - child;
                if gain > 1e-12 && best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: v + (next - v) / 2.0,
                        gain,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_weights(&idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { class: argmax(&counts) });
        let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
        if pure || self.params.max_depth.is_some_and(|d| depth >= d) || idx.len() < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let Some(split) = self.best_split(&idx) else {
            return id;
        };
        let (mut l, mut r, mut missing) = (Vec::new(), Vec::new(), Vec::new());
        for &i in &idx {
            let v = self.x[[i, split.feature]];
            if v.is_nan() {
                missing.push(i);
            } else if v <= split.threshold {
                l.push(i);
            } else {
                r.push(i);
            }
        }
        let wl: f64 = l.iter().map(|&i| self.w[i]).sum();
        let wr: f64 = r.iter().map(|&i| self.w[i]).sum();
        let missing_left = wl >= wr;
        if missing_left {
            l.extend(missing);
        } else {
            r.extend(missing);
        }
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            missing_left,
        };
        id
    }
}

impl DecisionTree {
    /// Grows a tree on the rows in `idx`, weighting row `i` by `w[i]`.
    pub fn fit<R: Rng>(
        x: &Array2<f64>,
        y: &[usize],
        w: &[f64],
        idx: Vec<usize>,
        n_classes: usize,
        params: &TreeParams,
        rng: &mut R,
    ) -> Self {
        let mut g = Grower {
            x,
            y,
            w,
            n_classes,
            params,
            rng,
            nodes: Vec::new(),
        };
        g.grow(idx, 0);
        Self { nodes: g.nodes }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let mut cur = 0;
        loop {
            match self.nodes[cur] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    missing_left,
                } => {
                    let v = row[feature];
                    cur = if v.is_nan() {
                        if missing_left {
                            left
                        } else {
                            right
                        }
                    } else if v <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}
