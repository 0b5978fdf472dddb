//! From-scratch classifiers.
//!
//! Each `fit` returns a boxed [`Model`]. Ties between classes always resolve
//! to the lowest class index.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::Rng;

use super::argmax;
use super::cart::{Criterion, DecisionTree, TreeParams};

pub trait Model: Send + Sync + std::fmt::Debug {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize;
}

/// Training rows with labels in `0..n_classes`.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a> {
    pub x: &'a Array2<f64>,
    pub y: &'a [usize],
    pub n_classes: usize,
}

impl TrainingSet<'_> {
    pub fn class_counts(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_classes];
        for &l in self.y {
            c[l] += 1.0;
        }
        c
    }

    pub fn majority(&self) -> usize {
        argmax(&self.class_counts())
    }
}

#[derive(Debug)]
pub struct Constant(pub usize);

impl Model for Constant {
    fn predict_row(&self, _: ArrayView1<f64>) -> usize {
        self.0
    }
}

pub fn fit_zero_r(data: TrainingSet) -> Box<dyn Model> {
    Box::new(Constant(data.majority()))
}

/// Single-feature rule over value intervals (Holte's 1R).
#[derive(Debug)]
pub struct OneR {
    feature: usize,
    /// Upper bounds of all intervals except the last.
    cuts: Vec<f64>,
    classes: Vec<usize>,
    missing_class: usize,
}

impl Model for OneR {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let v = row[self.feature];
        if v.is_nan() {
            return self.missing_class;
        }
        let i = self.cuts.partition_point(|&c| c < v);
        self.classes[i]
    }
}

fn one_r_rule(values: &mut [(f64, usize)], n_classes: usize, min_bucket: usize) -> (Vec<f64>, Vec<usize>, usize) {
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    // (upper value, counts) per interval
    let mut buckets: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut counts = vec![0usize; n_classes];
    let mut i = 0;
    while i < values.len() {
        let v = values[i].0;
        // take every instance sharing this value
        while i < values.len() && values[i].0 == v {
            counts[values[i].1] += 1;
            i += 1;
        }
        let maj = argmax_usize(&counts);
        let next_class = values.get(i).map(|n| n.1);
        if counts[maj] >= min_bucket && next_class != Some(maj) {
            buckets.push((v, std::mem::replace(&mut counts, vec![0; n_classes])));
        }
    }
    if counts.iter().any(|&c| c > 0) {
        buckets.push((f64::INFINITY, counts));
    }
    // merge neighbours that predict the same class
    let mut cuts = Vec::new();
    let mut classes: Vec<usize> = Vec::new();
    let mut errors = 0;
    for (upper, counts) in &buckets {
        let maj = argmax_usize(counts);
        errors += counts.iter().sum::<usize>() - counts[maj];
        if classes.last() == Some(&maj) {
            if let Some(last) = cuts.last_mut() {
                *last = *upper;
            }
        } else {
            classes.push(maj);
            cuts.push(*upper);
        }
    }
    // cut points sit halfway to the next interval's first value
    cuts.pop();
    let cuts = cuts
        .into_iter()
        .map(|c| {
            let next = values.iter().find(|v| v.0 > c).map_or(c, |v| v.0);
            c + (next - c) / 2.0
        })
        .collect();
    (cuts, classes, errors)
}

fn argmax_usize(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

pub fn fit_one_r(data: TrainingSet, min_bucket: usize) -> Box<dyn Model> {
    let majority = data.majority();
    let mut best: Option<(usize, OneR)> = None;
    for f in 0..data.x.ncols() {
        let mut values = Vec::with_capacity(data.y.len());
        let mut missing = vec![0usize; data.n_classes];
        for (i, &label) in data.y.iter().enumerate() {
            let v = data.x[[i, f]];
            if v.is_nan() {
                missing[label] += 1;
            } else {
                values.push((v, label));
            }
        }
        let (cuts, classes, mut errors) = if values.is_empty() {
            (Vec::new(), vec![majority], 0)
        } else {
            one_r_rule(&mut values, data.n_classes, min_bucket.max(1))
        };
        let missing_class = if missing.iter().any(|&c| c > 0) {
            let m = argmax_usize(&missing);
            errors += missing.iter().sum::<usize>() - missing[m];
            m
        } else {
            majority
        };
        if best.as_ref().is_none_or(|(e, _)| errors < *e) {
            best = Some((
                errors,
                OneR {
                    feature: f,
                    cuts,
                    classes,
                    missing_class,
                },
            ));
        }
    }
    match best {
        Some((_, rule)) => Box::new(rule),
        None => Box::new(Constant(majority)),
    }
}

/// k-nearest neighbours with Euclidean distance on min-max scaled features.
#[derive(Debug)]
pub struct Knn {
    x: Array2<f64>,
    y: Vec<usize>,
    lo: Array1<f64>,
    scale: Array1<f64>,
    k: usize,
    inverse_distance: bool,
    n_classes: usize,
}

impl Model for Knn {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let q: Array1<f64> = (&row - &self.lo) * &self.scale;
        let mut dist: Vec<(f64, usize)> = self
            .x
            .rows()
            .into_iter()
            .zip(&self.y)
            .map(|(r, &l)| (r.iter().zip(q.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), l))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        let k = self.k.min(dist.len()).max(1);
        // neighbours tied with the k-th distance all vote
        let kth = dist[k - 1].0;
        let mut votes = vec![0.0; self.n_classes];
        for &(d, l) in dist.iter().take_while(|(d, _)| *d <= kth) {
            votes[l] += if self.inverse_distance { 1.0 / (d.sqrt() + 1e-9) } else { 1.0 };
        }
        argmax(&votes)
    }
}

pub fn fit_knn(data: TrainingSet, k: usize, inverse_distance: bool) -> Box<dyn Model> {
    let (lo, scale) = min_max(data.x);
    let x = (data.x - &lo) * &scale;
    Box::new(Knn {
        x,
        y: data.y.to_vec(),
        lo,
        scale,
        k,
        inverse_distance,
        n_classes: data.n_classes,
    })
}

/// Column minima and `1 / (max - min)` (zero for constant columns).
fn min_max(x: &Array2<f64>) -> (Array1<f64>, Array1<f64>) {
    let lo = x.fold_axis(Axis(0), f64::INFINITY, |a, &b| a.min(b));
    let hi = x.fold_axis(Axis(0), f64::NEG_INFINITY, |a, &b| a.max(b));
    let scale = ndarray::Zip::from(&lo)
        .and(&hi)
        .map_collect(|&l, &h| if h > l { 1.0 / (h - l) } else { 0.0 });
    let lo = lo.mapv(|v| if v.is_finite() { v } else { 0.0 });
    (lo, scale)
}

/// Column means and `1 / std` (zero for constant columns).
fn standardizer(x: &Array2<f64>) -> (Array1<f64>, Array1<f64>) {
    let n = x.nrows().max(1) as f64;
    let mean = x.sum_axis(Axis(0)) / n;
    let var = (x - &mean).mapv(|v| v * v).sum_axis(Axis(0)) / n;
    let inv = var.mapv(|v| if v > 1e-24 { 1.0 / v.sqrt() } else { 0.0 });
    (mean, inv)
}

#[derive(Debug)]
pub struct GaussianNb {
    log_prior: Vec<f64>,
    mean: Array2<f64>,
    var: Array2<f64>,
}

impl Model for GaussianNb {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let scores: Vec<f64> = (0..self.log_prior.len())
            .map(|c| {
                let mut s = self.log_prior[c];
                for j in 0..row.len() {
                    let v = self.var[[c, j]];
                    let d = row[j] - self.mean[[c, j]];
                    s -= 0.5 * ((2.0 * std::f64::consts::PI * v).ln() + d * d / v);
                }
                s
            })
            .collect();
        argmax(&scores)
    }
}

pub fn fit_gaussian_nb(data: TrainingSet, var_smoothing: f64) -> Box<dyn Model> {
    let d = data.x.ncols();
    let counts = data.class_counts();
    let n = data.y.len() as f64;
    let mut mean = Array2::zeros((data.n_classes, d));
    let mut var = Array2::zeros((data.n_classes, d));
    for (row, &l) in data.x.rows().into_iter().zip(data.y) {
        let mut m = mean.row_mut(l);
        m += &row;
    }
    for c in 0..data.n_classes {
        if counts[c] > 0.0 {
            let mut m = mean.row_mut(c);
            m /= counts[c];
        }
    }
    for (row, &l) in data.x.rows().into_iter().zip(data.y) {
        for j in 0..d {
            let e = row[j] - mean[[l, j]];
            var[[l, j]] += e * e;
        }
    }
    for c in 0..data.n_classes {
        if counts[c] > 0.0 {
            let mut v = var.row_mut(c);
            v /= counts[c];
        }
    }
    let (_, inv_std) = standardizer(data.x);
    let max_var = inv_std.iter().filter(|&&s| s > 0.0).map(|s| 1.0 / (s * s)).fold(0.0_f64, f64::max);
    let eps = var_smoothing * max_var.max(1e-12);
    var.mapv_inplace(|v| v + eps);
    let log_prior = counts
        .iter()
        .map(|&c| if c > 0.0 { (c / n).ln() } else { f64::NEG_INFINITY })
        .collect();
    Box::new(GaussianNb { log_prior, mean, var })
}

/// Multinomial naive Bayes on features shifted to be non-negative.
#[derive(Debug)]
pub struct MultinomialNb {
    shift: Array1<f64>,
    log_prior: Vec<f64>,
    log_theta: Array2<f64>,
}

impl Model for MultinomialNb {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let counts = (&row - &self.shift).mapv(|v| v.max(0.0));
        let scores: Vec<f64> = (0..self.log_prior.len())
            .map(|c| self.log_prior[c] + self.log_theta.row(c).dot(&counts))
            .collect();
        argmax(&scores)
    }
}

pub fn fit_multinomial_nb(data: TrainingSet, alpha: f64) -> Box<dyn Model> {
    let shift = data.x.fold_axis(Axis(0), f64::INFINITY, |a, &b| a.min(b));
    let shift = shift.mapv(|v| if v.is_finite() { v } else { 0.0 });
    let d = data.x.ncols();
    let mut totals = Array2::<f64>::zeros((data.n_classes, d));
    for (row, &l) in data.x.rows().into_iter().zip(data.y) {
        let mut t = totals.row_mut(l);
        t += &(&row - &shift);
    }
    let mut log_theta = Array2::zeros((data.n_classes, d));
    for c in 0..data.n_classes {
        let row_sum = totals.row(c).sum() + alpha * d as f64;
        for j in 0..d {
            log_theta[[c, j]] = ((totals[[c, j]] + alpha) / row_sum).ln();
        }
    }
    let n = data.y.len() as f64;
    let log_prior = data
        .class_counts()
        .iter()
        .map(|&c| if c > 0.0 { (c / n).ln() } else { f64::NEG_INFINITY })
        .collect();
    Box::new(MultinomialNb {
        shift,
        log_prior,
        log_theta,
    })
}

/// Linear scores over standardized features, one row of weights per class.
#[derive(Debug)]
pub struct Linear {
    mean: Array1<f64>,
    inv_std: Array1<f64>,
    w: Array2<f64>,
    b: Array1<f64>,
}

impl Model for Linear {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let z = (&row - &self.mean) * &self.inv_std;
        let scores = self.w.dot(&z) + &self.b;
        argmax(scores.as_slice().expect("contiguous"))
    }
}

fn standardize(x: &Array2<f64>) -> (Array2<f64>, Array1<f64>, Array1<f64>) {
    let (mean, inv_std) = standardizer(x);
    let z = (x - &mean) * &inv_std;
    (z, mean, inv_std)
}

/// Multinomial logistic regression by full-batch gradient descent.
pub fn fit_logistic(data: TrainingSet, learning_rate: f64, epochs: usize, l2: f64) -> Box<dyn Model> {
    let (z, mean, inv_std) = standardize(data.x);
    let (n, d) = z.dim();
    let k = data.n_classes;
    let mut w = Array2::<f64>::zeros((k, d));
    let mut b = Array1::<f64>::zeros(k);
    let mut onehot = Array2::<f64>::zeros((n, k));
    for (i, &l) in data.y.iter().enumerate() {
        onehot[[i, l]] = 1.0;
    }
    let nf = n.max(1) as f64;
    for _ in 0..epochs {
        let mut logits = z.dot(&w.t()) + &b;
        for mut r in logits.rows_mut() {
            let m = r.fold(f64::NEG_INFINITY, |a, &v| a.max(v));
            r.mapv_inplace(|v| (v - m).exp());
            let s = r.sum();
            r /= s;
        }
        let err = logits - &onehot;
        let gw = err.t().dot(&z) / nf + &w * l2;
        let gb = err.sum_axis(Axis(0)) / nf;
        w.scaled_add(-learning_rate, &gw);
        b.scaled_add(-learning_rate, &gb);
    }
    Box::new(Linear { mean, inv_std, w, b })
}

/// One-vs-rest linear SVM trained by stochastic subgradient descent on the
/// regularized hinge loss.
pub fn fit_linear_svm<R: Rng>(data: TrainingSet, lambda: f64, epochs: usize, rng: &mut R) -> Box<dyn Model> {
    let (z, mean, inv_std) = standardize(data.x);
    let (n, d) = z.dim();
    let k = data.n_classes;
    let mut w = Array2::<f64>::zeros((k, d));
    let mut b = Array1::<f64>::zeros(k);
    let mut order: Vec<usize> = (0..n).collect();
    let eta0 = 0.5;
    for c in 0..k {
        let mut t = 0.0;
        let mut wc = Array1::<f64>::zeros(d);
        let mut bc = 0.0;
        for _ in 0..epochs {
            order.shuffle(rng);
            for &i in &order {
                t += 1.0;
                let eta = eta0 / (1.0 + eta0 * lambda * t);
                let y = if data.y[i] == c { 1.0 } else { -1.0 };
                let margin = y * (wc.dot(&z.row(i)) + bc);
                wc *= 1.0 - eta * lambda;
                if margin < 1.0 {
                    wc.scaled_add(eta * y, &z.row(i));
                    bc += eta * y * 0.1;
                }
            }
        }
        w.row_mut(c).assign(&wc);
        b[c] = bc;
    }
    Box::new(Linear { mean, inv_std, w, b })
}

#[derive(Debug)]
pub struct TreeModel(DecisionTree);

impl Model for TreeModel {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        self.0.predict_row(row)
    }
}

pub fn fit_tree<R: Rng>(data: TrainingSet, params: &TreeParams, rng: &mut R) -> Box<dyn Model> {
    let w = vec![1.0; data.y.len()];
    Box::new(TreeModel(DecisionTree::fit(
        data.x,
        data.y,
        &w,
        (0..data.y.len()).collect(),
        data.n_classes,
        params,
        rng,
    )))
}

/// Majority vote over member trees; optionally weighted.
#[derive(Debug)]
pub struct Ensemble {
    trees: Vec<DecisionTree>,
    weights: Vec<f64>,
    n_classes: usize,
}

impl Model for Ensemble {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let mut votes = vec![0.0; self.n_classes];
        for (t, w) in self.trees.iter().zip(&self.weights) {
            votes[t.predict_row(row)] += w;
        }
        argmax(&votes)
    }
}

/// Trees grown on bootstrap samples of `fraction * n` rows.
pub fn fit_bagged_trees<R: Rng>(data: TrainingSet, n_trees: usize, fraction: f64, params: &TreeParams, rng: &mut R) -> Box<dyn Model> {
    let n = data.y.len();
    let m = ((n as f64 * fraction).round() as usize).max(1);
    let w = vec![1.0; n];
    let trees = (0..n_trees.max(1))
        .map(|_| {
            let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
            DecisionTree::fit(data.x, data.y, &w, idx, data.n_classes, params, rng)
        })
        .collect::<Vec<_>>();
    let weights = vec![1.0; trees.len()];
    Box::new(Ensemble {
        trees,
        weights,
        n_classes: data.n_classes,
    })
}

/// Multi-class AdaBoost (SAMME) over shallow trees.
pub fn fit_adaboost<R: Rng>(data: TrainingSet, rounds: usize, max_depth: usize, rng: &mut R) -> Box<dyn Model> {
    let n = data.y.len();
    let k = data.n_classes.max(2) as f64;
    let mut w = vec![1.0 / n as f64; n];
    let params = TreeParams {
        max_depth: Some(max_depth.max(1)),
        min_leaf: 1,
        features_per_split: None,
        criterion: Criterion::Gini,
    };
    let mut trees = Vec::new();
    let mut alphas = Vec::new();
    for _ in 0..rounds.max(1) {
        let tree = DecisionTree::fit(data.x, data.y, &w, (0..n).collect(), data.n_classes, &params, rng);
        let wrong: Vec<bool> = (0..n).map(|i| tree.predict_row(data.x.row(i)) != data.y[i]).collect();
        let err: f64 = wrong.iter().zip(&w).filter(|(m, _)| **m).map(|(_, w)| w).sum::<f64>() / w.iter().sum::<f64>();
        if err >= 1.0 - 1.0 / k {
            if trees.is_empty() {
                trees.push(tree);
                alphas.push(1.0);
            }
            break;
        }
        let err = err.max(1e-10);
        let alpha = ((1.0 - err) / err).ln() + (k - 1.0).ln();
        trees.push(tree);
        alphas.push(alpha);
        if err <= 1e-10 {
            break;
        }
        for (wi, m) in w.iter_mut().zip(&wrong) {
            if *m {
                *wi *= alpha.exp();
            }
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
    }
    Box::new(Ensemble {
        trees,
        weights: alphas,
        n_classes: data.n_classes,
    })
}
