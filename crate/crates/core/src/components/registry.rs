//! The built-in component pool: identifiers, schemas, capabilities, virtual
//! cost model and fit dispatch.

use std::fmt;
use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cart::{Criterion, TreeParams};
use super::dataset::Dataset;
use super::predictors::{self as p, Constant, Model, TrainingSet};
use super::preprocess::{ImputeStrategy, Transform};
use crate::configspace::{Assignment, ComponentDef, ComponentKind, ComponentRef, HyperparamSchema, HyperparamSpec as Hp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    ZeroR,
    OneR,
    Ibk,
    NaiveBayes,
    RandomTree,
    DecisionTree,
    RandomForest,
    Logistic,
    LinearSvm,
    Bagging,
    AdaBoost,
    MultinomialNb,
    Impute,
    Normalize,
    RandomSubset,
}

/// The five landmarkers, in landmark-vector order.
pub const LANDMARKERS: [Algorithm; 5] = [
    Algorithm::RandomTree,
    Algorithm::ZeroR,
    Algorithm::Ibk,
    Algorithm::NaiveBayes,
    Algorithm::OneR,
];

impl Algorithm {
    pub const ALL: [Algorithm; 15] = [
        Algorithm::Impute,
        Algorithm::Normalize,
        Algorithm::RandomSubset,
        Algorithm::ZeroR,
        Algorithm::OneR,
        Algorithm::Ibk,
        Algorithm::NaiveBayes,
        Algorithm::RandomTree,
        Algorithm::DecisionTree,
        Algorithm::RandomForest,
        Algorithm::Logistic,
        Algorithm::LinearSvm,
        Algorithm::Bagging,
        Algorithm::AdaBoost,
        Algorithm::MultinomialNb,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::ZeroR => "zero_r",
            Algorithm::OneR => "one_r",
            Algorithm::Ibk => "ibk",
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::RandomTree => "random_tree",
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Logistic => "logistic",
            Algorithm::LinearSvm => "linear_svm",
            Algorithm::Bagging => "meta_bagging",
            Algorithm::AdaBoost => "meta_adaboost",
            Algorithm::MultinomialNb => "multinomial_nb",
            Algorithm::Impute => "impute",
            Algorithm::Normalize => "normalize",
            Algorithm::RandomSubset => "random_subset",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.id() == id)
    }

    pub fn kind(self) -> ComponentKind {
        match self {
            Algorithm::Impute | Algorithm::Normalize | Algorithm::RandomSubset => ComponentKind::Preprocessor,
            _ => ComponentKind::Predictor,
        }
    }

    pub fn component(self) -> ComponentRef {
        ComponentRef {
            id: self.id().to_string(),
            kind: self.kind(),
        }
    }

    /// Whether the component accepts missing values in its input.
    pub fn handles_missing(self) -> bool {
        !matches!(
            self,
            Algorithm::Ibk | Algorithm::NaiveBayes | Algorithm::Logistic | Algorithm::LinearSvm | Algorithm::MultinomialNb
        )
    }

    pub fn schema(self) -> HyperparamSchema {
        let entries = match self {
            Algorithm::ZeroR | Algorithm::Normalize => vec![],
            Algorithm::OneR => vec![Hp::integer("min_bucket", 1, 30, 6)],
            Algorithm::Ibk => vec![
                Hp::integer("k", 1, 30, 1),
                Hp::categorical("weighting", &["uniform", "inverse_distance"], "uniform"),
            ],
            Algorithm::NaiveBayes => vec![Hp::continuous("var_smoothing", 1e-9, 1e-2, 1e-9)],
            Algorithm::RandomTree => vec![
                Hp::integer("k_features", 0, 16, 0),
                Hp::integer("min_leaf", 1, 10, 1),
                Hp::categorical("depth_limited", &["no", "yes"], "no"),
                Hp::integer("max_depth", 1, 20, 10).when("depth_limited", "yes"),
            ],
            Algorithm::DecisionTree => vec![
                Hp::categorical("criterion", &["gini", "entropy"], "entropy"),
                Hp::integer("max_depth", 1, 25, 12),
                Hp::integer("min_leaf", 1, 20, 2),
            ],
            Algorithm::RandomForest => vec![
                Hp::integer("n_trees", 2, 30, 10),
                Hp::categorical("max_features", &["sqrt", "log2", "all"], "sqrt"),
                Hp::integer("min_leaf", 1, 10, 1),
            ],
            Algorithm::Logistic => vec![
                Hp::continuous("learning_rate", 0.01, 1.0, 0.3),
                Hp::integer("epochs", 20, 300, 100),
                Hp::categorical("penalty", &["none", "l2"], "l2"),
                Hp::continuous("l2", 1e-6, 1e-1, 1e-4).when("penalty", "l2"),
            ],
            Algorithm::LinearSvm => vec![Hp::continuous("lambda", 1e-5, 1e-1, 1e-3), Hp::integer("epochs", 2, 30, 10)],
            Algorithm::Bagging => vec![
                Hp::integer("n_estimators", 2, 30, 10),
                Hp::continuous("bag_fraction", 0.3, 1.0, 1.0),
                Hp::integer("max_depth", 1, 20, 10),
            ],
            Algorithm::AdaBoost => vec![Hp::integer("rounds", 2, 50, 10), Hp::integer("max_depth", 1, 3, 1)],
            Algorithm::MultinomialNb => vec![Hp::continuous("alpha", 1e-2, 10.0, 1.0)],
            Algorithm::Impute => vec![Hp::categorical("strategy", &["mean", "mode"], "mean")],
            Algorithm::RandomSubset => vec![Hp::continuous("fraction", 0.1, 1.0, 0.5), Hp::integer("seed", 0, 1000, 1)],
        };
        HyperparamSchema::new(entries).expect("built-in schemas are valid")
    }

    pub fn def(self) -> ComponentDef {
        ComponentDef::new(self.component(), self.schema())
    }

    /// Virtual training cost in seconds per training instance, given the
    /// number of input features and classes.
    pub fn cost_per_instance(self, hp: &Assignment, n_features: usize, n_classes: usize) -> f64 {
        let d = n_features as f64;
        let c = n_classes.max(2) as f64;
        match self {
            Algorithm::ZeroR => 2e-5,
            Algorithm::OneR | Algorithm::RandomTree | Algorithm::NaiveBayes => 2e-5 + 1e-5 * d,
            Algorithm::Ibk => 3e-5 + 1.5e-5 * d,
            Algorithm::MultinomialNb => 6e-5 + 2e-5 * d,
            Algorithm::DecisionTree => 1e-4 + 6e-5 * d,
            Algorithm::RandomForest => {
                let per_split = match get_str(hp, "max_features", "sqrt") {
                    "all" => d,
                    "log2" => d.max(1.0).log2() + 1.0,
                    _ => d.sqrt(),
                };
                get_usize(hp, "n_trees", 10) as f64 * (3e-5 + 2.5e-5 * per_split)
            }
            Algorithm::Logistic => 5e-5 + get_usize(hp, "epochs", 100) as f64 * 1e-6 * d * c,
            Algorithm::LinearSvm => 5e-5 + get_usize(hp, "epochs", 10) as f64 * 2e-6 * d * c,
            Algorithm::Bagging => get_usize(hp, "n_estimators", 10) as f64 * get_f64(hp, "bag_fraction", 1.0) * (1e-4 + 6e-5 * d),
            Algorithm::AdaBoost => get_usize(hp, "rounds", 10) as f64 * (2e-5 + 3e-5 * d * get_usize(hp, "max_depth", 1) as f64),
            Algorithm::Impute | Algorithm::Normalize => 5e-6 * d,
            Algorithm::RandomSubset => 2e-6 * d,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

fn get_usize(hp: &Assignment, name: &str, default: usize) -> usize {
    hp.get(name).and_then(|v| v.as_i64()).map_or(default, |v| v.max(0) as usize)
}

fn get_f64(hp: &Assignment, name: &str, default: f64) -> f64 {
    hp.get(name).and_then(|v| v.as_f64()).unwrap_or(default)
}

fn get_str<'a>(hp: &'a Assignment, name: &str, default: &'a str) -> &'a str {
    hp.get(name).and_then(|v| v.as_str()).unwrap_or(default)
}

/// A fitted predictor.
#[derive(Debug)]
pub struct TrainedModel {
    pub component: ComponentRef,
    model: Box<dyn Model>,
    n_features: usize,
    /// Wall-clock training time in seconds.
    pub train_time: f64,
    /// Set when the training data held a single class and the model fell
    /// back to predicting it everywhere.
    pub degenerate: bool,
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        if x.ncols() != self.n_features {
            return Err(Error::ArityMismatch {
                expected: self.n_features,
                got: x.ncols(),
            });
        }
        Ok(x.rows().into_iter().map(|r| self.model.predict_row(r)).collect())
    }
}

/// Fits predictor `algo` on raw training matrices.
pub fn fit_predictor(algo: Algorithm, hp: &Assignment, x: &Array2<f64>, y: &[usize], n_classes: usize, seed: u64) -> Result<TrainedModel> {
    if algo.kind() != ComponentKind::Predictor {
        return Err(Error::NotAPredictor(algo.id().into()));
    }
    if !algo.handles_missing() && x.iter().any(|v| v.is_nan()) {
        return Err(Error::MissingValues {
            component: algo.id().into(),
        });
    }
    if x.ncols() == 0 && algo != Algorithm::ZeroR {
        return Err(Error::NoFeatures);
    }
    let start = Instant::now();
    let data = TrainingSet { x, y, n_classes };
    let counts = data.class_counts();
    let present = counts.iter().filter(|&&c| c > 0.0).count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degenerate = present < 2;
    let model: Box<dyn Model> = if degenerate {
        Box::new(Constant(data.majority()))
    } else {
        let d = x.ncols();
        match algo {
            Algorithm::ZeroR => p::fit_zero_r(data),
            Algorithm::OneR => p::fit_one_r(data, get_usize(hp, "min_bucket", 6)),
            Algorithm::Ibk => p::fit_knn(
                data,
                get_usize(hp, "k", 1),
                get_str(hp, "weighting", "uniform") == "inverse_distance",
            ),
            Algorithm::NaiveBayes => p::fit_gaussian_nb(data, get_f64(hp, "var_smoothing", 1e-9)),
            Algorithm::RandomTree => {
                let k = match get_usize(hp, "k_features", 0) {
                    0 => (d as f64).log2().floor() as usize + 1,
                    k => k,
                };
                let max_depth = (get_str(hp, "depth_limited", "no") == "yes").then(|| get_usize(hp, "max_depth", 10));
                let params = TreeParams {
                    max_depth,
                    min_leaf: get_usize(hp, "min_leaf", 1),
                    features_per_split: Some(k.min(d)),
                    criterion: Criterion::Entropy,
                };
                p::fit_tree(data, &params, &mut rng)
            }
            Algorithm::DecisionTree => {
                let params = TreeParams {
                    max_depth: Some(get_usize(hp, "max_depth", 12)),
                    min_leaf: get_usize(hp, "min_leaf", 2),
                    features_per_split: None,
                    criterion: if get_str(hp, "criterion", "entropy") == "gini" {
                        Criterion::Gini
                    } else {
                        Criterion::Entropy
                    },
                };
                p::fit_tree(data, &params, &mut rng)
            }
            Algorithm::RandomForest => {
                let k = match get_str(hp, "max_features", "sqrt") {
                    "all" => d,
                    "log2" => (d as f64).log2().floor() as usize + 1,
                    _ => (d as f64).sqrt().round() as usize,
                };
                let params = TreeParams {
                    max_depth: None,
                    min_leaf: get_usize(hp, "min_leaf", 1),
                    features_per_split: Some(k.clamp(1, d)),
                    criterion: Criterion::Gini,
                };
                p::fit_bagged_trees(data, get_usize(hp, "n_trees", 10), 1.0, &params, &mut rng)
            }
            Algorithm::Logistic => {
                let l2 = if get_str(hp, "penalty", "l2") == "l2" {
                    get_f64(hp, "l2", 1e-4)
                } else {
                    0.0
                };
                p::fit_logistic(data, get_f64(hp, "learning_rate", 0.3), get_usize(hp, "epochs", 100), l2)
            }
            Algorithm::LinearSvm => p::fit_linear_svm(data, get_f64(hp, "lambda", 1e-3), get_usize(hp, "epochs", 10), &mut rng),
            Algorithm::Bagging => {
                let params = TreeParams {
                    max_depth: Some(get_usize(hp, "max_depth", 10)),
                    min_leaf: 1,
                    features_per_split: None,
                    criterion: Criterion::Gini,
                };
                p::fit_bagged_trees(
                    data,
                    get_usize(hp, "n_estimators", 10),
                    get_f64(hp, "bag_fraction", 1.0),
                    &params,
                    &mut rng,
                )
            }
            Algorithm::AdaBoost => p::fit_adaboost(data, get_usize(hp, "rounds", 10), get_usize(hp, "max_depth", 1), &mut rng),
            Algorithm::MultinomialNb => p::fit_multinomial_nb(data, get_f64(hp, "alpha", 1.0)),
            Algorithm::Impute | Algorithm::Normalize | Algorithm::RandomSubset => unreachable!("checked above"),
        }
    };
    Ok(TrainedModel {
        component: algo.component(),
        model,
        n_features: x.ncols(),
        train_time: start.elapsed().as_secs_f64(),
        degenerate,
    })
}

/// Fits preprocessor `algo` on a training matrix.
pub fn fit_preprocessor(algo: Algorithm, hp: &Assignment, x: &Array2<f64>) -> Result<Transform> {
    match algo {
        Algorithm::Impute => {
            let strategy = if get_str(hp, "strategy", "mean") == "mode" {
                ImputeStrategy::Mode
            } else {
                ImputeStrategy::Mean
            };
            Ok(Transform::fit_impute(x, strategy))
        }
        Algorithm::Normalize => Ok(Transform::fit_normalize(x)),
        Algorithm::RandomSubset => Transform::fit_random_subset(x.ncols(), get_f64(hp, "fraction", 0.5), get_usize(hp, "seed", 1) as u64),
        _ => Err(Error::Config(format!("`{}` is not a preprocessor", algo.id()))),
    }
}

/// Fits a predictor by component reference on a dataset.
pub fn fit(component: &ComponentRef, hp: &Assignment, train: &Dataset, seed: u64) -> Result<TrainedModel> {
    let algo = Algorithm::from_id(&component.id).ok_or_else(|| Error::UnknownComponent(component.id.clone()))?;
    fit_predictor(algo, hp, train.features(), train.labels(), train.n_classes(), seed)
}

/// Fits a preprocessor on `fitted_on` and applies it to `data`.
pub fn apply_preprocessor(component: &ComponentRef, hp: &Assignment, data: &Dataset, fitted_on: &Dataset) -> Result<Dataset> {
    let algo = Algorithm::from_id(&component.id).ok_or_else(|| Error::UnknownComponent(component.id.clone()))?;
    let t = fit_preprocessor(algo, hp, fitted_on.features())?;
    let x = t.apply(data.features());
    let names = match &t {
        Transform::Impute { keep, .. } => keep.iter().map(|&j| data.feature_names()[j].clone()).collect(),
        Transform::Select { columns } => columns.iter().map(|&j| data.feature_names()[j].clone()).collect(),
        Transform::Normalize { .. } => data.feature_names().to_vec(),
    };
    let idx: Vec<usize> = (0..data.n_instances()).collect();
    let mut out = data.subset(&idx);
    out.replace_features(x, names);
    Ok(out)
}

/// An ordered set of built-in components available to the search.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentPool {
    algorithms: Vec<Algorithm>,
}

impl Default for ComponentPool {
    fn default() -> Self {
        Self::standard()
    }
}

impl ComponentPool {
    /// Three preprocessors and twelve predictors.
    pub fn standard() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
        }
    }

    /// All preprocessors plus the named predictors.
    pub fn with_predictors<S: AsRef<str>>(ids: &[S]) -> Result<Self> {
        let mut algorithms: Vec<Algorithm> = Algorithm::ALL
            .into_iter()
            .filter(|a| a.kind() == ComponentKind::Preprocessor)
            .collect();
        for id in ids {
            let a = Algorithm::from_id(id.as_ref()).ok_or_else(|| Error::UnknownComponent(id.as_ref().into()))?;
            if a.kind() != ComponentKind::Predictor {
                return Err(Error::NotAPredictor(id.as_ref().into()));
            }
            if !algorithms.contains(&a) {
                algorithms.push(a);
            }
        }
        Ok(Self { algorithms })
    }

    pub fn algorithms(&self) -> &[Algorithm] {
        &self.algorithms
    }

    pub fn predictors(&self) -> Vec<Algorithm> {
        self.algorithms
            .iter()
            .copied()
            .filter(|a| a.kind() == ComponentKind::Predictor)
            .collect()
    }

    pub fn defs(&self) -> Vec<ComponentDef> {
        self.algorithms.iter().map(|a| a.def()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand_distr_free::normal;

    mod rand_distr_free {
        use rand::Rng;
        /// Box-Muller standard normal.
        pub fn normal<R: Rng>(rng: &mut R) -> f64 {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }

    fn predictors() -> Vec<Algorithm> {
        ComponentPool::standard().predictors()
    }

    #[test]
    fn pool_has_landmarkers_and_valid_defaults() {
        let pool = ComponentPool::standard();
        assert_eq!(pool.predictors().len(), 12);
        for l in LANDMARKERS {
            assert!(pool.algorithms().contains(&l));
        }
        for a in Algorithm::ALL {
            a.schema().validate(&a.schema().defaults()).unwrap();
            assert_eq!(Algorithm::from_id(a.id()), Some(a));
        }
    }

    #[test]
    fn zero_r_predicts_majority() {
        let x = array![[1.0], [2.0], [3.0], [4.0], [5.0]];
        let y = [1, 1, 0, 1, 0];
        let m = fit_predictor(Algorithm::ZeroR, &Assignment::new(), &x, &y, 2, 0).unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), vec![1; 5]);
    }

    #[test]
    fn one_nn_has_zero_training_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Array2::from_shape_fn((60, 3), |_| rng.gen::<f64>());
        let y: Vec<usize> = (0..60).map(|i| i % 3).collect();
        let m = fit_predictor(Algorithm::Ibk, &Algorithm::Ibk.schema().defaults(), &x, &y, 3, 0).unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), y);
    }

    /// A feature that splits the classes perfectly, plus noise columns;
    /// brute-force check that some single feature gives a zero-error rule.
    #[test]
    fn one_r_perfect_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 80;
        let y: Vec<usize> = (0..n).map(|i| usize::from(i >= n / 2)).collect();
        let x = Array2::from_shape_fn((n, 3), |(i, j)| {
            if j == 1 {
                y[i] as f64 * 10.0 + rng.gen::<f64>()
            } else {
                rng.gen::<f64>()
            }
        });
        let perfect: Vec<usize> = (0..3)
            .filter(|&j| {
                let max0 = (0..n).filter(|&i| y[i] == 0).map(|i| x[[i, j]]).fold(f64::MIN, f64::max);
                let min1 = (0..n).filter(|&i| y[i] == 1).map(|i| x[[i, j]]).fold(f64::MAX, f64::min);
                max0 < min1
            })
            .collect();
        assert_eq!(perfect, vec![1]);
        let m = fit_predictor(Algorithm::OneR, &Algorithm::OneR.schema().defaults(), &x, &y, 2, 0).unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), y);
    }

    #[test]
    fn naive_bayes_on_separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let blob = |rng: &mut ChaCha8Rng, n: usize, cx: f64| {
            Array2::from_shape_fn((n, 2), |(_, j)| if j == 0 { cx } else { 0.0 } + 0.5 * normal(rng))
        };
        let n = 100;
        let mut x = blob(&mut rng, n, -3.0);
        x.append(ndarray::Axis(0), blob(&mut rng, n, 3.0).view()).unwrap();
        let y: Vec<usize> = (0..2 * n).map(|i| usize::from(i >= n)).collect();
        let train: Vec<usize> = (0..2 * n).filter(|i| i % 2 == 0).collect();
        let test: Vec<usize> = (0..2 * n).filter(|i| i % 2 == 1).collect();
        let xt = x.select(ndarray::Axis(0), &train);
        let yt: Vec<usize> = train.iter().map(|&i| y[i]).collect();
        let m = fit_predictor(Algorithm::NaiveBayes, &Algorithm::NaiveBayes.schema().defaults(), &xt, &yt, 2, 0).unwrap();
        let pred = m.predict(x.select(ndarray::Axis(0), &test).view()).unwrap();
        let wrong = pred.iter().zip(test.iter()).filter(|(p, &i)| **p != y[i]).count();
        assert!((wrong as f64 / test.len() as f64) < 0.05);
    }

    #[test]
    fn random_tree_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Array2::from_shape_fn((100, 5), |_| rng.gen::<f64>());
        let y: Vec<usize> = (0..100).map(|i| usize::from(x[[i, 0]] + x[[i, 3]] > 1.0)).collect();
        let hp = Algorithm::RandomTree.schema().defaults();
        let a = fit_predictor(Algorithm::RandomTree, &hp, &x, &y, 2, 9).unwrap();
        let b = fit_predictor(Algorithm::RandomTree, &hp, &x, &y, 2, 9).unwrap();
        assert_eq!(a.predict(x.view()).unwrap(), b.predict(x.view()).unwrap());
    }

    #[test]
    fn constant_features_give_majority() {
        let x = Array2::from_elem((40, 3), 2.5);
        let y: Vec<usize> = (0..40).map(|i| usize::from(i % 10 < 3)).collect();
        for algo in predictors() {
            let m = fit_predictor(algo, &algo.schema().defaults(), &x, &y, 2, 3).unwrap();
            let pred = m.predict(x.view()).unwrap();
            assert!(pred.iter().all(|&p| p == 0), "{algo} did not predict the majority");
        }
    }

    #[test]
    fn single_class_training_is_flagged() {
        let x = array![[1.0], [2.0]];
        let m = fit_predictor(Algorithm::Logistic, &Assignment::new(), &x, &[1, 1], 2, 0).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.predict(x.view()).unwrap(), vec![1, 1]);
    }

    #[test]
    fn arity_and_missing_errors() {
        let x = array![[1.0, 2.0], [2.0, 1.0]];
        let m = fit_predictor(Algorithm::ZeroR, &Assignment::new(), &x, &[0, 1], 2, 0).unwrap();
        assert!(matches!(m.predict(array![[1.0]].view()), Err(Error::ArityMismatch { .. })));
        let xm = array![[1.0, f64::NAN], [2.0, 1.0]];
        assert!(matches!(
            fit_predictor(Algorithm::NaiveBayes, &Assignment::new(), &xm, &[0, 1], 2, 0),
            Err(Error::MissingValues { .. })
        ));
    }

    #[test]
    fn every_predictor_handles_its_defaults_and_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let x = Array2::from_shape_fn((90, 4), |_| rng.gen::<f64>());
        let y: Vec<usize> = (0..90).map(|i| (x[[i, 0]] * 3.0) as usize % 3).collect();
        for algo in predictors() {
            for _ in 0..3 {
                let hp = algo.schema().sample(&mut rng);
                let m = fit_predictor(algo, &hp, &x, &y, 3, 5).unwrap();
                let pred = m.predict(x.view()).unwrap();
                assert_eq!(pred.len(), 90);
                assert!(pred.iter().all(|&p| p < 3));
                assert!(algo.cost_per_instance(&hp, 4, 3) > 0.0);
            }
        }
    }
}
