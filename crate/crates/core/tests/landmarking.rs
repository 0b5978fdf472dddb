use autocull::components::{ComponentPool, Dataset};
use autocull::configspace::{build_tree, PipelineDescriptor, StructureTemplate};
use autocull::evaluation::{Budget, Clock, EvaluationRecord, Status};
use autocull::harness::synth;
use autocull::landmarking::{
    design_space, evaluate_landmarkers, most_similar, pearson, similarity, Candidate, LandmarkSettings, LandmarkVector,
};
use autocull::metabase::MetaKnowledgeBase;
use autocull::Error;
use ndarray::Array2;
use proptest::prelude::*;

fn some(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().copied().map(Some).collect()
}

fn cand(name: &str, c: Option<f64>, n: u64) -> Candidate {
    Candidate {
        dataset: name.into(),
        coefficient: c,
        evaluations: n,
    }
}

fn rec(dataset: &str, predictor: &str, error: f64) -> EvaluationRecord {
    EvaluationRecord {
        dataset: dataset.into(),
        pipeline: PipelineDescriptor {
            components: vec![predictor.into()],
            hyperparams: vec![Default::default()],
        },
        predictor: predictor.into(),
        fold_errors: vec![error],
        mean_error: Some(error),
        wall_time: 1.0,
        status: Status::Complete,
    }
}

#[test]
fn perfect_relations() {
    let r = pearson(&some(&[0.1, 0.2, 0.3, 0.4, 0.5]), &some(&[0.2, 0.4, 0.6, 0.8, 1.0])).unwrap();
    assert!((r - 1.0).abs() < 1e-12);
    let r = pearson(&some(&[0.1, 0.2, 0.3]), &some(&[0.3, 0.2, 0.1])).unwrap();
    assert!((r + 1.0).abs() < 1e-12);
}

#[test]
fn worked_vector_pair_against_covariance_formula() {
    let x = [0.10, 0.40, 0.20, 0.35, 0.25];
    let y = [0.15, 0.30, 0.30, 0.30, 0.20];
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&x), mean(&y));
    let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / 5.0;
    let sd = |v: &[f64], m: f64| (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / 5.0).sqrt();
    let expected = cov / (sd(&x, mx) * sd(&y, my));
    assert!((pearson(&some(&x), &some(&y)).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn undefined_cases() {
    assert_eq!(pearson(&some(&[0.2, 0.2, 0.2]), &some(&[0.1, 0.2, 0.3])), None);
    assert_eq!(pearson(&[Some(0.1), None], &[Some(0.3), Some(0.4)]), None);
    let a = LandmarkVector::from_values(&["a", "b", "c"], &[Some(0.1), Some(0.2), None]);
    let b = LandmarkVector::from_values(&["a", "b", "c"], &[Some(0.3), Some(0.1), Some(0.2)]);
    assert_eq!(similarity(&a, &b), None);
}

#[test]
fn most_similar_rules() {
    let (d, note) = most_similar(&[cand("D1", Some(0.9), 1), cand("D2", Some(0.3), 50)]).unwrap();
    assert_eq!((d.as_str(), note), ("D1", None));
    let (d, note) = most_similar(&[cand("D1", Some(0.9), 10), cand("D2", Some(0.9), 40)]).unwrap();
    assert_eq!(d, "D2");
    assert!(note.is_some());
    assert!(matches!(most_similar(&[]), Err(Error::NoComparableDataset)));
    assert!(matches!(most_similar(&[cand("D1", None, 3)]), Err(Error::NoComparableDataset)));
}

#[test]
fn zero_r_landmark_is_minority_fraction() {
    let x = Array2::from_shape_fn((100, 2), |(i, j)| (i + j) as f64);
    let y = (0..100).map(|i| usize::from(i % 5 < 2)).collect();
    let data = Dataset::new("sixty-forty", x, y, vec!["a".into(), "b".into()]).unwrap();
    let budget = Budget::from_seconds(100.0);
    let run = evaluate_landmarkers(&["zero_r"], &data, &budget, 10, Clock::Virtual, 1).unwrap();
    assert!((run.vector.values()[0].unwrap() - 0.4).abs() < 1e-12);
    let spent: u64 = run.records.iter().map(|r| r.wall_time_us()).sum();
    assert_eq!(run.budget.remaining_us(), budget.total_us() - spent);
}

#[test]
fn landmarkers_get_imputation_and_stop_when_budget_runs_out() {
    let data = synth::generate("counts", 0, 2);
    let names = ["random_tree", "zero_r", "ibk", "naive_bayes", "one_r"];
    let run = evaluate_landmarkers(&names, &data, &Budget::from_seconds(100.0), 10, Clock::Virtual, 3).unwrap();
    assert_eq!(run.vector.values().len(), 5);
    assert!(run.vector.values().iter().all(Option::is_some));
    assert!(run.imputed.contains(&"ibk".to_string()) && run.imputed.contains(&"naive_bayes".to_string()));
    assert!(!run.exhausted);
    let three: u64 = run.records[..3].iter().map(|r| r.wall_time_us()).sum();
    let tight = Budget::from_us(three);
    let cut = evaluate_landmarkers(&names, &data, &tight, 10, Clock::Virtual, 3).unwrap();
    assert!(cut.exhausted && cut.budget.is_exhausted());
    assert_eq!(cut.vector.values().iter().filter(|v| v.is_none()).count(), 2);
}

#[test]
fn design_space_identity_and_fallback() {
    let pool = ComponentPool::standard();
    let tree = build_tree(&pool.defs(), &StructureTemplate::default()).unwrap();
    let data = synth::generate("linear", 0, 5);
    let predictors: Vec<&str> = pool.predictors().iter().map(|a| a.id()).collect();
    let landmarkers: Vec<String> = ["zero_r", "one_r", "naive_bayes"].map(String::from).to_vec();
    let records: Vec<EvaluationRecord> = predictors
        .iter()
        .enumerate()
        .flat_map(|(i, p)| [rec("prior", p, 0.05 * i as f64), rec("flat", p, 0.3)])
        .collect();
    let base = MetaKnowledgeBase::ingest(&records);
    let budget = Budget::from_seconds(200.0);
    let full = LandmarkSettings {
        landmarkers: landmarkers.clone(),
        k: predictors.len(),
        folds: 10,
        clock: Clock::Virtual,
    };
    let designed = design_space(&base, &tree, &data, &full, &budget, 1).unwrap();
    assert_eq!(designed.report.chosen.as_deref(), Some("prior"));
    assert_eq!(designed.tree.enumerate_structures(), tree.enumerate_structures());
    assert_eq!(designed.report.coefficients["flat"], None);

    let only_flat = MetaKnowledgeBase::ingest(records.iter().filter(|r| r.dataset == "flat"));
    let fallback = design_space(&only_flat, &tree, &data, &LandmarkSettings { k: 1, ..full }, &budget, 1).unwrap();
    assert!(fallback.fell_back());
    assert_eq!(fallback.tree, tree);
    assert!(fallback.budget().consumed_us() > 0);
}

proptest! {
    #[test]
    fn pearson_invariants(
        pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..8),
        scale in 0.01f64..100.0,
        shift in -10.0f64..10.0,
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let spread = |v: &[f64]| v.iter().copied().fold(f64::MIN, f64::max) - v.iter().copied().fold(f64::MAX, f64::min);
        prop_assume!(spread(&x) > 1e-3 && spread(&y) > 1e-3);
        let r = pearson(&some(&x), &some(&y)).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert_eq!(pearson(&some(&y), &some(&x)), Some(r));
        prop_assert!((pearson(&some(&x), &some(&x)).unwrap() - 1.0).abs() < 1e-12);
        let moved: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
        prop_assert!((pearson(&some(&moved), &some(&y)).unwrap() - r).abs() < 1e-9);
    }
}
