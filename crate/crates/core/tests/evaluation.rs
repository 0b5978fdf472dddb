use autocull::components::{ComponentPool, Dataset};
use autocull::configspace::{build_tree, ConfigTree, Pipeline, StructureTemplate};
use autocull::evaluation::{
    charge_landmarkers, check_validity, cross_validate, read_records, write_records, Budget, Clock, EvaluationRecord, FoldPlan,
    InvalidReason, Status, Validity,
};
use autocull::harness::synth;
use autocull::Error;
use ndarray::Array2;
use proptest::prelude::*;

fn tree() -> ConfigTree {
    build_tree(&ComponentPool::standard().defs(), &StructureTemplate::default()).unwrap()
}

fn pipeline(tree: &ConfigTree, ids: &[&str]) -> Pipeline {
    tree.default_pipeline(tree.find_path(ids).unwrap())
}

fn balanced(n: usize) -> Dataset {
    let x = Array2::from_shape_fn((n, 2), |(i, j)| (i * 7 + j) as f64 % 5.0);
    let y = (0..n).map(|i| i % 2).collect();
    Dataset::new("balanced", x, y, vec!["a".into(), "b".into()]).unwrap()
}

fn with_missing() -> Dataset {
    let mut x = Array2::from_shape_fn((40, 3), |(i, j)| (i + j) as f64);
    x[[3, 1]] = f64::NAN;
    let y = (0..40).map(|i| usize::from(i >= 20)).collect();
    Dataset::new("holes", x, y, vec!["a".into(), "b".into()]).unwrap()
}

#[test]
fn zero_r_on_even_split_is_exactly_half() {
    let t = tree();
    let mut budget = Budget::from_seconds(100.0);
    let r = cross_validate(&pipeline(&t, &["zero_r"]), &balanced(100), 10, &mut budget, Clock::Virtual, 1).unwrap();
    assert_eq!(r.status, Status::Complete);
    assert_eq!(r.mean_error, Some(0.5));
}

#[test]
fn complete_record_mean_is_fold_mean() {
    let t = tree();
    let data = synth::generate("threshold", 0, 3);
    let mut budget = Budget::from_seconds(100.0);
    let r = cross_validate(&pipeline(&t, &["decision_tree"]), &data, 10, &mut budget, Clock::Virtual, 2).unwrap();
    assert!(r.is_complete());
    assert_eq!(r.fold_errors.len(), 10);
    let mean = r.fold_errors.iter().sum::<f64>() / 10.0;
    assert!((r.mean_error.unwrap() - mean).abs() < 1e-15);
    assert_eq!(budget.consumed_us(), r.wall_time_us());
}

#[test]
fn exhausted_budget_is_an_error() {
    let t = tree();
    let mut budget = Budget::from_seconds(0.0);
    let err = cross_validate(&pipeline(&t, &["zero_r"]), &balanced(20), 10, &mut budget, Clock::Virtual, 1).unwrap_err();
    assert!(matches!(err, Error::BudgetExhausted));
}

#[test]
fn short_budget_gives_incomplete_record_and_clamps() {
    let t = tree();
    let data = synth::generate("linear", 1, 0);
    let mut budget = Budget::from_us(50_000);
    let r = cross_validate(&pipeline(&t, &["random_forest"]), &data, 10, &mut budget, Clock::Virtual, 1).unwrap();
    assert_eq!(r.status, Status::Incomplete);
    assert!(budget.is_exhausted());
    assert_eq!(budget.consumed_us(), 50_000);
    assert_eq!(r.wall_time_us(), 50_000);
}

#[test]
fn validity_rules() {
    let t = tree();
    let holes = with_missing();
    assert_eq!(
        check_validity(&pipeline(&t, &["naive_bayes"]), &holes),
        Validity::Invalid(InvalidReason::MissingValuesUnhandled {
            component: "naive_bayes".into()
        })
    );
    assert!(check_validity(&pipeline(&t, &["impute", "naive_bayes"]), &holes).is_valid());
    assert!(check_validity(&pipeline(&t, &["decision_tree"]), &holes).is_valid());
    let mut doubled = pipeline(&t, &["normalize", "decision_tree"]);
    doubled.components.insert(0, doubled.components[0].clone());
    doubled.hyperparams.insert(0, doubled.hyperparams[0].clone());
    assert!(matches!(
        check_validity(&doubled, &balanced(20)),
        Validity::Invalid(InvalidReason::DuplicatePreprocessor { .. })
    ));
}

#[test]
fn landmarker_deduction() {
    let rec = |secs: f64| EvaluationRecord {
        wall_time: secs,
        ..EvaluationRecord::rejected("d", &pipeline(&tree(), &["zero_r"]))
    };
    let total = Budget::from_seconds(100.0);
    let (b, over) = charge_landmarkers(&total, &[rec(3.0), rec(4.0)]);
    assert_eq!((b.remaining(), over), (93.0, false));
    let (b, over) = charge_landmarkers(&total, &[]);
    assert_eq!((b, over), (total, false));
    let (b, over) = charge_landmarkers(&total, &[rec(120.0)]);
    assert!(over && b.is_exhausted());
    assert_eq!(b.consumed_us(), b.total_us());
}

#[test]
fn log_round_trip_skips_malformed_lines() {
    let t = tree();
    let mut budget = Budget::from_seconds(100.0);
    let r = cross_validate(&pipeline(&t, &["one_r"]), &balanced(30), 5, &mut budget, Clock::Virtual, 4).unwrap();
    let mut buf = Vec::new();
    write_records(&mut buf, &[r.clone(), r.clone()]).unwrap();
    buf.extend_from_slice(b"{not json\n");
    let back = read_records(buf.as_slice()).unwrap();
    assert_eq!(back.records, vec![r.clone(), r]);
    assert_eq!(back.malformed, 1);
}

proptest! {
    #[test]
    fn folds_are_stratified(labels in prop::collection::vec(0usize..4, 10..200), k in 2usize..=10, seed: u64) {
        let plan = FoldPlan::stratified(&labels, k, seed);
        let k = plan.k();
        let mut sizes = vec![0usize; k];
        let n_classes = labels.iter().max().unwrap() + 1;
        let mut per_class = vec![vec![0usize; k]; n_classes];
        for (&c, &f) in labels.iter().zip(plan.fold_of()) {
            sizes[f] += 1;
            per_class[c][f] += 1;
        }
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for counts in per_class {
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(&plan, &FoldPlan::stratified(&labels, k, seed));
    }

    #[test]
    fn charges_never_exceed_total(total_us in 0u64..10_000_000, charges in prop::collection::vec(0u64..3_000_000, 0..20)) {
        let mut b = Budget::from_us(total_us);
        let mut spent = 0u64;
        for c in charges {
            let before = b.consumed_us();
            b.charge_us(c);
            spent += b.consumed_us() - before;
            prop_assert!(b.consumed_us() <= b.total_us());
        }
        prop_assert_eq!(spent, b.consumed_us());
        prop_assert_eq!(b.consumed_us() + b.remaining_us(), total_us);
    }
}
