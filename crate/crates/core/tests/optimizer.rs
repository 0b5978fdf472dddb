use autocull::components::ComponentPool;
use autocull::configspace::{
    build_tree, ComponentDef, ComponentRef, ConfigTree, HpValue, HyperparamSchema, HyperparamSpec, StructureTemplate,
};
use autocull::evaluation::Budget;
use autocull::harness::synth;
use autocull::optimizer::{best_record, propose_exploit, run, OptimizerPolicy, RunStatus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn full_tree() -> ConfigTree {
    build_tree(&ComponentPool::standard().defs(), &StructureTemplate::default()).unwrap()
}

#[test]
fn single_predictor_tree_only_tunes_that_predictor() {
    let mut tree = full_tree();
    tree.deactivate_predictors(&["decision_tree"]).unwrap();
    let data = synth::generate("threshold", 0, 1);
    let r = run(&tree, &data, Budget::from_seconds(15.0), &OptimizerPolicy::default(), 9);
    assert!(!r.log.is_empty());
    assert!(r.log.iter().all(|rec| rec.predictor == "decision_tree"));
}

#[test]
fn virtual_budget_is_used_exactly() {
    let data = synth::generate("xor", 0, 2);
    let budget = Budget::from_seconds(12.0);
    let r = run(&full_tree(), &data, budget, &OptimizerPolicy::default(), 3);
    let spent: u64 = r.log.iter().map(|rec| rec.wall_time_us()).sum();
    assert_eq!(spent, budget.total_us());
    assert!(r.budget.is_exhausted());
    assert_eq!(r.status, RunStatus::Complete);
}

#[test]
fn fixed_structure_starts_from_defaults() {
    let tree = full_tree();
    let data = synth::generate("linear", 0, 4);
    let structure = tree.find_path(&["normalize", "random_forest"]).unwrap();
    let fixed = tree.default_pipeline(structure).descriptor();
    let policy = OptimizerPolicy {
        structure_fixed: Some(fixed.clone()),
        ..OptimizerPolicy::default()
    };
    let r = run(&tree, &data, Budget::from_seconds(20.0), &policy, 5);
    assert_eq!(r.log[0].pipeline, fixed);
    assert!(r.log.iter().all(|rec| rec.pipeline.components == fixed.components));
}

#[test]
fn identical_seeds_give_identical_logs() {
    let data = synth::generate("counts", 0, 6);
    let policy = OptimizerPolicy {
        explore_probability: 1.0,
        ..OptimizerPolicy::default()
    };
    let a = run(&full_tree(), &data, Budget::from_seconds(10.0), &policy, 77);
    let b = run(&full_tree(), &data, Budget::from_seconds(10.0), &policy, 77);
    assert_eq!(a.log, b.log);
}

#[test]
fn empty_subspace_is_an_immediate_incomplete_result() {
    let mut tree = full_tree();
    tree.deactivate_predictors::<&str>(&[]).unwrap();
    assert!(tree.active_leaves().is_empty());
    let budget = Budget::from_seconds(5.0);
    let r = run(&tree, &synth::generate("xor", 0, 1), budget, &OptimizerPolicy::default(), 1);
    assert_eq!(r.status, RunStatus::Incomplete);
    assert!(r.log.is_empty());
    assert_eq!(r.budget, budget);
}

#[test]
fn exploit_on_degenerate_domain_returns_the_incumbent() {
    let schema = HyperparamSchema::new(vec![HyperparamSpec::categorical("only", &["x"], "x")]).unwrap();
    let defs = vec![ComponentDef::new(ComponentRef::predictor("p"), schema)];
    let tree = build_tree(&defs, &StructureTemplate::predictors_only()).unwrap();
    let incumbent = tree.default_pipeline(tree.find_path(&["p"]).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..20 {
        assert_eq!(propose_exploit(&tree, &[incumbent.clone()], &mut rng), incumbent);
    }
}

#[test]
fn exploit_changes_at_most_one_value_within_bounds() {
    let schema = HyperparamSchema::new(vec![
        HyperparamSpec::continuous("a", 0.0, 1.0, 1.0),
        HyperparamSpec::integer("b", 1, 5, 3),
    ])
    .unwrap();
    let defs = vec![ComponentDef::new(ComponentRef::predictor("p"), schema)];
    let tree = build_tree(&defs, &StructureTemplate::predictors_only()).unwrap();
    let incumbent = tree.default_pipeline(tree.find_path(&["p"]).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let p = propose_exploit(&tree, &[incumbent.clone()], &mut rng);
        assert_eq!(p.structure, incumbent.structure);
        let changed = ["a", "b"]
            .iter()
            .filter(|n| p.hyperparams[0][**n] != incumbent.hyperparams[0][**n])
            .count();
        assert!(changed <= 1);
        let a = p.hyperparams[0]["a"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&a));
        assert!(matches!(p.hyperparams[0]["b"], HpValue::Int(1..=5)));
    }
}

#[test]
fn best_record_prefers_earliest_on_ties() {
    let data = synth::generate("threshold", 1, 8);
    let r = run(&full_tree(), &data, Budget::from_seconds(20.0), &OptimizerPolicy::default(), 8);
    let best = best_record(&r.log).unwrap();
    let min = r
        .log
        .iter()
        .filter(|x| x.is_complete())
        .filter_map(|x| x.mean_error)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(best.mean_error, Some(min));
    let first = r.log.iter().position(|x| x.is_complete() && x.mean_error == Some(min)).unwrap();
    assert_eq!(best, &r.log[first]);
}
