//! The benchmark inputs must stay valid as the library evolves.

use autocull::components::ComponentPool;
use autocull::configspace::{build_tree, StructureTemplate};
use autocull::evaluation::{cross_validate, Budget, Clock, Status};
use autocull::harness::synth;

#[test]
fn cross_validation_workloads_complete() {
    let data = synth::generate("linear", 0, 1);
    let tree = build_tree(&ComponentPool::standard().defs(), &StructureTemplate::default()).unwrap();
    for predictor in ["zero_r", "naive_bayes", "decision_tree", "random_forest"] {
        let pipeline = tree.default_pipeline(tree.find_path(&[predictor]).unwrap());
        let mut budget = Budget::from_seconds(1e6);
        let record = cross_validate(&pipeline, &data, 10, &mut budget, Clock::Virtual, 7).unwrap();
        assert_eq!(record.status, Status::Complete, "{predictor}");
    }
}
