//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line
//! with the measured quantity, then asserts on it.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use autocull::analysis::{friedman, nemenyi_cd, pairwise_critical, rank_settings, ErrorTable, RankMatrix};
use autocull::components::{ComponentPool, LANDMARKERS};
use autocull::configspace::{build_tree, ComponentDef, ComponentRef, ConfigTree, HyperparamSchema, PipelineDescriptor, StructureTemplate};
use autocull::evaluation::{Budget, Clock, EvaluationRecord, Status};
use autocull::harness::{self, synth, ExperimentConfig, RepeatRecord};
use autocull::landmarking::{design_space, evaluate_landmarkers, pearson, LandmarkSettings};
use autocull::metabase::{MetaKnowledgeBase, TopKMode};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, pass: bool, detail: impl AsRef<str>) {
    println!("criterion {n}: {} ({})", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[test]
fn criterion_01_four_way_tie_shares_rank() {
    let errors = [0.10, 0.10, 0.10, 0.10, 0.25, 0.30];
    let cells = errors.iter().map(|&e| vec![Some(e)]).collect();
    let table = ErrorTable::from_rows(names("s", errors.len()), vec!["d".into()], cells).unwrap();
    let m = rank_settings(&table).unwrap();
    let tied: Vec<f64> = (0..4).map(|s| m.ranks[s][0]).collect();
    let pass = tied.iter().all(|&r| r == 2.5) && m.ranks[4][0] == 5.0 && m.ranks[5][0] == 6.0;
    verdict(1, pass, format!("tied ranks {tied:?}"));
    assert!(pass);
}

#[test]
fn criterion_02_critical_difference() {
    let cd = nemenyi_cd(18, 11, 0.05).unwrap();
    let within = ((cd - 7.942) / 7.942).abs() < 0.01;
    let settings = vec!["O-k4".to_string(), "O-k8".to_string(), "baseline".to_string()];
    let mut m = RankMatrix::from_ranks(settings, names("d", 11), vec![vec![1.0; 11], vec![2.0; 11], vec![3.0; 11]]);
    m.averages = vec![6.68, 5.27, 15.09];
    let pairs = pairwise_critical(&m, cd);
    let flagged = |a: &str, b: &str| pairs.iter().any(|p| p.a == a && p.b == b && p.critical);
    let pass = within && flagged("O-k4", "baseline") && flagged("O-k8", "baseline") && !flagged("O-k4", "O-k8");
    verdict(2, pass, format!("CD(18, 11) = {cd:.4}"));
    assert!(pass);
}

/// Textbook single-pass formula, kept independent of the library routine.
fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

#[test]
fn criterion_03_pearson_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let wrap = |v: &[f64]| v.iter().copied().map(Some).collect::<Vec<_>>();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(3..=5);
        let x: Vec<f64> = (0..len).map(|_| rng.gen()).collect();
        let y: Vec<f64> = (0..len).map(|_| rng.gen()).collect();
        let r = pearson(&wrap(&x), &wrap(&y)).expect("non-constant vectors");
        let diff = (r - pearson_oracle(&x, &y)).abs();
        worst = worst.max(diff);
        let symmetric = pearson(&wrap(&y), &wrap(&x)) == Some(r);
        let own = pearson(&wrap(&x), &wrap(&x)).unwrap();
        let (a, b) = (rng.gen_range(0.1..10.0), rng.gen_range(-5.0..5.0));
        let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let flipped: Vec<f64> = x.iter().map(|v| b - a * v).collect();
        let invariant = (pearson(&wrap(&scaled), &wrap(&y)).unwrap() - r).abs() < 1e-9
            && (pearson(&wrap(&flipped), &wrap(&y)).unwrap() + r).abs() < 1e-9;
        if diff > 1e-12 || !symmetric || (own - 1.0).abs() > 1e-12 || !invariant {
            failures += 1;
        }
    }
    verdict(
        3,
        failures == 0,
        format!("{failures} of 1000 cases failed, max oracle gap {worst:.2e}"),
    );
    assert_eq!(failures, 0);
}

fn random_tree(rng: &mut ChaCha8Rng) -> (ConfigTree, Vec<String>) {
    let n_pred = rng.gen_range(1..=30);
    let n_pre = rng.gen_range(0..=3);
    let preds = names("p", n_pred);
    let pres = names("pre", n_pre);
    let defs: Vec<ComponentDef> = preds
        .iter()
        .map(|p| ComponentDef::new(ComponentRef::predictor(p), HyperparamSchema::empty()))
        .chain(
            pres.iter()
                .map(|p| ComponentDef::new(ComponentRef::preprocessor(p), HyperparamSchema::empty())),
        )
        .collect();
    let stages = pres.chunks(2).map(<[String]>::to_vec).collect();
    (build_tree(&defs, &StructureTemplate::new(stages)).unwrap(), preds)
}

fn random_subset(rng: &mut ChaCha8Rng, from: &[String], min: usize) -> Vec<String> {
    let size = rng.gen_range(min.max(1)..=from.len());
    from.choose_multiple(rng, size).cloned().collect()
}

fn culled_paths(tree: &ConfigTree, keep: &[String]) -> BTreeSet<Vec<String>> {
    let mut t = tree.clone();
    t.deactivate_predictors(keep).unwrap();
    t.enumerate_component_paths().into_iter().collect()
}

#[test]
fn criterion_04_culling_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut unsound = 0;
    for _ in 0..500 {
        let (tree, preds) = random_tree(&mut rng);
        let keep = random_subset(&mut rng, &preds, 1);
        let found: BTreeSet<String> = culled_paths(&tree, &keep).into_iter().map(|p| p.last().unwrap().clone()).collect();
        if found != keep.iter().cloned().collect() {
            unsound += 1;
        }
    }
    let mut non_monotone = 0;
    for _ in 0..500 {
        let (tree, preds) = random_tree(&mut rng);
        let outer = random_subset(&mut rng, &preds, 1);
        let inner = random_subset(&mut rng, &outer, 1);
        if !culled_paths(&tree, &inner).is_subset(&culled_paths(&tree, &outer)) {
            non_monotone += 1;
        }
    }
    let pass = unsound == 0 && non_monotone == 0;
    verdict(4, pass, format!("{unsound} unsound culls, {non_monotone} monotonicity violations"));
    assert!(pass);
}

#[test]
fn criterion_05_rank_sums_and_friedman() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    for _ in 0..500 {
        let s = rng.gen_range(3..=18);
        let n = rng.gen_range(2..=12);
        // Few distinct values so that ties are common.
        let cells: Vec<Vec<Option<f64>>> = (0..s)
            .map(|_| (0..n).map(|_| Some(f64::from(rng.gen_range(0..6u8)) / 10.0)).collect())
            .collect();
        let m = rank_settings(&ErrorTable::from_rows(names("s", s), names("d", n), cells).unwrap()).unwrap();
        let expected = (s * (s + 1)) as f64 / 2.0;
        if (0..n).any(|d| ((0..s).map(|i| m.ranks[i][d]).sum::<f64>() - expected).abs() > 1e-9) {
            bad += 1;
        }
        let flat = vec![vec![Some(0.2); n]; s];
        let ordered = (0..s).map(|i| vec![Some(i as f64 / s as f64); n]).collect();
        let stat = |c| {
            friedman(&rank_settings(&ErrorTable::from_rows(names("s", s), names("d", n), c).unwrap()).unwrap())
                .unwrap()
                .statistic
        };
        let (stat_flat, stat_ordered) = (stat(flat), stat(ordered));
        if stat_flat.abs() > 1e-9 || (stat_ordered - (n * (s - 1)) as f64).abs() > 1e-9 {
            bad += 1;
        }
    }
    verdict(5, bad == 0, format!("{bad} of 500 tables violated a property"));
    assert_eq!(bad, 0);
}

fn record(dataset: &str, predictor: &str, error: f64, time: f64) -> EvaluationRecord {
    EvaluationRecord {
        dataset: dataset.to_string(),
        pipeline: PipelineDescriptor {
            components: vec![predictor.to_string()],
            hyperparams: vec![Default::default()],
        },
        predictor: predictor.to_string(),
        fold_errors: vec![error],
        mean_error: Some(error),
        wall_time: time,
        status: Status::Complete,
    }
}

#[test]
fn criterion_06_clone_matches_oracle() {
    let pool = ComponentPool::standard();
    let predictors: Vec<&str> = pool.predictors().iter().map(|a| a.id()).collect();
    let landmarkers: Vec<String> = LANDMARKERS.iter().map(|a| a.id().to_string()).collect();
    let tree = build_tree(&pool.defs(), &StructureTemplate::default()).unwrap();
    let budget = Budget::from_seconds(1e6);
    let mut mismatches = Vec::new();
    for seed in 0..20u64 {
        let query = synth::generate(synth::FAMILIES[seed as usize % 4], (seed as usize / 4) % 2, seed);
        let run = evaluate_landmarkers(&landmarkers, &query, &budget, 10, Clock::Virtual, seed).unwrap();
        let measured: BTreeMap<String, f64> = landmarkers
            .iter()
            .cloned()
            .zip(run.vector.values().into_iter().map(Option::unwrap))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut row = |rng: &mut ChaCha8Rng, ds: &str, fixed: Option<&BTreeMap<String, f64>>| -> Vec<EvaluationRecord> {
            predictors
                .iter()
                .map(|p| {
                    let e = fixed.and_then(|m| m.get(*p).copied()).unwrap_or_else(|| rng.gen_range(0.0..0.6));
                    record(ds, p, e, rng.gen_range(0.1..5.0))
                })
                .collect()
        };
        let mut records = row(&mut rng, query.name(), Some(&measured));
        let clone: Vec<EvaluationRecord> = records
            .iter()
            .map(|r| EvaluationRecord {
                dataset: "clone".into(),
                ..r.clone()
            })
            .collect();
        records.extend(clone);
        for other in 0..6 {
            records.extend(row(&mut rng, &format!("other{other}"), None));
        }
        let base = MetaKnowledgeBase::ingest(&records);
        for k in harness::STANDARD_KS {
            let settings = LandmarkSettings {
                landmarkers: landmarkers.clone(),
                k,
                folds: 10,
                clock: Clock::Virtual,
            };
            let designed = design_space(&base, &tree, &query, &settings, &budget, seed).unwrap();
            let oracle = base.top_k(&TopKMode::Oracle(query.name().to_string()), k).unwrap();
            let chosen = designed.report.chosen.as_deref();
            let kept = designed.top_k.map(|t| t.predictors);
            if chosen != Some("clone") || kept.as_ref() != Some(&oracle.predictors) {
                mismatches.push(format!("seed {seed} k {k}: chose {chosen:?}"));
            }
        }
    }
    verdict(
        6,
        mismatches.is_empty(),
        format!("{} of 100 (seed, k) cases mismatched {mismatches:?}", mismatches.len()),
    );
    assert!(mismatches.is_empty());
}

// Suite shared by criteria 7, 8 and 10.

const SUITE_SEEDS: u64 = 20;
const SUITE_SETTINGS: [&str; 6] = ["baseline", "avatar", "M-k4", "L-k4", "O-k1", "O-k4"];

struct SeedOutcome {
    seed: u64,
    matrix: RankMatrix,
    repeats: Vec<RepeatRecord>,
}

fn suite_config(seed: u64) -> ExperimentConfig {
    let scenarios: Vec<String> = SUITE_SETTINGS.iter().map(|s| format!("\"{s}\"")).collect();
    let text = format!(
        "datasets = []\nscenarios = [{}]\nrepeats = 2\nbudget = 20.0\nbootstrap_budget = 60.0\nseed = {seed}\nwrite_logs = false\n",
        scenarios.join(", ")
    );
    ExperimentConfig::from_toml(&text).unwrap()
}

fn suite() -> &'static [SeedOutcome] {
    static SUITE: OnceLock<Vec<SeedOutcome>> = OnceLock::new();
    SUITE.get_or_init(|| {
        (0..SUITE_SEEDS)
            .map(|seed| {
                let config = suite_config(seed);
                let datasets = synth::benchmark(seed, 2);
                let boot = harness::bootstrap(&config, &datasets).unwrap();
                let out = harness::run_experiment(&config, &datasets, &boot.base, &boot.best).unwrap();
                SeedOutcome {
                    seed,
                    matrix: rank_settings(&out.table).unwrap(),
                    repeats: out.repeats,
                }
            })
            .collect()
    })
}

fn average(m: &RankMatrix, setting: &str) -> f64 {
    m.average_of(setting).unwrap()
}

fn variance(m: &RankMatrix, setting: &str) -> f64 {
    let i = m.settings.iter().position(|s| s == setting).unwrap();
    let r = &m.ranks[i];
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / r.len() as f64
}

#[test]
fn criterion_07_hierarchy_tendency() {
    let outcomes = suite();
    let mut holds = 0;
    for o in outcomes {
        let (ok4, mk4, base) = (
            average(&o.matrix, "O-k4"),
            average(&o.matrix, "M-k4"),
            average(&o.matrix, "baseline"),
        );
        println!("  seed {}: O-k4 {ok4:.3}  M-k4 {mk4:.3}  baseline {base:.3}", o.seed);
        if ok4 < mk4 && mk4 < base {
            holds += 1;
        }
    }
    let rate = f64::from(holds) / outcomes.len() as f64;
    let mut means: Vec<String> = SUITE_SETTINGS
        .iter()
        .map(|s| {
            format!(
                "{s} {:.3}",
                outcomes.iter().map(|o| average(&o.matrix, s)).sum::<f64>() / outcomes.len() as f64
            )
        })
        .collect();
    means.sort();
    verdict(
        7,
        rate >= 0.7,
        format!(
            "ordering held in {holds}/{} seeds ({:.0}%); mean ranks: {}",
            outcomes.len(),
            rate * 100.0,
            means.join(", ")
        ),
    );
    assert!(rate >= 0.5, "hierarchy held in only {:.0}% of seeds", rate * 100.0);
}

#[test]
fn criterion_08_k1_rank_variance() {
    let outcomes = suite();
    let wider = outcomes
        .iter()
        .filter(|o| variance(&o.matrix, "O-k1") > variance(&o.matrix, "O-k4"))
        .count();
    let rate = wider as f64 / outcomes.len() as f64;
    verdict(
        8,
        rate >= 0.6,
        format!("O-k1 rank variance exceeded O-k4 in {wider}/{} seeds", outcomes.len()),
    );
    assert!(rate >= 0.6);
}

#[test]
fn criterion_10_landmark_budget_accounting() {
    let runs: Vec<&RepeatRecord> = suite()
        .iter()
        .flat_map(|o| &o.repeats)
        .filter(|r| r.setting.starts_with("L-"))
        .collect();
    let off: Vec<String> = runs
        .iter()
        .filter(|r| r.landmark_us + r.optimizer_us != r.budget_us)
        .map(|r| {
            format!(
                "{} {} r{}: {} + {} != {}",
                r.setting, r.dataset, r.repeat, r.landmark_us, r.optimizer_us, r.budget_us
            )
        })
        .collect();
    verdict(
        10,
        off.is_empty() && !runs.is_empty(),
        format!("{} landmarked runs, {} off budget {off:?}", runs.len(), off.len()),
    );
    assert!(off.is_empty() && !runs.is_empty());
}

fn bundle_files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn pipeline_bundle(out: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.toml");
    for step in ["bootstrap", "run", "report"] {
        let status = Command::new(env!("CARGO_BIN_EXE_autocull"))
            .args([step, "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .args(["--clock", "virtual"])
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{step} failed: {}",
            String::from_utf8_lossy(&status.stderr)
        );
    }
    bundle_files(out)
}

#[test]
fn criterion_09_end_to_end_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let first = pipeline_bundle(&dir.path().join("first"));
    let second = pipeline_bundle(&dir.path().join("second"));
    let differing: Vec<&PathBuf> = first.keys().filter(|k| first.get(*k) != second.get(*k)).collect();
    let pass = !first.is_empty() && first.len() == second.len() && differing.is_empty();
    verdict(
        9,
        pass,
        format!("{} files compared, {} differ {differing:?}", first.len(), differing.len()),
    );
    assert!(pass);
}
