use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use autocull::components::Dataset;
use autocull::configspace::{build_tree, StructureTemplate};
use autocull::evaluation::{Budget, Clock};
use autocull::harness::{self, synth, ExperimentConfig, LANDMARKER_COUNT};
use autocull::landmarking::{design_space, LandmarkSettings};
use autocull::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "autocull",
    version,
    about = "Pipeline search with meta-knowledge culling of the configuration space"
)]
struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one full-space search per dataset and persist the metabase.
    Bootstrap(Common),
    /// Run every scenario on every dataset and write the error table.
    Run(Common),
    /// Rank analysis of an error table.
    Report {
        #[command(flatten)]
        common: Common,
        /// Error table to analyse instead of the one written by `run`.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Design a culled space for one dataset by relative landmarking and
    /// print the audit as JSON.
    Landmark {
        #[command(flatten)]
        common: Common,
        /// Dataset CSV to characterise.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(short, long, default_value_t = 4)]
        k: usize,
    },
    /// Write the synthetic benchmark datasets as CSV files.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Datasets per family.
        #[arg(long, default_value_t = 2)]
        pairs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Virtual,
    Wall,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Seconds per optimizer run, overriding the configuration.
    #[arg(long)]
    budget: Option<f64>,
    /// Output directory, overriding the configuration.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Time measurement, overriding the configuration.
    #[arg(long, value_enum)]
    clock: Option<ClockArg>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(budget) = self.budget {
            config.budget = budget;
        }
        if let Some(out) = &self.out {
            config.output = out.clone();
        }
        if let Some(clock) = self.clock {
            config.clock = match clock {
                ClockArg::Virtual => Clock::Virtual,
                ClockArg::Wall => Clock::Wall,
            };
        }
        config.check()?;
        Ok(config)
    }
}

fn load_datasets(config: &ExperimentConfig) -> Result<(Vec<Dataset>, Vec<(PathBuf, String)>)> {
    let (datasets, failed) = config.load_datasets();
    for (path, why) in &failed {
        log::warn!("skipping {}: {why}", path.display());
    }
    if datasets.is_empty() {
        bail!(Error::Config("no dataset could be loaded".into()));
    }
    Ok((datasets, failed))
}

fn bootstrap(common: &Common) -> Result<()> {
    let config = common.load()?;
    let (datasets, failed) = load_datasets(&config)?;
    let b = harness::bootstrap(&config, &datasets)?;
    harness::write_bootstrap(&b, &config, &failed)?;
    let complete = b.runs.iter().filter(|r| r.best_error.is_some()).count();
    println!(
        "bootstrap: {complete}/{} datasets complete, metabase at {}",
        b.runs.len(),
        config.metabase_path().display()
    );
    Ok(())
}

fn run(common: &Common) -> Result<()> {
    let config = common.load()?;
    let (datasets, _) = load_datasets(&config)?;
    let (base, best) = harness::load_bootstrap(&config).context("run `bootstrap` first")?;
    let out = harness::run_experiment(&config, &datasets, &base, &best)?;
    harness::write_experiment(&out, &config)?;
    for note in &out.notes {
        log::info!("{note}");
    }
    println!(
        "run: {} settings x {} datasets x {} repeats, results in {}",
        out.table.settings.len(),
        out.table.datasets.len(),
        config.repeats,
        config.output.join(harness::RUN_DIR).display()
    );
    Ok(())
}

fn report(common: &Common, table: Option<&PathBuf>) -> Result<()> {
    let config = common.load()?;
    let table = match table {
        Some(p) => {
            let f = std::fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
            autocull::analysis::ErrorTable::read_csv(f)?
        }
        None => harness::read_error_table(&config)?,
    };
    let dir = config.output.join(harness::REPORT_DIR);
    let bundle = harness::report(&table, config.alpha, &dir)?;
    if let Some(f) = &bundle.friedman {
        println!(
            "Friedman chi2 = {:.4} (df {}, critical {:.4}): {}",
            f.statistic,
            f.df,
            f.critical,
            if f.significant { "significant" } else { "not significant" }
        );
    }
    if let Some(cd) = &bundle.critical_difference {
        let critical = cd.pairs.iter().filter(|p| p.critical).count();
        println!(
            "CD = {:.4} at alpha {}: {critical} of {} pairs differ",
            cd.cd,
            cd.alpha,
            cd.pairs.len()
        );
    }
    for note in &bundle.notes {
        println!("note: {note}");
    }
    println!("report written to {}", dir.display());
    Ok(())
}

fn landmark(common: &Common, dataset: &PathBuf, k: usize) -> Result<()> {
    let config = common.load()?;
    let data = Dataset::from_csv(dataset, config.label.as_deref())?;
    let (base, _) = harness::load_bootstrap(&config).context("run `bootstrap` first")?;
    let (prior, _) = base.leave_one_out(data.name());
    let landmarkers = config
        .landmarkers
        .clone()
        .unwrap_or_else(|| prior.fastest_predictors(LANDMARKER_COUNT));
    let tree = build_tree(&config.pool()?.defs(), &StructureTemplate::default())?;
    let settings = LandmarkSettings {
        landmarkers: landmarkers.clone(),
        k,
        folds: config.folds,
        clock: config.clock,
    };
    let budget = Budget::from_seconds(config.budget);
    let seed = harness::derive_seed(config.seed, &["landmark", data.name()]);
    let designed = design_space(&prior, &tree, &data, &settings, &budget, seed)?;
    let audit = serde_json::json!({
        "dataset": data.name(),
        "landmarkers": landmarkers,
        "landmark_errors": designed.landmarks.vector.values(),
        "imputed": designed.landmarks.imputed,
        "similarity": designed.report,
        "kept_predictors": designed.top_k.as_ref().map(|t| &t.predictors),
        "clamped": designed.top_k.as_ref().map(|t| t.clamped),
        "fallback_to_full_space": designed.fell_back(),
        "budget_total_s": budget.total(),
        "landmark_time_s": designed.budget().consumed(),
        "budget_remaining_s": designed.budget().remaining(),
    });
    println!("{}", serde_json::to_string_pretty(&audit)?);
    Ok(())
}

fn synth_cmd(out: &PathBuf, seed: u64, pairs: usize) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for d in synth::benchmark(seed, pairs) {
        let path = out.join(format!("{}.csv", d.name()));
        d.write_csv(&path)?;
        println!("{}", path.display());
    }
    Ok(())
}

/// Exit code by failure category.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Schema(_) | Error::Tree(_) | Error::UnknownComponent(_) | Error::NotAPredictor(_)) => 3,
        Some(Error::Io { .. }) => 4,
        Some(Error::Dataset(_) | Error::Csv(_)) => 5,
        Some(Error::Corrupt(_) | Error::VersionMismatch { .. } | Error::Json(_)) => 6,
        Some(Error::Analysis(_)) => 7,
        Some(_) => 8,
        None if err.downcast_ref::<std::io::Error>().is_some() => 4,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Bootstrap(c) => bootstrap(c),
        Command::Run(c) => run(c),
        Command::Report { common, table } => report(common, table.as_ref()),
        Command::Landmark { common, dataset, k } => landmark(common, dataset, *k),
        Command::Synth { out, seed, pairs } => synth_cmd(out, *seed, *pairs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
