//! The `testprio` command line: one subcommand per pipeline stage.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, unknown
//! identifiers, impossible flag combinations), 2 on data errors (missing
//! or malformed files, infeasible configurations, domain failures).
//! Results go to standard output, diagnostics to standard error. All
//! numeric output uses six decimal places, so a fixed seed reproduces
//! output byte for byte.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{self, Design, ExperimentConfig, ExperimentResult, ReplicationObject};
use crate::faults::{classify_suite, FailureProfile, FaultReport};
use crate::lts::LtsModel;
use crate::prioritize::{Prioritizer, Technique};
use crate::stats;
use crate::synth::{synthesize_batch, SynthConfig};
use crate::testgen::{self, TestSuite};

#[derive(Parser)]
#[command(
    name = "testprio",
    version,
    about = "Model-based test case prioritization: synthesize models, generate \
             and prioritize suites, score orderings, run experiments."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize random models with exact branch/join/loop counts.
    Synth(SynthArgs),
    /// Generate the bounded-path test suite of a model.
    Gen(GenArgs),
    /// Order a suite with one technique and print the test ids.
    Prioritize(PrioritizeArgs),
    /// Score an ordering file against a fault report.
    Apfd(ApfdArgs),
    /// Classify a suite by where its failing tests sit.
    Classify(ClassifyArgs),
    /// Run a full experiment and write its results CSV.
    Experiment(ExperimentArgs),
    /// Analyze a results CSV into summary tables and a report.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// States with more than one outgoing transition.
    #[arg(long)]
    branches: u32,
    /// States with more than one incoming transition.
    #[arg(long)]
    joins: u32,
    /// Back transitions closing a cycle.
    #[arg(long)]
    loops: u32,
    /// Upper bound on the longest simple path.
    #[arg(long)]
    max_depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many models to synthesize (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    count: u32,
    /// Directory for m0.lts, m1.lts, ...; a single model prints to stdout
    /// without it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Model file (.lts text or .json).
    #[arg(long)]
    lts: PathBuf,
    /// Per-state visit bound during path enumeration.
    #[arg(long, default_value_t = 2)]
    loop_bound: u32,
    /// Suite file to write; stdout without it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PrioritizeArgs {
    /// Suite file (JSON).
    #[arg(long)]
    suite: PathBuf,
    /// Technique identifier (see --help of the failing run for the list).
    #[arg(long)]
    technique: String,
    #[arg(long)]
    seed: u64,
    /// Fault report CSV; required by Opt.
    #[arg(long)]
    faults: Option<PathBuf>,
    /// Model file; lets model-aware techniques use measured structure.
    #[arg(long)]
    lts: Option<PathBuf>,
}

#[derive(Args)]
struct ApfdArgs {
    /// Ordering file: one test id per line.
    #[arg(long)]
    order: PathBuf,
    /// Fault report CSV.
    #[arg(long)]
    faults: PathBuf,
    /// Suite size the ordering must cover.
    #[arg(long)]
    n: u32,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    faults: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Config file (JSON). Excludes every other config flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Full-scale original design (31 models, 31 repetitions).
    #[arg(long)]
    full_scale: bool,
    /// original | replication (default original).
    #[arg(long)]
    design: Option<String>,
    #[arg(long)]
    models: Option<u32>,
    #[arg(long)]
    branches: Option<u32>,
    #[arg(long)]
    joins: Option<u32>,
    #[arg(long)]
    loops: Option<u32>,
    #[arg(long)]
    max_depth: Option<u32>,
    /// Seed for model synthesis (distinct from --base-seed).
    #[arg(long)]
    synth_seed: Option<u64>,
    /// Comma-separated failure profiles.
    #[arg(long)]
    profiles: Option<String>,
    /// Comma-separated technique identifiers.
    #[arg(long)]
    techniques: Option<String>,
    #[arg(long)]
    repetitions: Option<u32>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    loop_bound: Option<u32>,
    /// Replication suite file; repeat together with --faults.
    #[arg(long = "suite")]
    suites: Vec<PathBuf>,
    /// Replication fault report; pairs up with --suite by position.
    #[arg(long = "faults")]
    faults: Vec<PathBuf>,
    /// Directory for results.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Results CSV produced by the experiment subcommand.
    #[arg(long)]
    results: PathBuf,
    /// Directory for the analysis tables and report.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    /// Wrong invocation: bad flags, unknown names, impossible combinations.
    Usage(String),
    /// The invocation was fine; a file or computation was not.
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Data(e)
    }
}

type CmdResult = std::result::Result<String, Failure>;

/// Parse `args` and execute; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Synth(args) => do_synth(args),
        Command::Gen(args) => do_gen(args),
        Command::Prioritize(args) => do_prioritize(args),
        Command::Apfd(args) => do_apfd(args),
        Command::Classify(args) => do_classify(args),
        Command::Experiment(args) => do_experiment(args),
        Command::Analyze(args) => do_analyze(args),
    };
    match outcome {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn do_synth(args: SynthArgs) -> CmdResult {
    if args.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let config = SynthConfig {
        branches: args.branches,
        joins: args.joins,
        loops: args.loops,
        max_depth: args.max_depth,
        seed: args.seed,
    };
    config.validate()?;
    match &args.out {
        None => {
            if args.count != 1 {
                return Err(Failure::Usage(
                    "writing more than one model needs --out DIR".into(),
                ));
            }
            let batch = synthesize_batch(&config, 1)?;
            Ok(batch.models[0].to_text())
        }
        Some(dir) => {
            let batch = synthesize_batch(&config, args.count)?;
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            for (i, model) in batch.models.iter().enumerate() {
                let path = dir.join(format!("m{i}.lts"));
                crate::error::write(&path, model.to_text())?;
                eprintln!("wrote {}", path.display());
            }
            for w in &batch.collisions {
                eprintln!("warning: {w}");
            }
            Ok(String::new())
        }
    }
}

/// Read a model from `.lts` text or the JSON document form, picked by
/// content.
fn load_model(path: &Path) -> Result<LtsModel> {
    let text = crate::error::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        LtsModel::from_json(&text)
    } else {
        LtsModel::parse_text(&text)
    }
}

fn load_suite(path: &Path) -> Result<TestSuite> {
    TestSuite::from_json(&crate::error::read_to_string(path)?)
}

fn do_gen(args: GenArgs) -> CmdResult {
    let model = load_model(&args.lts)?;
    let suite = testgen::generate(&model, args.loop_bound)?;
    let text = suite.to_json();
    match &args.out {
        None => Ok(text),
        Some(path) => {
            crate::error::write(path, text)?;
            eprintln!("wrote {}", path.display());
            Ok(String::new())
        }
    }
}

fn do_prioritize(args: PrioritizeArgs) -> CmdResult {
    let technique: Technique = args
        .technique
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    if technique.needs_faults() && args.faults.is_none() {
        return Err(Failure::Usage(format!(
            "technique {technique} requires --faults"
        )));
    }

    let suite = load_suite(&args.suite)?;
    let model = args.lts.as_deref().map(load_model).transpose()?;
    let faults = args
        .faults
        .as_deref()
        .map(FaultReport::from_csv_path)
        .transpose()?;

    let mut prioritizer = Prioritizer::new(&suite)?;
    if let Some(model) = &model {
        prioritizer = prioritizer.with_model(model);
    }
    if let Some(faults) = &faults {
        faults.validate_against(&suite)?;
        prioritizer = prioritizer.with_faults(faults);
    }
    let order = prioritizer.run(technique, args.seed)?;
    Ok(order.id_lines())
}

fn do_apfd(args: ApfdArgs) -> CmdResult {
    let text = crate::error::read_to_string(&args.order)?;
    let order: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    if order.len() != args.n as usize {
        return Err(Failure::Data(Error::BadOrder(format!(
            "ordering file lists {} ids but --n says {}",
            order.len(),
            args.n
        ))));
    }
    let faults = FaultReport::from_csv_path(&args.faults)?;
    let apfd = stats::apfd(&order, &faults)?;
    Ok(format!("{:.6}\n", apfd.value))
}

fn do_classify(args: ClassifyArgs) -> CmdResult {
    let suite = load_suite(&args.suite)?;
    let faults = FaultReport::from_csv_path(&args.faults)?;
    let class = classify_suite(&suite, &faults)?;
    Ok(format!("{class}\n"))
}

fn do_experiment(args: ExperimentArgs) -> CmdResult {
    let config = resolve_experiment_config(&args)?;
    let result = experiment::run(&config)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    let path = args.out.join("results.csv");
    result.write_csv(&path)?;
    eprintln!("wrote {} ({} rows)", path.display(), result.rows.len());
    Ok(String::new())
}

fn resolve_experiment_config(args: &ExperimentArgs) -> std::result::Result<ExperimentConfig, Failure> {
    if let Some(path) = &args.config {
        let flags_given = args.full_scale
            || args.design.is_some()
            || args.models.is_some()
            || args.branches.is_some()
            || args.joins.is_some()
            || args.loops.is_some()
            || args.max_depth.is_some()
            || args.synth_seed.is_some()
            || args.profiles.is_some()
            || args.techniques.is_some()
            || args.repetitions.is_some()
            || args.base_seed.is_some()
            || args.loop_bound.is_some()
            || !args.suites.is_empty()
            || !args.faults.is_empty();
        if flags_given {
            return Err(Failure::Usage(
                "--config excludes the individual experiment flags".into(),
            ));
        }
        return Ok(ExperimentConfig::from_json_path(path)?);
    }

    let design = match args.design.as_deref() {
        None | Some("original") => Design::Original,
        Some("replication") => Design::Replication,
        Some(other) => {
            return Err(Failure::Usage(format!(
                "unknown design `{other}`; valid: original, replication"
            )));
        }
    };

    let mut config = match design {
        Design::Original => {
            if !args.suites.is_empty() || !args.faults.is_empty() {
                return Err(Failure::Usage(
                    "--suite/--faults only apply to the replication design".into(),
                ));
            }
            if args.full_scale {
                ExperimentConfig::full_original()
            } else {
                ExperimentConfig::desk_original()
            }
        }
        Design::Replication => {
            if args.full_scale {
                return Err(Failure::Usage(
                    "--full-scale only applies to the original design".into(),
                ));
            }
            if args.models.is_some()
                || args.branches.is_some()
                || args.joins.is_some()
                || args.loops.is_some()
                || args.max_depth.is_some()
                || args.synth_seed.is_some()
                || args.profiles.is_some()
            {
                return Err(Failure::Usage(
                    "model-shape flags only apply to the original design".into(),
                ));
            }
            if args.suites.is_empty() {
                return Err(Failure::Usage(
                    "the replication design needs at least one --suite/--faults pair".into(),
                ));
            }
            if args.suites.len() != args.faults.len() {
                return Err(Failure::Usage(format!(
                    "{} --suite flag(s) but {} --faults flag(s); they pair up by position",
                    args.suites.len(),
                    args.faults.len()
                )));
            }
            let objects = args
                .suites
                .iter()
                .zip(&args.faults)
                .map(|(s, f)| ReplicationObject { suite: s.clone(), faults: f.clone() })
                .collect();
            let mut c = ExperimentConfig::replication(objects);
            c.repetitions = 1000;
            c
        }
    };

    if let Some(models) = args.models {
        config.models = models;
    }
    if let Some(synth) = config.synth.as_mut() {
        if let Some(v) = args.branches {
            synth.branches = v;
        }
        if let Some(v) = args.joins {
            synth.joins = v;
        }
        if let Some(v) = args.loops {
            synth.loops = v;
        }
        if let Some(v) = args.max_depth {
            synth.max_depth = v;
        }
        if let Some(v) = args.synth_seed {
            synth.seed = v;
        }
    }
    if let Some(profiles) = &args.profiles {
        config.profiles = parse_list::<FailureProfile>(profiles)?;
    }
    if let Some(techniques) = &args.techniques {
        config.techniques = parse_list::<Technique>(techniques)?;
    }
    if let Some(v) = args.repetitions {
        config.repetitions = v;
    }
    if let Some(v) = args.base_seed {
        config.base_seed = v;
    }
    if let Some(v) = args.loop_bound {
        config.loop_bound = v;
    }
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(config)
}

fn parse_list<T>(csv: &str) -> std::result::Result<Vec<T>, Failure>
where
    T: std::str::FromStr<Err = Error>,
{
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e: Error| Failure::Usage(e.to_string())))
        .collect()
}

fn do_analyze(args: AnalyzeArgs) -> CmdResult {
    let result = ExperimentResult::from_csv_path(&args.results)?;
    let bundle = experiment::analyze(&result)?;
    bundle.write(&args.out)?;
    let mut listed = String::new();
    for name in [
        "summary.csv",
        "kruskal.csv",
        "a12_matrix.csv",
        "a12_short_long.csv",
        "report.txt",
    ] {
        let _ = writeln!(listed, "wrote {}", args.out.join(name).display());
    }
    eprint!("{listed}");
    Ok(String::new())
}
