//! Seeded experiment designs over suites of prioritization runs.
//!
//! Two designs are supported. The *original* design synthesizes a batch of
//! models, generates one suite per model, and for every (model, failure
//! profile, repetition) cell plants a single failure and runs every
//! configured technique on it. The *replication* design takes existing
//! suite/fault-report file pairs, classifies each suite by where its
//! failing tests sit, and repeats every technique on it.
//!
//! Every cell draws its seed from a stable hash of the base seed, object
//! id, technique id, and repetition index ([`cell_seed`]), so the whole
//! result is a pure function of its [`ExperimentConfig`]: re-running a
//! config reproduces the result CSV byte for byte, and cells stay
//! statistically independent of each other. Objects execute on separate
//! threads; rows are assembled in canonical (object, group, technique,
//! repetition) order regardless of scheduling.
//!
//! [`analyze`] condenses a result into five-number summaries, a
//! Kruskal-Wallis test across techniques, a pairwise effect-size matrix,
//! and a per-technique ShortTC-versus-LongTC effect table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faults::{classify_suite, inject_failure, FailureProfile, FaultReport};
use crate::lts::LtsModel;
use crate::prioritize::{Prioritizer, Technique};
use crate::stats::{self, Summary, A12, KruskalWallis};
use crate::synth::{synthesize_batch, SynthConfig};
use crate::testgen::{self, TestCaseMetrics, TestSuite};

/// Which study layout to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    Original,
    Replication,
}

/// One replication object: a suite file plus the fault report observed for
/// it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicationObject {
    pub suite: PathBuf,
    pub faults: PathBuf,
}

fn default_techniques() -> Vec<Technique> {
    Technique::ALL.to_vec()
}

fn default_repetitions() -> u32 {
    1000
}

fn default_loop_bound() -> u32 {
    2
}

fn default_models() -> u32 {
    10
}

fn default_profiles() -> Vec<FailureProfile> {
    FailureProfile::ALL.to_vec()
}

/// Full description of one experiment. The result is a pure function of
/// this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub design: Design,
    #[serde(default = "default_techniques")]
    pub techniques: Vec<Technique>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_loop_bound")]
    pub loop_bound: u32,
    /// Original design: how many models to synthesize.
    #[serde(default = "default_models")]
    pub models: u32,
    /// Original design: shape of each synthesized model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    /// Original design: failure profiles to plant.
    #[serde(default = "default_profiles")]
    pub profiles: Vec<FailureProfile>,
    /// Replication design: suite and fault report file pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<ReplicationObject>,
}

impl ExperimentConfig {
    /// Desk-scale original design: 10 models of moderate shape, all seven
    /// profiles, 30 repetitions. Runs in minutes rather than hours.
    pub fn desk_original() -> ExperimentConfig {
        ExperimentConfig {
            design: Design::Original,
            techniques: default_techniques(),
            repetitions: 30,
            base_seed: 0,
            loop_bound: 2,
            models: 10,
            synth: Some(SynthConfig {
                branches: 6,
                joins: 3,
                loops: 1,
                max_depth: 12,
                seed: 0,
            }),
            profiles: default_profiles(),
            objects: Vec::new(),
        }
    }

    /// Full-scale original design: 31 models, 31 repetitions, large model
    /// shape. 961 executions per technique per profile.
    pub fn full_original() -> ExperimentConfig {
        ExperimentConfig {
            repetitions: 31,
            models: 31,
            synth: Some(SynthConfig {
                branches: 30,
                joins: 15,
                loops: 1,
                max_depth: 25,
                seed: 0,
            }),
            ..ExperimentConfig::desk_original()
        }
    }

    /// Replication design over existing suite/fault file pairs.
    pub fn replication(objects: Vec<ReplicationObject>) -> ExperimentConfig {
        ExperimentConfig {
            design: Design::Replication,
            techniques: default_techniques(),
            repetitions: default_repetitions(),
            base_seed: 0,
            loop_bound: default_loop_bound(),
            models: default_models(),
            synth: None,
            profiles: default_profiles(),
            objects,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::BadConfig("repetitions must be at least 1".into()));
        }
        if self.techniques.is_empty() {
            return Err(Error::BadConfig("at least one technique is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &self.techniques {
            if !seen.insert(t.id()) {
                return Err(Error::BadConfig(format!("technique {t} listed twice")));
            }
        }
        if self.loop_bound == 0 {
            return Err(Error::BadLoopBound(self.loop_bound));
        }
        match self.design {
            Design::Original => {
                let synth = self.synth.as_ref().ok_or_else(|| {
                    Error::BadConfig("the original design needs a `synth` section".into())
                })?;
                synth.validate()?;
                if self.models == 0 {
                    return Err(Error::BadConfig("models must be at least 1".into()));
                }
                if self.profiles.is_empty() {
                    return Err(Error::BadConfig("at least one profile is required".into()));
                }
                let mut seen = std::collections::BTreeSet::new();
                for p in &self.profiles {
                    if !seen.insert(p.name()) {
                        return Err(Error::BadConfig(format!("profile {p} listed twice")));
                    }
                }
            }
            Design::Replication => {
                if self.objects.is_empty() {
                    return Err(Error::BadConfig(
                        "the replication design needs at least one suite/faults pair".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("config serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        Self::from_json(&crate::error::read_to_string(path)?)
    }
}

/// Stable per-cell seed: FNV-1a over the cell coordinates. Changing any
/// coordinate (or the base seed) changes the stream; nothing else does.
pub fn cell_seed(base_seed: u64, object: &str, technique: &str, repetition: u32) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{base_seed}|{object}|{technique}|{repetition}").bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One prioritization run: which object and cell, the seed it used, and
/// the APFD it scored.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub object: String,
    /// Failure profile (original design) or suite size class (replication).
    pub group: String,
    pub technique: Technique,
    pub repetition: u32,
    pub seed: u64,
    pub apfd: f64,
    /// The planted failing test, when the design knows it. Not serialized;
    /// carried for in-memory consumers that need to audit tie behavior.
    pub failing_test: Option<String>,
}

/// All rows of one experiment, in canonical order, plus any warnings
/// raised while producing them (skipped objects, structural collisions).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub warnings: Vec<String>,
}

impl ExperimentResult {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("object,group,technique,repetition,seed,apfd\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6}",
                r.object, r.group, r.technique, r.repetition, r.seed, r.apfd
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::error::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn from_csv_str(text: &str) -> Result<ExperimentResult> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let expected = ["object", "group", "technique", "repetition", "seed", "apfd"];
        let headers = reader.headers()?.clone();
        if headers.iter().ne(expected) {
            return Err(Error::Parse(format!(
                "results must start with `{}`, found `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let line = i + 2;
            if record.len() != expected.len() {
                return Err(Error::Parse(format!(
                    "results line {line}: expected {} fields, found {}",
                    expected.len(),
                    record.len()
                )));
            }
            let field = |j: usize| record.get(j).unwrap_or("").trim();
            let parse_err = |what: &str, v: &str| {
                Error::Parse(format!("results line {line}: bad {what} `{v}`"))
            };
            rows.push(ResultRow {
                object: field(0).to_string(),
                group: field(1).to_string(),
                technique: field(2).parse()?,
                repetition: field(3)
                    .parse()
                    .map_err(|_| parse_err("repetition", field(3)))?,
                seed: field(4).parse().map_err(|_| parse_err("seed", field(4)))?,
                apfd: field(5).parse().map_err(|_| parse_err("apfd", field(5)))?,
                failing_test: None,
            });
        }
        Ok(ExperimentResult { rows, warnings: Vec::new() })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<ExperimentResult> {
        Self::from_csv_str(&crate::error::read_to_string(path)?)
    }
}

/// One synthesized experiment object: the model, its generated suite (named
/// after the object), and per-test metrics.
#[derive(Debug, Clone)]
pub struct OriginalObject {
    pub id: String,
    pub model: LtsModel,
    pub suite: TestSuite,
    pub metrics: Vec<TestCaseMetrics>,
}

/// The synthesized objects of an original-design config plus any
/// structural-collision warnings from the batch.
#[derive(Debug, Clone)]
pub struct ObjectSet {
    pub objects: Vec<OriginalObject>,
    pub warnings: Vec<String>,
}

/// Materialize the objects an original-design config would run on.
pub fn original_objects(config: &ExperimentConfig) -> Result<ObjectSet> {
    config.validate()?;
    if config.design != Design::Original {
        return Err(Error::BadConfig(
            "objects can only be synthesized for the original design".into(),
        ));
    }
    let synth = config.synth.as_ref().expect("validated above");
    let batch = synthesize_batch(synth, config.models)?;
    let mut objects = Vec::with_capacity(batch.models.len());
    for (i, model) in batch.models.into_iter().enumerate() {
        let id = format!("m{i}");
        let mut suite = testgen::generate(&model, config.loop_bound)?;
        suite.name = id.clone();
        let metrics = testgen::metrics(&suite, &model)?;
        objects.push(OriginalObject { id, model, suite, metrics });
    }
    Ok(ObjectSet { objects, warnings: batch.collisions })
}

/// Run whichever design the config describes.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    match config.design {
        Design::Original => run_original(config),
        Design::Replication => run_replication(config),
    }
}

/// Synthetic-model study: per (model, profile, repetition) cell, plant one
/// failure and score every technique on it.
pub fn run_original(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let set = original_objects(config)?;
    let mut warnings = set.warnings;

    let per_object: Vec<Result<(Vec<ResultRow>, Vec<String>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = set
            .objects
            .iter()
            .map(|obj| scope.spawn(move || original_object_rows(config, obj)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment worker panicked"))
            .collect()
    });

    let mut rows = Vec::new();
    for outcome in per_object {
        let (object_rows, object_warnings) = outcome?;
        rows.extend(object_rows);
        warnings.extend(object_warnings);
    }
    Ok(ExperimentResult { rows, warnings })
}

fn original_object_rows(
    config: &ExperimentConfig,
    obj: &OriginalObject,
) -> Result<(Vec<ResultRow>, Vec<String>)> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let shared = Prioritizer::new(&obj.suite)?.with_model(&obj.model);

    for &profile in &config.profiles {
        if profile == FailureProfile::Essential && !obj.metrics.iter().any(|m| m.essential) {
            warnings.push(format!(
                "object {}: no test is essential; the Essential profile was skipped",
                obj.id
            ));
            continue;
        }

        // One planted failure per repetition, shared by all techniques in
        // the cell.
        let reports: Vec<(FaultReport, Option<String>)> = (0..config.repetitions)
            .map(|rep| {
                let seed = cell_seed(
                    config.base_seed,
                    &obj.id,
                    &format!("inject:{profile}"),
                    rep,
                );
                let report = inject_failure(&obj.suite, &obj.metrics, profile, seed)?;
                let failing = report.failing_tests().iter().next().map(|s| s.to_string());
                Ok((report, failing))
            })
            .collect::<Result<_>>()?;

        for &technique in &config.techniques {
            for (rep, (report, failing)) in reports.iter().enumerate() {
                let rep = rep as u32;
                let seed = cell_seed(config.base_seed, &obj.id, technique.id(), rep);
                let order = if technique.needs_faults() {
                    Prioritizer::new(&obj.suite)?
                        .with_faults(report)
                        .run(technique, seed)?
                } else {
                    shared.run(technique, seed)?
                };
                let apfd = stats::apfd(&order.order, report)?;
                rows.push(ResultRow {
                    object: obj.id.clone(),
                    group: profile.name().to_string(),
                    technique,
                    repetition: rep,
                    seed,
                    apfd: apfd.value,
                    failing_test: failing.clone(),
                });
            }
        }
    }
    Ok((rows, warnings))
}

/// Fixed-suite study: classify each suite by its failing tests and repeat
/// every technique on it. Suites matching the size-bias filter (one test
/// that fails, or two tests with exactly one failing) are skipped with a
/// warning; their APFD values would be constants dictated by suite size.
pub fn run_replication(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    if config.design != Design::Replication {
        return Err(Error::BadConfig(
            "run_replication needs a replication-design config".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let mut seen_names = std::collections::BTreeSet::new();

    for pair in &config.objects {
        let suite = TestSuite::from_json(&crate::error::read_to_string(&pair.suite)?)?;
        let faults = FaultReport::from_csv_path(&pair.faults)?;
        faults.validate_against(&suite)?;
        let id = suite.name.clone();
        if !seen_names.insert(id.clone()) {
            return Err(Error::BadConfig(format!(
                "two replication suites share the name `{id}`"
            )));
        }

        let failing = faults.failing_tests();
        let n = suite.len();
        if (n == 1 && !failing.is_empty()) || (n == 2 && failing.len() == 1) {
            warnings.push(format!(
                "suite `{id}` skipped: {n} test(s) with {} failing would pin APFD \
                 to a size artifact",
                failing.len()
            ));
            continue;
        }

        let class = classify_suite(&suite, &faults)?;
        let pri = Prioritizer::new(&suite)?.with_faults(&faults);
        for &technique in &config.techniques {
            for rep in 0..config.repetitions {
                let seed = cell_seed(config.base_seed, &id, technique.id(), rep);
                let order = pri.run(technique, seed)?;
                let apfd = stats::apfd(&order.order, &faults)?;
                rows.push(ResultRow {
                    object: id.clone(),
                    group: class.name().to_string(),
                    technique,
                    repetition: rep,
                    seed,
                    apfd: apfd.value,
                    failing_test: None,
                });
            }
        }
    }
    Ok(ExperimentResult { rows, warnings })
}

/// Per-technique five-number summary, overall (`object` = `(all)`) or for
/// one object.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub object: String,
    pub technique: Technique,
    pub summary: Summary,
}

/// One cell of the pairwise effect-size matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct A12Row {
    pub a: Technique,
    pub b: Technique,
    pub effect: A12,
}

/// Per-technique effect size between ShortTC and LongTC rows; `None` when
/// either group has no rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortLongRow {
    pub technique: Technique,
    pub effect: Option<A12>,
}

/// Everything [`analyze`] derives from a result.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBundle {
    pub summaries: Vec<SummaryRow>,
    /// Omnibus test across techniques; `None` with fewer than two.
    pub kruskal: Option<KruskalWallis>,
    /// Upper triangle, techniques in registry order.
    pub a12_matrix: Vec<A12Row>,
    pub short_long: Vec<ShortLongRow>,
    /// Plain-text rendering of the above.
    pub report: String,
}

/// Summarize a result: descriptive statistics, the Kruskal-Wallis omnibus
/// across techniques, pairwise effect sizes, and the ShortTC/LongTC
/// effect table.
pub fn analyze(result: &ExperimentResult) -> Result<AnalysisBundle> {
    if result.rows.is_empty() {
        return Err(Error::EmptySample("experiment result"));
    }

    let techniques: Vec<Technique> = Technique::ALL
        .into_iter()
        .filter(|t| result.rows.iter().any(|r| r.technique == *t))
        .collect();
    let mut objects: Vec<&str> = Vec::new();
    for r in &result.rows {
        if !objects.contains(&r.object.as_str()) {
            objects.push(&r.object);
        }
    }

    let values = |pick: &dyn Fn(&ResultRow) -> bool| -> Vec<f64> {
        result
            .rows
            .iter()
            .filter(|r| pick(r))
            .map(|r| r.apfd)
            .collect()
    };

    let mut summaries = Vec::new();
    for &t in &techniques {
        let sample = values(&|r: &ResultRow| r.technique == t);
        summaries.push(SummaryRow {
            object: "(all)".to_string(),
            technique: t,
            summary: stats::summarize(&sample)?,
        });
    }
    for &obj in &objects {
        for &t in &techniques {
            let sample = values(&|r: &ResultRow| r.technique == t && r.object == obj);
            if sample.is_empty() {
                continue;
            }
            summaries.push(SummaryRow {
                object: obj.to_string(),
                technique: t,
                summary: stats::summarize(&sample)?,
            });
        }
    }

    let kruskal = if techniques.len() >= 2 {
        let groups: Vec<Vec<f64>> = techniques
            .iter()
            .map(|&t| values(&|r: &ResultRow| r.technique == t))
            .collect();
        Some(stats::kruskal_wallis(&groups)?)
    } else {
        None
    };

    let mut a12_matrix = Vec::new();
    for (i, &a) in techniques.iter().enumerate() {
        for &b in &techniques[i + 1..] {
            let sa = values(&|r: &ResultRow| r.technique == a);
            let sb = values(&|r: &ResultRow| r.technique == b);
            a12_matrix.push(A12Row { a, b, effect: stats::a12(&sa, &sb)? });
        }
    }

    let mut short_long = Vec::new();
    for &t in &techniques {
        let short = values(&|r: &ResultRow| r.technique == t && r.group == "ShortTC");
        let long = values(&|r: &ResultRow| r.technique == t && r.group == "LongTC");
        let effect = if short.is_empty() || long.is_empty() {
            None
        } else {
            Some(stats::a12(&short, &long)?)
        };
        short_long.push(ShortLongRow { technique: t, effect });
    }

    let report = render_report(result, &techniques, &summaries, &kruskal, &short_long);
    Ok(AnalysisBundle { summaries, kruskal, a12_matrix, short_long, report })
}

fn render_report(
    result: &ExperimentResult,
    techniques: &[Technique],
    summaries: &[SummaryRow],
    kruskal: &Option<KruskalWallis>,
    short_long: &[ShortLongRow],
) -> String {
    let mut out = String::new();
    let objects: std::collections::BTreeSet<&str> =
        result.rows.iter().map(|r| r.object.as_str()).collect();
    let _ = writeln!(
        out,
        "{} rows over {} object(s) and {} technique(s)",
        result.rows.len(),
        objects.len(),
        techniques.len()
    );
    for w in &result.warnings {
        let _ = writeln!(out, "warning: {w}");
    }

    let _ = writeln!(out, "\nAPFD by technique (pooled):");
    for s in summaries.iter().filter(|s| s.object == "(all)") {
        let _ = writeln!(
            out,
            "  {:<8} median {:.6}  mean {:.6}  range [{:.6}, {:.6}]",
            s.technique.id(),
            s.summary.median,
            s.summary.mean,
            s.summary.min,
            s.summary.max
        );
    }

    match kruskal {
        Some(kw) => {
            let _ = writeln!(
                out,
                "\nKruskal-Wallis across techniques: H = {:.6}, df = {}, p = {:.6e}",
                kw.h, kw.df, kw.p_value
            );
        }
        None => {
            let _ = writeln!(
                out,
                "\nKruskal-Wallis not available: fewer than two techniques"
            );
        }
    }

    if short_long.iter().any(|r| r.effect.is_some()) {
        let _ = writeln!(out, "\nShortTC vs LongTC effect size per technique:");
        for row in short_long {
            match &row.effect {
                Some(e) => {
                    let _ = writeln!(
                        out,
                        "  {:<8} A12 = {:.6}  {}",
                        row.technique.id(),
                        e.value,
                        e.category
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  {:<8} not available (a group is empty)",
                        row.technique.id()
                    );
                }
            }
        }
    }
    out
}

impl AnalysisBundle {
    /// Write `summary.csv`, `kruskal.csv`, `a12_matrix.csv`,
    /// `a12_short_long.csv`, and `report.txt` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;

        let mut summary = String::from("object,technique,count,min,q1,median,q3,max,mean\n");
        for s in &self.summaries {
            let _ = writeln!(
                summary,
                "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                s.object,
                s.technique,
                s.summary.count,
                s.summary.min,
                s.summary.q1,
                s.summary.median,
                s.summary.q3,
                s.summary.max,
                s.summary.mean
            );
        }
        crate::error::write(dir.join("summary.csv"), summary)?;

        let mut kruskal = String::from("h,df,p_value\n");
        if let Some(kw) = &self.kruskal {
            let _ = writeln!(kruskal, "{:.6},{},{:.6e}", kw.h, kw.df, kw.p_value);
        }
        crate::error::write(dir.join("kruskal.csv"), kruskal)?;

        let mut matrix = String::from("tech_a,tech_b,a12,category\n");
        for row in &self.a12_matrix {
            let _ = writeln!(
                matrix,
                "{},{},{:.6},{}",
                row.a, row.b, row.effect.value, row.effect.category
            );
        }
        crate::error::write(dir.join("a12_matrix.csv"), matrix)?;

        let mut short_long = String::from("technique,a12,category\n");
        for row in &self.short_long {
            match &row.effect {
                Some(e) => {
                    let _ = writeln!(
                        short_long,
                        "{},{:.6},{}",
                        row.technique, e.value, e.category
                    );
                }
                None => {
                    let _ = writeln!(short_long, "{},NA,NA", row.technique);
                }
            }
        }
        crate::error::write(dir.join("a12_short_long.csv"), short_long)?;

        crate::error::write(dir.join("report.txt"), &self.report)?;
        Ok(())
    }
}
