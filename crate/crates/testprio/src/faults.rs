//! Fault seeding and size-based classification of failing suites.
//!
//! A [`FaultReport`] maps fault ids to the set of test ids that reveal them.
//! Reports are written and read as two-column CSV (`fault_id,test_id`, one
//! row per revealing test). [`inject_failure`] fabricates a single-fault
//! report by attaching the fault to one test drawn from an extremal slice of
//! the suite (longest tests, fewest branch traversals, ...), which is how
//! controlled failure patterns are planted into generated suites.
//! [`classify_suite`] goes the other way: given a suite and a report, it
//! labels the failure pattern by where the failing tests sit relative to the
//! mean test size.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::testgen::{TestCaseMetrics, TestSuite};

/// Which fault ids are revealed by which test ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultReport {
    reveals: BTreeMap<String, BTreeSet<String>>,
}

impl FaultReport {
    pub fn new() -> Self {
        FaultReport::default()
    }

    /// Record that `test_id` reveals `fault_id`.
    pub fn record(&mut self, fault_id: impl Into<String>, test_id: impl Into<String>) {
        self.reveals
            .entry(fault_id.into())
            .or_default()
            .insert(test_id.into());
    }

    pub fn is_empty(&self) -> bool {
        self.reveals.is_empty()
    }

    /// Number of distinct faults.
    pub fn len(&self) -> usize {
        self.reveals.len()
    }

    pub fn fault_ids(&self) -> impl Iterator<Item = &str> {
        self.reveals.keys().map(String::as_str)
    }

    /// Tests revealing `fault_id`, if the fault is known.
    pub fn revealing(&self, fault_id: &str) -> Option<&BTreeSet<String>> {
        self.reveals.get(fault_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.reveals.iter().map(|(f, ts)| (f.as_str(), ts))
    }

    /// Union of all revealing tests.
    pub fn failing_tests(&self) -> BTreeSet<&str> {
        self.reveals
            .values()
            .flat_map(|ts| ts.iter().map(String::as_str))
            .collect()
    }

    /// Every test id in the report must name a test of `suite`.
    pub fn validate_against(&self, suite: &TestSuite) -> Result<()> {
        for tests in self.reveals.values() {
            for t in tests {
                if suite.get(t).is_none() {
                    return Err(Error::UnknownTestId(t.clone()));
                }
            }
        }
        Ok(())
    }

    /// Parse from CSV with header `fault_id,test_id`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "fault_id" || &headers[1] != "test_id" {
            return Err(Error::Parse(format!(
                "fault report header must be `fault_id,test_id`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut report = FaultReport::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 || record[0].is_empty() || record[1].is_empty() {
                return Err(Error::Parse(format!(
                    "fault report row {}: expected non-empty `fault_id,test_id`",
                    i + 2
                )));
            }
            report.record(&record[0], &record[1]);
        }
        Ok(report)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&crate::error::read_to_string(path)?)
    }

    /// Serialize as CSV, rows ordered by fault id then test id.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("fault_id,test_id\n");
        for (fault, tests) in &self.reveals {
            for test in tests {
                out.push_str(fault);
                out.push(',');
                out.push_str(test);
                out.push('\n');
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::error::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// Where the planted failure should sit in the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureProfile {
    /// A test of maximal size fails.
    LongTC,
    /// A test of minimal size fails.
    ShortTC,
    /// A test with the most branch traversals fails.
    ManyBR,
    /// A test with the fewest branch traversals fails.
    FewBR,
    /// A test with the most join traversals fails.
    ManyJOIN,
    /// A test with the fewest join traversals fails.
    FewJOIN,
    /// A test that alone covers some transition fails.
    Essential,
}

impl FailureProfile {
    pub const ALL: [FailureProfile; 7] = [
        FailureProfile::LongTC,
        FailureProfile::ShortTC,
        FailureProfile::ManyBR,
        FailureProfile::FewBR,
        FailureProfile::ManyJOIN,
        FailureProfile::FewJOIN,
        FailureProfile::Essential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FailureProfile::LongTC => "LongTC",
            FailureProfile::ShortTC => "ShortTC",
            FailureProfile::ManyBR => "ManyBR",
            FailureProfile::FewBR => "FewBR",
            FailureProfile::ManyJOIN => "ManyJOIN",
            FailureProfile::FewJOIN => "FewJOIN",
            FailureProfile::Essential => "Essential",
        }
    }
}

impl fmt::Display for FailureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FailureProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FailureProfile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown failure profile `{s}`; valid: LongTC, ShortTC, ManyBR, \
                     FewBR, ManyJOIN, FewJOIN, Essential"
                ))
            })
    }
}

/// Plant a single fault `F1` on one test drawn from the profile's extremal
/// slice of the suite.
///
/// Ties for the extreme are broken uniformly at random, seeded by `seed`.
/// `metrics` must cover every test of the suite. `Essential` fails with
/// [`Error::NoEssentialTest`] when no test has sole coverage of any
/// transition.
pub fn inject_failure(
    suite: &TestSuite,
    metrics: &[TestCaseMetrics],
    profile: FailureProfile,
    seed: u64,
) -> Result<FaultReport> {
    if suite.is_empty() {
        return Err(Error::EmptySuite);
    }
    let by_id: BTreeMap<&str, &TestCaseMetrics> =
        metrics.iter().map(|m| (m.id.as_str(), m)).collect();
    let mut rows = Vec::with_capacity(suite.len());
    for tc in &suite.test_cases {
        match by_id.get(tc.id.as_str()) {
            Some(m) => rows.push(*m),
            None => return Err(Error::MissingMetrics(tc.id.clone())),
        }
    }

    let candidates: Vec<&str> = match profile {
        FailureProfile::Essential => {
            let set: Vec<&str> = rows
                .iter()
                .filter(|m| m.essential)
                .map(|m| m.id.as_str())
                .collect();
            if set.is_empty() {
                return Err(Error::NoEssentialTest);
            }
            set
        }
        _ => {
            let key = |m: &TestCaseMetrics| match profile {
                FailureProfile::LongTC | FailureProfile::ShortTC => m.size,
                FailureProfile::ManyBR | FailureProfile::FewBR => m.branch_count,
                FailureProfile::ManyJOIN | FailureProfile::FewJOIN => m.join_count,
                FailureProfile::Essential => unreachable!(),
            };
            let want_max = matches!(
                profile,
                FailureProfile::LongTC | FailureProfile::ManyBR | FailureProfile::ManyJOIN
            );
            let extreme = rows
                .iter()
                .map(|m| key(m))
                .reduce(|a, b| if want_max { a.max(b) } else { a.min(b) })
                .expect("suite is non-empty");
            rows.iter()
                .filter(|m| key(m) == extreme)
                .map(|m| m.id.as_str())
                .collect()
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = candidates[rng.random_range(0..candidates.len())];
    let mut report = FaultReport::new();
    report.record("F1", pick);
    Ok(report)
}

/// Size-based label for a suite's failure pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteSizeClass {
    /// Every failing test is strictly longer than the mean test size.
    LongTC,
    /// Every failing test is strictly shorter than the mean test size.
    ShortTC,
    /// All tests in the suite have the same size, so size carries no signal.
    ConstantSizeTC,
    /// Failing tests straddle the mean.
    Mixed,
}

impl SuiteSizeClass {
    pub fn name(self) -> &'static str {
        match self {
            SuiteSizeClass::LongTC => "LongTC",
            SuiteSizeClass::ShortTC => "ShortTC",
            SuiteSizeClass::ConstantSizeTC => "ConstantSizeTC",
            SuiteSizeClass::Mixed => "Mixed",
        }
    }
}

impl fmt::Display for SuiteSizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classify the failure pattern of `suite` under `faults`.
///
/// Checks run in order: a report with no faults is an error; a suite whose
/// tests all share one size is `ConstantSizeTC`; failing tests all strictly
/// above the mean size give `LongTC`, all strictly below give `ShortTC`;
/// anything else is `Mixed`.
pub fn classify_suite(suite: &TestSuite, faults: &FaultReport) -> Result<SuiteSizeClass> {
    if faults.is_empty() {
        return Err(Error::EmptyFaultReport);
    }
    if suite.is_empty() {
        return Err(Error::EmptySuite);
    }
    faults.validate_against(suite)?;
    let failing = faults.failing_tests();
    debug_assert!(!failing.is_empty(), "non-empty report has a revealing test");

    let sizes: Vec<usize> = suite.test_cases.iter().map(|tc| tc.size()).collect();
    if sizes.iter().all(|&s| s == sizes[0]) {
        return Ok(SuiteSizeClass::ConstantSizeTC);
    }
    let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    let failing_sizes: Vec<f64> = suite
        .test_cases
        .iter()
        .filter(|tc| failing.contains(tc.id.as_str()))
        .map(|tc| tc.size() as f64)
        .collect();
    if failing_sizes.iter().all(|&s| s > mean) {
        Ok(SuiteSizeClass::LongTC)
    } else if failing_sizes.iter().all(|&s| s < mean) {
        Ok(SuiteSizeClass::ShortTC)
    } else {
        Ok(SuiteSizeClass::Mixed)
    }
}
