//! Test suite generation: exhaustive bounded path enumeration over a model.
//!
//! The generator implements the all-n-loop-paths criterion with a per-state
//! visit bound: **a path may visit each state at most `loop_bound` times,
//! counting the initial state's occurrence at position zero**. A test case is
//! a maximal such path, i.e. one that ends at a sink or whose every extension
//! would push some state past the bound. With `loop_bound = 1` this is plain
//! simple-path enumeration; each extra unit allows one more pass through each
//! loop. This per-state reading is the one the rest of the crate (metrics,
//! experiments, fixtures) is calibrated against.
//!
//! Suites are canonicalized before ids are assigned: test cases are sorted by
//! step sequence in descending lexicographic order and then named `TC1`,
//! `TC2`, ... so ids are stable across runs.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lts::LtsModel;

/// One test case: an id and the step sequence to execute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub steps: Vec<String>,
}

impl TestCase {
    pub fn new(id: impl Into<String>, steps: Vec<String>) -> Self {
        TestCase { id: id.into(), steps }
    }

    /// Number of steps, counting repeats.
    pub fn size(&self) -> usize {
        self.steps.len()
    }
}

/// A named collection of test cases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSuite {
    pub name: String,
    pub test_cases: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(name: impl Into<String>, test_cases: Vec<TestCase>) -> Self {
        TestSuite { name: name.into(), test_cases }
    }

    pub fn len(&self) -> usize {
        self.test_cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.test_cases.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&TestCase> {
        self.test_cases.iter().find(|tc| tc.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.test_cases.iter().map(|tc| tc.id.clone()).collect()
    }

    /// Serialize as a JSON document (`name` plus `test_cases`).
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("suite serialization cannot fail");
        s.push('\n');
        s
    }

    /// Parse the JSON document form. Rejects suites with duplicate or empty
    /// test ids and test cases with no steps.
    pub fn from_json(input: &str) -> Result<TestSuite> {
        let suite: TestSuite = serde_json::from_str(input)?;
        suite.check()?;
        Ok(suite)
    }

    /// Reject empty ids, stepless tests, and duplicate ids.
    pub fn check(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for tc in &self.test_cases {
            if tc.id.is_empty() {
                return Err(Error::BadTestCase(tc.id.clone(), "empty id".into()));
            }
            if tc.steps.is_empty() {
                return Err(Error::BadTestCase(tc.id.clone(), "no steps".into()));
            }
            if seen.insert(tc.id.clone(), ()).is_some() {
                return Err(Error::BadTestCase(tc.id.clone(), "duplicate id".into()));
            }
        }
        Ok(())
    }

    /// Write the flat CSV form: one row per step, columns
    /// `test_id,position,step` with 1-based positions.
    pub fn write_step_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["test_id", "position", "step"])?;
        for tc in &self.test_cases {
            for (i, step) in tc.steps.iter().enumerate() {
                w.write_record([tc.id.as_str(), &(i + 1).to_string(), step])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_step_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_step_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Enumerate every maximal path of `model` under the per-state visit bound
/// and return them as a canonical suite named `"suite"` (rename via the
/// public field if needed).
///
/// Errors when the model fails validation or `loop_bound == 0`. A model
/// whose initial state has no outgoing transitions yields an empty suite:
/// the only path has no steps and test cases must have at least one.
pub fn generate(model: &LtsModel, loop_bound: u32) -> Result<TestSuite> {
    if loop_bound == 0 {
        return Err(Error::BadLoopBound(loop_bound));
    }
    let report = model.validate();
    if report.has_errors() {
        return Err(Error::InvalidModel(report));
    }

    let adj = model.adjacency();
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    counts.insert(model.initial(), 1);
    let mut path: Vec<&str> = Vec::new();
    let mut paths: Vec<Vec<String>> = Vec::new();

    fn dfs<'a>(
        u: &'a str,
        adj: &BTreeMap<&'a str, Vec<&'a crate::lts::Transition>>,
        bound: u32,
        counts: &mut BTreeMap<&'a str, u32>,
        path: &mut Vec<&'a str>,
        paths: &mut Vec<Vec<String>>,
    ) {
        let mut extended = false;
        for t in adj.get(u).into_iter().flatten() {
            let c = counts.get(t.target.as_str()).copied().unwrap_or(0);
            if c < bound {
                extended = true;
                counts.insert(t.target.as_str(), c + 1);
                path.push(t.label.as_str());
                dfs(t.target.as_str(), adj, bound, counts, path, paths);
                path.pop();
                counts.insert(t.target.as_str(), c);
            }
        }
        if !extended && !path.is_empty() {
            paths.push(path.iter().map(|s| s.to_string()).collect());
        }
    }
    dfs(model.initial(), &adj, loop_bound, &mut counts, &mut path, &mut paths);

    // Canonical order: descending lexicographic by step sequence.
    paths.sort_by(|a, b| b.cmp(a));
    let test_cases = paths
        .into_iter()
        .enumerate()
        .map(|(i, steps)| TestCase::new(format!("TC{}", i + 1), steps))
        .collect();
    Ok(TestSuite::new("suite", test_cases))
}

/// Structural metrics of one test case relative to its model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCaseMetrics {
    pub id: String,
    /// Step count, with repeats.
    pub size: u32,
    /// Traversals of transitions whose source is a branch state.
    pub branch_count: u32,
    /// Traversals of transitions whose target is a join state.
    pub join_count: u32,
    /// Traversals of loop transitions.
    pub loop_traversals: u32,
    /// True when this test covers some transition no other test in the
    /// suite covers.
    pub essential: bool,
}

/// Compute metrics for every test case in the suite, in suite order.
///
/// Each step sequence must be a deterministic path of the model; the model
/// must validate without errors.
pub fn metrics(suite: &TestSuite, model: &LtsModel) -> Result<Vec<TestCaseMetrics>> {
    let profile = model.profile()?;
    let traces: Vec<_> = suite
        .test_cases
        .iter()
        .map(|tc| {
            model.trace(&tc.steps).map_err(|e| match e {
                Error::NotAPath(msg) => Error::NotAPath(format!("test `{}`: {msg}", tc.id)),
                other => other,
            })
        })
        .collect::<Result<_>>()?;

    // Coverage tally: how many tests cover each transition (distinct
    // containment, multiplicity inside one test does not matter).
    let mut covered_by: BTreeMap<&crate::lts::Transition, usize> = BTreeMap::new();
    for trace in &traces {
        let distinct: std::collections::BTreeSet<_> = trace.iter().copied().collect();
        for t in distinct {
            *covered_by.entry(t).or_default() += 1;
        }
    }

    Ok(suite
        .test_cases
        .iter()
        .zip(&traces)
        .map(|(tc, trace)| {
            let mut branch_count = 0;
            let mut join_count = 0;
            let mut loop_traversals = 0;
            for t in trace {
                if profile.branch_states.contains(&t.source) {
                    branch_count += 1;
                }
                if profile.join_states.contains(&t.target) {
                    join_count += 1;
                }
                if profile.loop_transitions.contains(t) {
                    loop_traversals += 1;
                }
            }
            let essential = {
                let distinct: std::collections::BTreeSet<_> = trace.iter().copied().collect();
                distinct.iter().any(|t| covered_by[*t] == 1)
            };
            TestCaseMetrics {
                id: tc.id.clone(),
                size: tc.steps.len() as u32,
                branch_count,
                join_count,
                loop_traversals,
                essential,
            }
        })
        .collect())
}
