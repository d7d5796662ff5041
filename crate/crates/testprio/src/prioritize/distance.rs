//! Distance and similarity measures between test cases.
//!
//! Two families live here. Step-set measures ([`DistanceKind`]) treat a test
//! case as its set (or bag) of step labels and feed the adaptive random
//! techniques. String measures ([`StringMetric`]) treat a test case as one
//! newline-joined string, NUL-padded to the longest in the suite, compared
//! position by position over code points; they feed the string-distance
//! techniques.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::testgen::{TestCase, TestSuite};

/// Step-set measure used by the adaptive random techniques.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    /// 1 - |a ∩ b| / |a ∪ b| over distinct steps. A distance in [0, 1].
    Jaccard,
    /// Sum of |a_i - b_i| over binary coverage vectors indexed by the
    /// universe; equals the symmetric difference of the distinct-step sets.
    Manhattan,
    /// |a ∩ b| / ((|a| + |b|) / 2): distinct common steps against the mean
    /// raw size. A similarity in [0, 1], higher meaning more alike.
    SimilarityCm,
}

/// Evaluate `kind` between two test cases.
///
/// `universe` must contain every step of both test cases; it fixes the
/// coordinate order of the binary vectors behind `Manhattan` (the result
/// does not depend on that order, but the contract keeps callers honest
/// about the step alphabet). Two stepless test cases compare at 0 for
/// every kind; that degenerate corner cannot be produced by generated
/// suites, where every test has at least one step.
pub fn distance(
    kind: DistanceKind,
    a: &TestCase,
    b: &TestCase,
    universe: &[String],
) -> Result<f64> {
    let universe: BTreeSet<&str> = universe.iter().map(String::as_str).collect();
    for step in a.steps.iter().chain(&b.steps) {
        if !universe.contains(step.as_str()) {
            return Err(Error::UniverseMissingStep(step.clone()));
        }
    }
    let sa: BTreeSet<&str> = a.steps.iter().map(String::as_str).collect();
    let sb: BTreeSet<&str> = b.steps.iter().map(String::as_str).collect();
    Ok(eval_sets(kind, &sa, &sb, a.size(), b.size()))
}

/// Core evaluation over prepared distinct-step sets and raw sizes.
pub(crate) fn eval_sets(
    kind: DistanceKind,
    sa: &BTreeSet<&str>,
    sb: &BTreeSet<&str>,
    raw_a: usize,
    raw_b: usize,
) -> f64 {
    let inter = sa.intersection(sb).count() as f64;
    match kind {
        DistanceKind::Jaccard => {
            let union = (sa.len() + sb.len()) as f64 - inter;
            if union == 0.0 {
                0.0
            } else {
                1.0 - inter / union
            }
        }
        DistanceKind::Manhattan => (sa.len() + sb.len()) as f64 - 2.0 * inter,
        DistanceKind::SimilarityCm => {
            let denom = (raw_a + raw_b) as f64 / 2.0;
            if denom == 0.0 {
                0.0
            } else {
                inter / denom
            }
        }
    }
}

/// Distinct-step set of every test, in suite order.
pub(crate) fn step_sets(suite: &TestSuite) -> Vec<BTreeSet<&str>> {
    suite
        .test_cases
        .iter()
        .map(|tc| tc.steps.iter().map(String::as_str).collect())
        .collect()
}

/// Full n x n matrix of `kind` over the suite, row-major.
pub(crate) fn set_matrix(suite: &TestSuite, kind: DistanceKind) -> Vec<f64> {
    let sets = step_sets(suite);
    let n = sets.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = eval_sets(
                kind,
                &sets[i],
                &sets[j],
                suite.test_cases[i].size(),
                suite.test_cases[j].size(),
            );
            m[i * n + j] = d;
            m[j * n + i] = d;
        }
        // Diagonal: identical inputs. Only SimilarityCm is non-zero there.
        m[i * n + i] = eval_sets(
            kind,
            &sets[i],
            &sets[i],
            suite.test_cases[i].size(),
            suite.test_cases[i].size(),
        );
    }
    m
}

/// Positional measure over the padded code-point form of two test cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StringMetric {
    /// Count of differing positions.
    Hamming,
    /// Euclidean norm of the code-point difference vector.
    Euclidean,
    /// Sum of absolute code-point differences.
    Manhattan,
}

/// Code-point vector of every test: labels joined with a newline, then
/// right-padded with NUL to the longest string in the suite, so padding
/// positions disagree with every real character.
pub(crate) fn code_point_vectors(suite: &TestSuite) -> Vec<Vec<u32>> {
    let mut vectors: Vec<Vec<u32>> = suite
        .test_cases
        .iter()
        .map(|tc| tc.steps.join("\n").chars().map(u32::from).collect())
        .collect();
    let width = vectors.iter().map(Vec::len).max().unwrap_or(0);
    for v in &mut vectors {
        v.resize(width, 0);
    }
    vectors
}

pub(crate) fn eval_strings(metric: StringMetric, a: &[u32], b: &[u32]) -> f64 {
    debug_assert_eq!(a.len(), b.len(), "vectors are padded to a common width");
    match metric {
        StringMetric::Hamming => a.iter().zip(b).filter(|(x, y)| x != y).count() as f64,
        StringMetric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = f64::from(x) - f64::from(y);
                d * d
            })
            .sum::<f64>()
            .sqrt(),
        StringMetric::Manhattan => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (f64::from(x) - f64::from(y)).abs())
            .sum(),
    }
}

/// Full n x n matrix of `metric` over the suite, row-major.
pub(crate) fn string_matrix(suite: &TestSuite, metric: StringMetric) -> Vec<f64> {
    let vectors = code_point_vectors(suite);
    let n = vectors.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = eval_strings(metric, &vectors[i], &vectors[j]);
            m[i * n + j] = d;
            m[j * n + i] = d;
        }
    }
    m
}
