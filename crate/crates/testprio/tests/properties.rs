//! Randomized invariants over the library core.
//!
//! Suites, fault reports, and models are built from value strategies so
//! failures shrink to small witnesses. The same invariants run as seeded
//! sweeps in the acceptance gate; here they get shrinking and fresh
//! entropy on every run.

use std::collections::{BTreeMap, BTreeSet};

use proptest::collection::vec;
use proptest::prelude::*;
use testprio::faults::FaultReport;
use testprio::lts::{LtsModel, Transition};
use testprio::prioritize::{Prioritizer, Technique};
use testprio::stats;
use testprio::testgen::{self, TestCase, TestSuite};

const ALPHABET: [&str; 8] = [
    "S - press start",
    "R - show the menu",
    "C - entry accepted",
    "S - type the code",
    "R - flash an error",
    "C - entry rejected",
    "S - submit the form",
    "R - confirm",
];

fn suite_strategy() -> impl Strategy<Value = TestSuite> {
    vec(vec(0..ALPHABET.len(), 1..=6), 2..=8).prop_map(|cases| {
        let test_cases = cases
            .into_iter()
            .enumerate()
            .map(|(i, steps)| {
                TestCase::new(
                    format!("TC{}", i + 1),
                    steps.into_iter().map(|s| ALPHABET[s].to_string()).collect(),
                )
            })
            .collect();
        TestSuite::new("randomized", test_cases)
    })
}

/// Suite plus a report of 1..=3 faults, each revealed by a nonempty
/// subset of the tests (encoded as bitmasks so shrinking stays valid).
fn instance_strategy() -> impl Strategy<Value = (TestSuite, FaultReport)> {
    suite_strategy()
        .prop_flat_map(|suite| {
            let n = suite.len();
            let masks = vec(1usize..(1 << n), 1..=3);
            (Just(suite), masks)
        })
        .prop_map(|(suite, masks)| {
            let ids = suite.ids();
            let mut report = FaultReport::new();
            for (f, mask) in masks.into_iter().enumerate() {
                for (i, id) in ids.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        report.record(format!("F{}", f + 1), id.clone());
                    }
                }
            }
            (suite, report)
        })
}

fn technique_strategy() -> impl Strategy<Value = Technique> {
    prop::sample::select(Technique::ALL.to_vec())
}

/// Small sample with repeats likely, so ties get exercised.
fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    vec((0..10).prop_map(|v| v as f64), 1..=25)
}

/// Chain of up to 6 states plus a few extra edges, all states reachable,
/// one distinct label per transition, and a visit bound of 1 or 2.
fn model_strategy() -> impl Strategy<Value = (LtsModel, u32)> {
    (2usize..=6)
        .prop_flat_map(|k| (Just(k), vec((0..k, 0..k), 0..=3), 1u32..=2))
        .prop_map(|(k, extra, bound)| {
            let mut transitions: Vec<Transition> = (0..k - 1)
                .map(|i| {
                    Transition::new(
                        format!("s{i}"),
                        format!("S - step {i}"),
                        format!("s{}", i + 1),
                    )
                })
                .collect();
            for (j, (a, b)) in extra.into_iter().enumerate() {
                transitions.push(Transition::new(
                    format!("s{a}"),
                    format!("C - jump {j}"),
                    format!("s{b}"),
                ));
            }
            let model =
                LtsModel::from_parts("s0", (0..k).map(|i| format!("s{i}")), transitions);
            (model, bound)
        })
}

/// Independent enumeration of every maximal path under the visit bound.
fn enumerate_paths(model: &LtsModel, bound: u32) -> Vec<Vec<String>> {
    let mut visits = BTreeMap::new();
    visits.insert(model.initial().to_string(), 1u32);
    let mut stack = vec![(model.initial().to_string(), visits, Vec::<String>::new())];
    let mut out = Vec::new();
    while let Some((state, visits, path)) = stack.pop() {
        let mut moved = false;
        for t in model.transitions().iter().filter(|t| t.source == state) {
            let seen = visits.get(&t.target).copied().unwrap_or(0);
            if seen < bound {
                moved = true;
                let mut v = visits.clone();
                *v.entry(t.target.clone()).or_insert(0) += 1;
                let mut p = path.clone();
                p.push(t.label.clone());
                stack.push((t.target.clone(), v, p));
            }
        }
        if !moved && !path.is_empty() {
            out.push(path);
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_order_is_a_permutation_of_the_suite(
        (suite, report) in instance_strategy(),
        technique in technique_strategy(),
        seed in any::<u64>(),
    ) {
        let pri = Prioritizer::new(&suite).unwrap().with_faults(&report);
        let order = pri.run(technique, seed).unwrap();
        let mut got = order.order.clone();
        let mut want = suite.ids();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn the_same_seed_reproduces_the_same_order(
        (suite, report) in instance_strategy(),
        technique in technique_strategy(),
        seed in any::<u64>(),
    ) {
        let first = Prioritizer::new(&suite)
            .unwrap()
            .with_faults(&report)
            .run(technique, seed)
            .unwrap();
        let second = Prioritizer::new(&suite)
            .unwrap()
            .with_faults(&report)
            .run(technique, seed)
            .unwrap();
        prop_assert_eq!(first.order, second.order);
    }

    #[test]
    fn apfd_stays_in_the_half_open_unit_interval(
        (order, report) in instance_strategy().prop_flat_map(|(suite, report)| {
            (Just(suite.ids()).prop_shuffle(), Just(report))
        }),
    ) {
        let apfd = stats::apfd(&order, &report).unwrap();
        prop_assert!(apfd.value > 0.0 && apfd.value <= 1.0, "apfd {}", apfd.value);
    }

    #[test]
    fn a12_of_swapped_samples_complements_to_one(
        x in sample_strategy(),
        y in sample_strategy(),
    ) {
        let ab = stats::a12(&x, &y).unwrap().value;
        let ba = stats::a12(&y, &x).unwrap().value;
        prop_assert!((ab + ba - 1.0).abs() < 1e-12, "{} + {}", ab, ba);
    }

    #[test]
    fn increasing_transforms_move_neither_a12_nor_h(
        x in sample_strategy(),
        y in sample_strategy(),
        groups in vec(sample_strategy(), 2..=4),
    ) {
        let stretch = |v: &[f64]| -> Vec<f64> { v.iter().map(|e| 3.0 * e + 7.0).collect() };

        let raw = stats::a12(&x, &y).unwrap().value;
        let moved = stats::a12(&stretch(&x), &stretch(&y)).unwrap().value;
        prop_assert!((raw - moved).abs() < 1e-12, "a12 {} vs {}", raw, moved);

        let stretched: Vec<Vec<f64>> = groups.iter().map(|g| stretch(g)).collect();
        let h1 = stats::kruskal_wallis(&groups).unwrap().h;
        let h2 = stats::kruskal_wallis(&stretched).unwrap().h;
        prop_assert!((h1 - h2).abs() < 1e-9, "H {} vs {}", h1, h2);
    }

    #[test]
    fn additional_coverage_picks_are_greedy_maximal(
        suite in suite_strategy(),
        seed in any::<u64>(),
    ) {
        let order = Prioritizer::new(&suite).unwrap().run(Technique::SA, seed).unwrap();
        let steps_of = |id: &str| -> BTreeSet<&str> {
            suite.get(id).unwrap().steps.iter().map(String::as_str).collect()
        };
        let mut covered: BTreeSet<&str> = BTreeSet::new();
        let mut remaining: BTreeSet<&str> =
            suite.test_cases.iter().map(|tc| tc.id.as_str()).collect();
        for chosen in &order.order {
            let gain = |id: &str, covered: &BTreeSet<&str>| {
                steps_of(id).difference(covered).count()
            };
            let mut best = remaining.iter().map(|id| gain(id, &covered)).max().unwrap();
            if best == 0 {
                covered.clear();
                best = remaining.iter().map(|id| gain(id, &covered)).max().unwrap();
            }
            prop_assert_eq!(gain(chosen, &covered), best, "at {}", chosen);
            covered.extend(steps_of(chosen));
            remaining.remove(chosen.as_str());
        }
    }

    #[test]
    fn generation_agrees_with_worklist_path_enumeration(
        (model, bound) in model_strategy(),
    ) {
        prop_assert!(!model.validate().has_errors());
        let suite = testgen::generate(&model, bound).unwrap();
        let mut got: Vec<Vec<String>> =
            suite.test_cases.iter().map(|tc| tc.steps.clone()).collect();
        got.sort();
        prop_assert_eq!(got, enumerate_paths(&model, bound));
    }
}
