//! The fourteen prioritization techniques behind one dispatcher.
//!
//! A [`Prioritizer`] wraps a suite (plus an optional model and fault
//! report), lazily caches everything reusable across runs (step sets,
//! distance matrices, ranking scores), and maps a [`Technique`] and a seed
//! to a [`PrioritizedOrder`]. Every run is deterministic given its seed,
//! and every tie anywhere is broken uniformly at random from that seed's
//! generator, so repeated runs sample the full tie space instead of
//! favoring suite order.
//!
//! The techniques fall into four families:
//!
//! * plain score sorts (`FW`, `Stoop`, `PC`, `ST`) rank by a per-test score,
//!   descending;
//! * adaptive random (`ARPJac`, `ARPMan`, `ARPSim1`, `ARPSim2`) grow the
//!   order by scoring a small random candidate set against what is already
//!   placed;
//! * greedy coverage (`SA`, `Opt`) repeatedly take the test adding the most
//!   uncovered steps or unrevealed faults;
//! * spread by string distance (`SDh`, `SDe`, `SDm`) start from the test
//!   farthest from everything and keep maximizing the minimum distance to
//!   the placed prefix. `Ran` is the uniform shuffle baseline.

mod distance;

pub use distance::{distance, DistanceKind, StringMetric};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faults::FaultReport;
use crate::lts::LtsModel;
use crate::testgen::TestSuite;

/// Identifier of one prioritization technique.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[allow(clippy::upper_case_acronyms)]
pub enum Technique {
    /// Greedy additional-fault ordering; needs a fault report.
    Opt,
    /// Uniform random permutation.
    Ran,
    /// Adaptive random over Jaccard distance, max-min selection.
    ARPJac,
    /// Adaptive random over Manhattan distance, max-min selection.
    ARPMan,
    /// Adaptive random over the similarity measure, max-min selection.
    ARPSim1,
    /// Adaptive random over the similarity measure, max-max selection.
    ARPSim2,
    /// Fixed transition weights: 2 for branch or join crossings, 1 otherwise.
    FW,
    /// Averaged weight of path length: mean suite-wide step popularity.
    Stoop,
    /// Path complexity: size plus squared fan-in/fan-out information flow.
    PC,
    /// String distance spread, Hamming.
    SDh,
    /// String distance spread, Euclidean.
    SDe,
    /// String distance spread, Manhattan.
    SDm,
    /// Total distinct-step coverage, descending.
    ST,
    /// Additional distinct-step coverage with reset on exhaustion.
    SA,
}

impl Technique {
    /// Every technique, in registry order. This order is the canonical
    /// one for result tables and pairwise comparisons.
    pub const ALL: [Technique; 14] = [
        Technique::Opt,
        Technique::Ran,
        Technique::ARPJac,
        Technique::ARPMan,
        Technique::ARPSim1,
        Technique::ARPSim2,
        Technique::FW,
        Technique::Stoop,
        Technique::PC,
        Technique::SDh,
        Technique::SDe,
        Technique::SDm,
        Technique::ST,
        Technique::SA,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Technique::Opt => "Opt",
            Technique::Ran => "Ran",
            Technique::ARPJac => "ARPJac",
            Technique::ARPMan => "ARPMan",
            Technique::ARPSim1 => "ARPSim1",
            Technique::ARPSim2 => "ARPSim2",
            Technique::FW => "FW",
            Technique::Stoop => "Stoop",
            Technique::PC => "PC",
            Technique::SDh => "SDh",
            Technique::SDe => "SDe",
            Technique::SDm => "SDm",
            Technique::ST => "ST",
            Technique::SA => "SA",
        }
    }

    /// Position in [`Technique::ALL`].
    pub fn index(self) -> usize {
        Technique::ALL
            .iter()
            .position(|t| *t == self)
            .expect("registry covers every variant")
    }

    /// Whether [`Prioritizer::run`] requires a fault report for this
    /// technique.
    pub fn needs_faults(self) -> bool {
        self == Technique::Opt
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Technique::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::UnknownTechnique(s.to_string()))
    }
}

/// A technique's output: a permutation of the suite's test ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PrioritizedOrder {
    pub suite_name: String,
    pub technique: Technique,
    pub seed: u64,
    pub order: Vec<String>,
}

impl PrioritizedOrder {
    /// The order must be a permutation of the suite's ids.
    pub fn validate_against(&self, suite: &TestSuite) -> Result<()> {
        if self.order.len() != suite.len() {
            return Err(Error::BadOrder(format!(
                "order has {} ids, suite has {}",
                self.order.len(),
                suite.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &self.order {
            if suite.get(id).is_none() {
                return Err(Error::BadOrder(format!("id `{id}` is not in the suite")));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::BadOrder(format!("id `{id}` appears twice")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("order serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The ids, one per line: the exchange format for order files.
    pub fn id_lines(&self) -> String {
        let mut out = String::new();
        for id in &self.order {
            out.push_str(id);
            out.push('\n');
        }
        out
    }
}

/// Runs techniques against one suite, caching shared work between runs.
///
/// Matrices and scores depend only on the suite (and model), so a single
/// `Prioritizer` amortizes them across any number of technique/seed pairs;
/// this is what keeps thousand-repetition experiments affordable.
pub struct Prioritizer<'a> {
    suite: &'a TestSuite,
    model: Option<&'a LtsModel>,
    faults: Option<&'a FaultReport>,
    sets: OnceLock<Vec<BTreeSet<&'a str>>>,
    set_matrices: [OnceLock<Vec<f64>>; 3],
    string_matrices: [OnceLock<Vec<f64>>; 3],
    fw: OnceLock<Vec<u64>>,
    stoop: OnceLock<Vec<f64>>,
    pc: OnceLock<Vec<u64>>,
}

impl<'a> Prioritizer<'a> {
    /// Wrap a non-empty, well-formed suite.
    pub fn new(suite: &'a TestSuite) -> Result<Self> {
        if suite.is_empty() {
            return Err(Error::EmptySuite);
        }
        suite.check()?;
        Ok(Prioritizer {
            suite,
            model: None,
            faults: None,
            sets: OnceLock::new(),
            set_matrices: [OnceLock::new(), OnceLock::new(), OnceLock::new()],
            string_matrices: [OnceLock::new(), OnceLock::new(), OnceLock::new()],
            fw: OnceLock::new(),
            stoop: OnceLock::new(),
            pc: OnceLock::new(),
        })
    }

    /// Attach the model the suite was generated from. `FW` then weights
    /// real transitions instead of falling back to suite-relative
    /// inference.
    pub fn with_model(mut self, model: &'a LtsModel) -> Self {
        self.model = Some(model);
        self
    }

    /// Attach a fault report, required by `Opt`.
    pub fn with_faults(mut self, faults: &'a FaultReport) -> Self {
        self.faults = Some(faults);
        self
    }

    pub fn suite(&self) -> &TestSuite {
        self.suite
    }

    /// Run one technique with one seed.
    pub fn run(&self, technique: Technique, seed: u64) -> Result<PrioritizedOrder> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks = match technique {
            Technique::Ran => self.shuffled(&mut rng),
            Technique::Opt => self.by_additional_faults(&mut rng)?,
            Technique::ARPJac => {
                self.adaptive_random(DistanceKind::Jaccard, true, &mut rng)
            }
            Technique::ARPMan => {
                self.adaptive_random(DistanceKind::Manhattan, true, &mut rng)
            }
            Technique::ARPSim1 => {
                self.adaptive_random(DistanceKind::SimilarityCm, true, &mut rng)
            }
            Technique::ARPSim2 => {
                self.adaptive_random(DistanceKind::SimilarityCm, false, &mut rng)
            }
            Technique::FW => {
                let w = self.transition_weights()?.to_vec();
                self.rank_descending(&w, &mut rng)
            }
            Technique::Stoop => self.rank_descending(self.stoop_scores(), &mut rng),
            Technique::PC => self.rank_descending(self.pc_scores(), &mut rng),
            Technique::ST => {
                let counts: Vec<usize> = self.sets().iter().map(BTreeSet::len).collect();
                self.rank_descending(&counts, &mut rng)
            }
            Technique::SA => self.by_additional_coverage(&mut rng),
            Technique::SDh => self.string_spread(StringMetric::Hamming, &mut rng),
            Technique::SDe => self.string_spread(StringMetric::Euclidean, &mut rng),
            Technique::SDm => self.string_spread(StringMetric::Manhattan, &mut rng),
        };
        debug_assert_eq!(picks.len(), self.suite.len());
        Ok(PrioritizedOrder {
            suite_name: self.suite.name.clone(),
            technique,
            seed,
            order: picks
                .into_iter()
                .map(|i| self.suite.test_cases[i].id.clone())
                .collect(),
        })
    }

    /// The ranking score behind a plain score sort (higher runs earlier),
    /// or `None` for techniques that are not score sorts. Useful for
    /// inspecting why an order came out the way it did and for detecting
    /// score ties.
    pub fn scores(&self, technique: Technique) -> Result<Option<Vec<(String, f64)>>> {
        let values: Vec<f64> = match technique {
            Technique::FW => self
                .transition_weights()?
                .iter()
                .map(|&w| w as f64)
                .collect(),
            Technique::Stoop => self.stoop_scores().to_vec(),
            Technique::PC => self.pc_scores().iter().map(|&c| c as f64).collect(),
            Technique::ST => self.sets().iter().map(|s| s.len() as f64).collect(),
            _ => return Ok(None),
        };
        Ok(Some(
            self.suite
                .test_cases
                .iter()
                .map(|tc| tc.id.clone())
                .zip(values)
                .collect(),
        ))
    }

    fn sets(&self) -> &[BTreeSet<&'a str>] {
        self.sets.get_or_init(|| distance::step_sets(self.suite))
    }

    fn set_matrix(&self, kind: DistanceKind) -> &[f64] {
        let slot = match kind {
            DistanceKind::Jaccard => &self.set_matrices[0],
            DistanceKind::Manhattan => &self.set_matrices[1],
            DistanceKind::SimilarityCm => &self.set_matrices[2],
        };
        slot.get_or_init(|| distance::set_matrix(self.suite, kind))
    }

    fn string_matrix(&self, metric: StringMetric) -> &[f64] {
        let slot = match metric {
            StringMetric::Hamming => &self.string_matrices[0],
            StringMetric::Euclidean => &self.string_matrices[1],
            StringMetric::Manhattan => &self.string_matrices[2],
        };
        slot.get_or_init(|| distance::string_matrix(self.suite, metric))
    }

    /// Uniform permutation of suite indices.
    fn shuffled(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.suite.len()).collect();
        idx.shuffle(rng);
        idx
    }

    /// Descending stable sort over pre-shuffled indices, so equal scores
    /// end up in uniformly random relative order.
    fn rank_descending<K: PartialOrd>(&self, scores: &[K], rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut idx = self.shuffled(rng);
        idx.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .expect("ranking scores are never NaN")
        });
        idx
    }

    /// Pick a uniformly random position among those tying for the best
    /// value in `scored`.
    fn argmax_uniform<I>(scored: I, rng: &mut ChaCha8Rng) -> usize
    where
        I: Iterator<Item = (usize, f64)>,
    {
        let mut best = Vec::new();
        let mut best_value = f64::NEG_INFINITY;
        for (pos, value) in scored {
            if value > best_value {
                best_value = value;
                best.clear();
                best.push(pos);
            } else if value == best_value {
                best.push(pos);
            }
        }
        debug_assert!(!best.is_empty());
        best[rng.random_range(0..best.len())]
    }

    fn adaptive_random(
        &self,
        kind: DistanceKind,
        max_min: bool,
        rng: &mut ChaCha8Rng,
    ) -> Vec<usize> {
        let matrix = self.set_matrix(kind);
        let n = self.suite.len();
        let mut remaining: Vec<usize> = (0..n).collect();
        let first = remaining.swap_remove(rng.random_range(0..n));
        let mut order = Vec::with_capacity(n);
        order.push(first);

        // g(c) aggregates the measure from c to the placed prefix; it only
        // ever tightens, so it is maintained incrementally instead of
        // being recomputed per candidate.
        let fold = |acc: f64, d: f64| if max_min { acc.min(d) } else { acc.max(d) };
        let mut g = vec![if max_min { f64::INFINITY } else { f64::NEG_INFINITY }; n];
        for &u in &remaining {
            g[u] = fold(g[u], matrix[u * n + first]);
        }

        while !remaining.is_empty() {
            let span = remaining.len();
            let candidates = rand::seq::index::sample(rng, span, span.min(10));
            let pos = Self::argmax_uniform(
                candidates.into_iter().map(|p| (p, g[remaining[p]])),
                rng,
            );
            let chosen = remaining.swap_remove(pos);
            order.push(chosen);
            for &u in &remaining {
                g[u] = fold(g[u], matrix[u * n + chosen]);
            }
        }
        order
    }

    fn string_spread(&self, metric: StringMetric, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let matrix = self.string_matrix(metric);
        let n = self.suite.len();

        // Start from the test farthest from everything combined.
        let summed = |i: usize| (0..n).map(|j| matrix[i * n + j]).sum::<f64>();
        let first = Self::argmax_uniform((0..n).map(|i| (i, summed(i))), rng);

        let mut remaining: Vec<usize> = (0..n).filter(|&i| i != first).collect();
        let mut order = Vec::with_capacity(n);
        order.push(first);
        let mut nearest = vec![f64::INFINITY; n];
        for &u in &remaining {
            nearest[u] = matrix[u * n + first];
        }
        while !remaining.is_empty() {
            let pos = Self::argmax_uniform(
                (0..remaining.len()).map(|p| (p, nearest[remaining[p]])),
                rng,
            );
            let chosen = remaining.swap_remove(pos);
            order.push(chosen);
            for &u in &remaining {
                nearest[u] = nearest[u].min(matrix[u * n + chosen]);
            }
        }
        order
    }

    fn by_additional_coverage(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let sets = self.sets();
        let n = self.suite.len();
        let mut covered: BTreeSet<&str> = BTreeSet::new();
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut order = Vec::with_capacity(n);
        while !remaining.is_empty() {
            let gains = |covered: &BTreeSet<&str>| -> Vec<usize> {
                remaining
                    .iter()
                    .map(|&i| sets[i].iter().filter(|s| !covered.contains(*s)).count())
                    .collect()
            };
            let mut gain = gains(&covered);
            if gain.iter().all(|&g| g == 0) {
                // Everything left is already covered: start a fresh pass.
                covered.clear();
                gain = gains(&covered);
            }
            let pos = Self::argmax_uniform(
                gain.iter().enumerate().map(|(p, &g)| (p, g as f64)),
                rng,
            );
            let chosen = remaining.swap_remove(pos);
            order.push(chosen);
            covered.extend(sets[chosen].iter().copied());
        }
        order
    }

    fn by_additional_faults(&self, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        let faults = self
            .faults
            .ok_or(Error::MissingInput("Opt", "a fault report"))?;
        faults.validate_against(self.suite)?;

        let index: BTreeMap<&str, usize> = self
            .suite
            .test_cases
            .iter()
            .enumerate()
            .map(|(i, tc)| (tc.id.as_str(), i))
            .collect();
        let n = self.suite.len();
        let mut revealed_by: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut revealed = Vec::new();
        for (fi, (_, tests)) in faults.iter().enumerate() {
            revealed.push(false);
            for t in tests {
                revealed_by[index[t.as_str()]].push(fi);
            }
        }

        let mut remaining: Vec<usize> = (0..n).collect();
        let mut order = Vec::with_capacity(n);
        while !remaining.is_empty() {
            let gain = |i: usize| revealed_by[i].iter().filter(|&&f| !revealed[f]).count();
            if remaining.iter().all(|&i| gain(i) == 0) {
                // No test left reveals anything new; the tail order is
                // irrelevant to fault detection, so randomize it.
                remaining.shuffle(rng);
                order.extend(remaining);
                break;
            }
            let pos = Self::argmax_uniform(
                remaining.iter().map(|&i| gain(i) as f64).enumerate(),
                rng,
            );
            let chosen = remaining.swap_remove(pos);
            for &f in &revealed_by[chosen] {
                revealed[f] = true;
            }
            order.push(chosen);
        }
        Ok(order)
    }

    /// Per-test fixed weights: with a model, each traversed transition
    /// counts 2 when it leaves a branch state or enters a join state and 1
    /// otherwise. Without a model the same idea is inferred from the suite:
    /// a step with more than one distinct successor step is branch-like,
    /// one with more than one distinct predecessor join-like, and each
    /// occurrence of such a step counts 2.
    fn transition_weights(&self) -> Result<&[u64]> {
        if let Some(w) = self.fw.get() {
            return Ok(w);
        }
        let weights = match self.model {
            Some(model) => {
                let profile = model.profile()?;
                let mut weights = Vec::with_capacity(self.suite.len());
                for tc in &self.suite.test_cases {
                    let trace = model.trace(&tc.steps).map_err(|e| match e {
                        Error::NotAPath(msg) => Error::NotAPath(format!("{}: {msg}", tc.id)),
                        other => other,
                    })?;
                    weights.push(
                        trace
                            .iter()
                            .map(|t| {
                                if profile.branch_states.contains(&t.source)
                                    || profile.join_states.contains(&t.target)
                                {
                                    2
                                } else {
                                    1
                                }
                            })
                            .sum(),
                    );
                }
                weights
            }
            None => {
                let (successors, predecessors) = self.step_adjacency();
                let wide = |map: &BTreeMap<&str, BTreeSet<&str>>, s: &str| {
                    map.get(s).is_some_and(|peers| peers.len() > 1)
                };
                self.suite
                    .test_cases
                    .iter()
                    .map(|tc| {
                        tc.steps
                            .iter()
                            .map(|s| {
                                if wide(&successors, s) || wide(&predecessors, s) {
                                    2
                                } else {
                                    1
                                }
                            })
                            .sum()
                    })
                    .collect()
            }
        };
        Ok(self.fw.get_or_init(|| weights))
    }

    /// Distinct immediate successor and predecessor steps, suite-wide.
    fn step_adjacency(
        &self,
    ) -> (
        BTreeMap<&'a str, BTreeSet<&'a str>>,
        BTreeMap<&'a str, BTreeSet<&'a str>>,
    ) {
        let mut successors: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        let mut predecessors: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for tc in &self.suite.test_cases {
            for pair in tc.steps.windows(2) {
                successors
                    .entry(pair[0].as_str())
                    .or_default()
                    .insert(pair[1].as_str());
                predecessors
                    .entry(pair[1].as_str())
                    .or_default()
                    .insert(pair[0].as_str());
            }
        }
        (successors, predecessors)
    }

    /// Averaged weight of path length: mean over a test's step occurrences
    /// of how many suite tests contain that step.
    fn stoop_scores(&self) -> &[f64] {
        self.stoop.get_or_init(|| {
            let sets = self.sets();
            let mut containing: BTreeMap<&str, u64> = BTreeMap::new();
            for set in sets {
                for &s in set {
                    *containing.entry(s).or_default() += 1;
                }
            }
            self.suite
                .test_cases
                .iter()
                .map(|tc| {
                    let total: u64 = tc.steps.iter().map(|s| containing[s.as_str()]).sum();
                    total as f64 / tc.size() as f64
                })
                .collect()
        })
    }

    /// Path complexity: test size plus, per step occurrence, the squared
    /// product of the step's suite-wide fan-in and fan-out.
    fn pc_scores(&self) -> &[u64] {
        self.pc.get_or_init(|| {
            let (successors, predecessors) = self.step_adjacency();
            let fan = |map: &BTreeMap<&str, BTreeSet<&str>>, s: &str| {
                map.get(s).map_or(0, |peers| peers.len() as u64)
            };
            let mut flow: BTreeMap<&str, u64> = BTreeMap::new();
            for tc in &self.suite.test_cases {
                for s in &tc.steps {
                    flow.entry(s.as_str()).or_insert_with(|| {
                        let product = fan(&predecessors, s) * fan(&successors, s);
                        product * product
                    });
                }
            }
            self.suite
                .test_cases
                .iter()
                .map(|tc| {
                    tc.size() as u64
                        + tc.steps.iter().map(|s| flow[s.as_str()]).sum::<u64>()
                })
                .collect()
        })
    }
}
