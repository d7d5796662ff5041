//! Labeled transition systems: the behavior models test cases are drawn from.
//!
//! A model is a set of states, a set of labeled transitions, and an initial
//! state. Labels carry a prefix naming their kind: `"S - "` for user steps,
//! `"R - "` for system responses, `"C - "` for conditions. Unknown prefixes
//! are reported as validation warnings rather than errors so models produced
//! elsewhere can still be processed.
//!
//! Two interchangeable on-disk forms are supported: a line-oriented text
//! format (see [`LtsModel::parse_text`]) and a JSON document with `initial`,
//! `states`, and `transitions` fields.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One labeled edge between two states.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub source: String,
    pub label: String,
    pub target: String,
}

impl Transition {
    pub fn new(
        source: impl Into<String>,
        label: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        Transition {
            source: source.into(),
            label: label.into(),
            target: target.into(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : {}", self.source, self.target, self.label)
    }
}

/// Kind of a transition label, read off its prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    UserStep,
    SystemResponse,
    Condition,
}

impl LabelKind {
    /// Classify a label by prefix; `None` when the prefix is not recognized.
    pub fn of(label: &str) -> Option<LabelKind> {
        if label.starts_with("S - ") {
            Some(LabelKind::UserStep)
        } else if label.starts_with("R - ") {
            Some(LabelKind::SystemResponse)
        } else if label.starts_with("C - ") {
            Some(LabelKind::Condition)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

/// Outcome of [`LtsModel::validate`]. Empty iff the model satisfies every
/// structural invariant and every label carries a recognized prefix.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when a structural invariant is broken. Prefix warnings alone do
    /// not count; operations downstream accept models that only warn.
    pub fn has_errors(&self) -> bool {
        self.violations
            .iter()
            .any(|v| v.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    fn error(&mut self, message: String) {
        self.violations.push(Violation {
            severity: Severity::Error,
            message,
        });
    }

    fn warning(&mut self, message: String) {
        self.violations.push(Violation {
            severity: Severity::Warning,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            let tag = match v.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "  {tag}: {}", v.message)?;
        }
        Ok(())
    }
}

/// Structural summary of a model: where it branches, where flows merge,
/// which transitions close loops, and how deep it runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralProfile {
    /// States with more than one outgoing transition.
    pub branch_states: BTreeSet<String>,
    /// States with more than one incoming transition.
    pub join_states: BTreeSet<String>,
    /// Back-edges of a depth-first traversal from the initial state with
    /// children visited in lexicographic (label, target) order. Removing
    /// them leaves the model acyclic.
    pub loop_transitions: BTreeSet<Transition>,
    /// Transition count of the longest acyclic path from the initial state.
    pub max_depth: u32,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    initial: String,
    states: Vec<String>,
    transitions: Vec<Transition>,
}

/// A labeled transition system.
///
/// The label set is derived from the transitions at construction time, so
/// `labels()` always reflects exactly the labels in use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LtsModel {
    initial: String,
    states: BTreeSet<String>,
    transitions: BTreeSet<Transition>,
    labels: BTreeSet<String>,
}

impl LtsModel {
    /// Build a model from raw parts. No validation happens here; call
    /// [`LtsModel::validate`] to check the result. States named only by
    /// transitions are *not* added implicitly, so dangling endpoints are
    /// representable (and reported by validation).
    pub fn from_parts(
        initial: impl Into<String>,
        states: impl IntoIterator<Item = String>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Self {
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        let labels = transitions.iter().map(|t| t.label.clone()).collect();
        LtsModel {
            initial: initial.into(),
            states: states.into_iter().collect(),
            transitions,
            labels,
        }
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn states(&self) -> &BTreeSet<String> {
        &self.states
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn labels(&self) -> &BTreeSet<String> {
        &self.labels
    }

    /// Outgoing transitions per state, each list sorted by (label, target).
    /// The sort order is what makes traversal-based operations deterministic.
    pub(crate) fn adjacency(&self) -> BTreeMap<&str, Vec<&Transition>> {
        let mut adj: BTreeMap<&str, Vec<&Transition>> = BTreeMap::new();
        for s in &self.states {
            adj.entry(s.as_str()).or_default();
        }
        // BTreeSet<Transition> iterates sorted by (source, label, target),
        // so each per-source list comes out sorted by (label, target).
        for t in &self.transitions {
            adj.entry(t.source.as_str()).or_default().push(t);
        }
        adj
    }

    fn reachable(&self) -> BTreeSet<&str> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut queue: VecDeque<&str> = VecDeque::new();
        if self.states.contains(&self.initial) {
            seen.insert(self.initial.as_str());
            queue.push_back(self.initial.as_str());
        }
        while let Some(u) = queue.pop_front() {
            for t in adj.get(u).into_iter().flatten() {
                if self.states.contains(&t.target) && seen.insert(t.target.as_str()) {
                    queue.push_back(t.target.as_str());
                }
            }
        }
        seen
    }

    /// Check every structural invariant and the label prefix convention.
    ///
    /// Errors: initial state missing from the state set, transition endpoints
    /// outside the state set, states unreachable from the initial state.
    /// Warnings: labels without a recognized `"S - "`/`"R - "`/`"C - "` prefix.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if !self.states.contains(&self.initial) {
            report.error(format!(
                "initial state `{}` is not in the state set",
                self.initial
            ));
        }
        for t in &self.transitions {
            if !self.states.contains(&t.source) {
                report.error(format!("transition `{t}` has dangling source `{}`", t.source));
            }
            if !self.states.contains(&t.target) {
                report.error(format!("transition `{t}` has dangling target `{}`", t.target));
            }
        }
        let reachable = self.reachable();
        for s in &self.states {
            if !reachable.contains(s.as_str()) {
                report.error(format!("state `{s}` is unreachable from the initial state"));
            }
        }
        for label in &self.labels {
            if LabelKind::of(label).is_none() {
                report.warning(format!(
                    "label `{label}` has no recognized prefix (expected `S - `, `R - `, or `C - `)"
                ));
            }
        }
        report
    }

    /// Compute the structural profile. Rejects models whose validation
    /// report contains errors (warnings are fine).
    pub fn profile(&self) -> Result<StructuralProfile> {
        let report = self.validate();
        if report.has_errors() {
            return Err(Error::InvalidModel(report));
        }

        let mut out_degree: BTreeMap<&str, usize> = BTreeMap::new();
        let mut in_degree: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &self.transitions {
            *out_degree.entry(t.source.as_str()).or_default() += 1;
            *in_degree.entry(t.target.as_str()).or_default() += 1;
        }
        let branch_states = out_degree
            .iter()
            .filter(|(_, d)| **d > 1)
            .map(|(s, _)| s.to_string())
            .collect();
        let join_states = in_degree
            .iter()
            .filter(|(_, d)| **d > 1)
            .map(|(s, _)| s.to_string())
            .collect();

        Ok(StructuralProfile {
            branch_states,
            join_states,
            loop_transitions: self.back_edges(),
            max_depth: self.longest_acyclic_path(),
        })
    }

    /// Back-edges of an iterative DFS from the initial state, children in
    /// (label, target) order.
    fn back_edges(&self) -> BTreeSet<Transition> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        let adj = self.adjacency();
        let mut color: HashMap<&str, Color> =
            self.states.iter().map(|s| (s.as_str(), Color::White)).collect();
        let mut loops = BTreeSet::new();

        // (state, next child index) frames; a state is grey while on the stack.
        let mut stack: Vec<(&str, usize)> = Vec::new();
        color.insert(self.initial.as_str(), Color::Grey);
        stack.push((self.initial.as_str(), 0));
        while let Some((u, i)) = stack.last_mut() {
            let edges = adj.get(*u).map(|v| v.as_slice()).unwrap_or(&[]);
            if *i < edges.len() {
                let t = edges[*i];
                *i += 1;
                match color.get(t.target.as_str()) {
                    Some(Color::Grey) => {
                        loops.insert(t.clone());
                    }
                    Some(Color::White) => {
                        color.insert(t.target.as_str(), Color::Grey);
                        stack.push((t.target.as_str(), 0));
                    }
                    _ => {}
                }
            } else {
                color.insert(u, Color::Black);
                stack.pop();
            }
        }
        loops
    }

    /// Length of the longest simple path from the initial state, by
    /// exhaustive backtracking search. Exponential in the worst case but
    /// cheap on the sparse models this crate works with.
    fn longest_acyclic_path(&self) -> u32 {
        let adj = self.adjacency();
        fn go(
            u: &str,
            depth: u32,
            adj: &BTreeMap<&str, Vec<&Transition>>,
            visited: &mut BTreeSet<String>,
            best: &mut u32,
        ) {
            *best = (*best).max(depth);
            for t in adj.get(u).into_iter().flatten() {
                if !visited.contains(&t.target) {
                    visited.insert(t.target.clone());
                    go(&t.target, depth + 1, adj, visited, best);
                    visited.remove(&t.target);
                }
            }
        }
        let mut best = 0;
        let mut visited = BTreeSet::new();
        visited.insert(self.initial.clone());
        go(&self.initial, 0, &adj, &mut visited, &mut best);
        best
    }

    /// Replay a step sequence from the initial state, returning the
    /// transitions taken. Fails when a step has no matching outgoing
    /// transition or more than one (ambiguous labels make the walk
    /// ill-defined).
    pub fn trace(&self, steps: &[String]) -> Result<Vec<&Transition>> {
        let adj = self.adjacency();
        let mut at = self.initial.as_str();
        let mut taken = Vec::with_capacity(steps.len());
        for (i, step) in steps.iter().enumerate() {
            let matches: Vec<&&Transition> = adj
                .get(at)
                .into_iter()
                .flatten()
                .filter(|t| &t.label == step)
                .collect();
            match matches.len() {
                0 => {
                    return Err(Error::NotAPath(format!(
                        "no transition labeled `{step}` out of state `{at}` (step {})",
                        i + 1
                    )))
                }
                1 => {
                    taken.push(*matches[0]);
                    at = matches[0].target.as_str();
                }
                _ => {
                    return Err(Error::NotAPath(format!(
                        "label `{step}` out of state `{at}` is ambiguous (step {})",
                        i + 1
                    )))
                }
            }
        }
        Ok(taken)
    }

    /// Parse the line-oriented text format:
    ///
    /// ```text
    /// # comment
    /// initial: s0
    /// s0 -> s1 : S - Fill the login field
    /// ```
    ///
    /// Blank lines and `#` comments are ignored; surrounding whitespace is
    /// trimmed. The state set is the union of the initial state and every
    /// transition endpoint.
    pub fn parse_text(input: &str) -> Result<LtsModel> {
        let mut initial: Option<String> = None;
        let mut transitions: Vec<Transition> = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if initial.is_none() {
                let Some(rest) = line.strip_prefix("initial:") else {
                    return Err(Error::Parse(format!(
                        "line {}: expected `initial: <state>` before any transition",
                        lineno + 1
                    )));
                };
                let id = rest.trim();
                if id.is_empty() {
                    return Err(Error::Parse(format!(
                        "line {}: empty initial state id",
                        lineno + 1
                    )));
                }
                initial = Some(id.to_string());
                continue;
            }
            let Some((source, rest)) = line.split_once("->") else {
                return Err(Error::Parse(format!(
                    "line {}: expected `<source> -> <target> : <label>`, got `{line}`",
                    lineno + 1
                )));
            };
            let Some((target, label)) = rest.split_once(':') else {
                return Err(Error::Parse(format!(
                    "line {}: missing `:` between target and label in `{line}`",
                    lineno + 1
                )));
            };
            let (source, target, label) = (source.trim(), target.trim(), label.trim());
            if source.is_empty() || target.is_empty() || label.is_empty() {
                return Err(Error::Parse(format!(
                    "line {}: empty source, target, or label in `{line}`",
                    lineno + 1
                )));
            }
            transitions.push(Transition::new(source, label, target));
        }
        let Some(initial) = initial else {
            return Err(Error::Parse("missing `initial:` line".into()));
        };
        let mut states: BTreeSet<String> = BTreeSet::new();
        states.insert(initial.clone());
        for t in &transitions {
            states.insert(t.source.clone());
            states.insert(t.target.clone());
        }
        Ok(LtsModel::from_parts(initial, states, transitions))
    }

    /// Serialize to the text format. Transitions are written in sorted
    /// (source, label, target) order so output is canonical.
    pub fn to_text(&self) -> String {
        let mut out = format!("initial: {}\n", self.initial);
        for t in &self.transitions {
            out.push_str(&format!("{} -> {} : {}\n", t.source, t.target, t.label));
        }
        out
    }

    /// Serialize to the JSON document form (`initial`, `states`, `transitions`).
    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            initial: self.initial.clone(),
            states: self.states.iter().cloned().collect(),
            transitions: self.transitions.iter().cloned().collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("model serialization cannot fail");
        s.push('\n');
        s
    }

    /// Parse the JSON document form.
    pub fn from_json(input: &str) -> Result<LtsModel> {
        let doc: ModelDoc = serde_json::from_str(input)?;
        Ok(LtsModel::from_parts(doc.initial, doc.states, doc.transitions))
    }
}
