//! Test case prioritization for model-based suites.
//!
//! The crate covers the full pipeline:
//!
//! 1. [`lts`]: labeled transition system models, validation, structural
//!    profiles, and two on-disk formats.
//! 2. [`testgen`]: bounded depth-first path generation (all-n-loop-paths
//!    with a per-state visit bound) and per-test structural metrics.
//! 3. [`synth`]: seeded random model synthesis with exact branch/join/loop
//!    quotas.
//! 4. [`prioritize`]: fourteen prioritization techniques behind one
//!    dispatcher, from random through adaptive random, weight-, complexity-,
//!    and string-distance-based, to coverage greedy and fault-aware optimal.
//! 5. [`faults`]: single-fault injection by failure profile and suite
//!    classification against a fault report.
//! 6. [`stats`]: APFD, the Vargha-Delaney A12 effect size, and the
//!    Kruskal-Wallis H test.
//! 7. [`experiment`]: seeded, reproducible experiment designs producing
//!    CSV results and analysis bundles.
//! 8. [`cli`]: the `testprio` command line.
//!
//! Everything that draws randomness takes an explicit `u64` seed and is
//! deterministic given it. Runnable walkthroughs live in `examples/`.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod faults;
pub mod lts;
pub mod prioritize;
pub mod stats;
pub mod synth;
pub mod testgen;

pub use error::{Error, Result};
pub use experiment::{AnalysisBundle, ExperimentConfig, ExperimentResult};
pub use faults::{FailureProfile, FaultReport, SuiteSizeClass};
pub use lts::{LtsModel, StructuralProfile, Transition};
pub use prioritize::{PrioritizedOrder, Prioritizer, Technique};
pub use stats::{A12, Apfd, EffectCategory, KruskalWallis};
pub use synth::SynthConfig;
pub use testgen::{TestCase, TestCaseMetrics, TestSuite};
