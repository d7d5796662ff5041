//! Run a small seeded experiment in process: synthesized models, planted
//! failures, every technique, then the derived analysis tables.

use testprio::experiment::{analyze, run, Design, ExperimentConfig};
use testprio::faults::FailureProfile;
use testprio::prioritize::Technique;
use testprio::synth::SynthConfig;

fn main() {
    let config = ExperimentConfig {
        design: Design::Original,
        techniques: Technique::ALL.to_vec(),
        repetitions: 20,
        base_seed: 1,
        loop_bound: 2,
        models: 3,
        synth: Some(SynthConfig {
            branches: 2,
            joins: 1,
            loops: 0,
            max_depth: 14,
            seed: 60,
        }),
        profiles: vec![FailureProfile::LongTC, FailureProfile::ShortTC],
        objects: Vec::new(),
    };

    let result = run(&config).expect("experiment runs");
    for w in &result.warnings {
        println!("warning: {w}");
    }
    println!("{} rows; the first three:", result.rows.len());
    for row in &result.rows[..3] {
        println!(
            "  {} {} {} rep {} apfd {:.4}",
            row.object,
            row.group,
            row.technique.id(),
            row.repetition,
            row.apfd
        );
    }

    let bundle = analyze(&result).expect("analysis runs");
    if let Some(kw) = bundle.kruskal {
        println!("\nomnibus: H {:.2}, df {}, p {:.2e}", kw.h, kw.df, kw.p_value);
    }
    println!("\nshort vs long failing tests, per technique:");
    for row in &bundle.short_long {
        match &row.effect {
            Some(e) => println!(
                "  {:8} a12 {:.4} ({})",
                row.technique.id(),
                e.value,
                e.category.name()
            ),
            None => println!("  {:8} no rows in one group", row.technique.id()),
        }
    }
}
