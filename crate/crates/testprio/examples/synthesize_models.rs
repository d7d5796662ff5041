//! Synthesize a batch of models with exact structural quotas and verify
//! each profile matches the request.

use testprio::synth::{synthesize_batch, SynthConfig};

fn main() {
    let config = SynthConfig {
        branches: 3,
        joins: 1,
        loops: 1,
        max_depth: 12,
        seed: 9,
    };
    let batch = synthesize_batch(&config, 4).expect("feasible quotas");

    for (i, model) in batch.models.iter().enumerate() {
        let p = model.profile().expect("synthesized models are valid");
        assert_eq!(p.branch_states.len() as u32, config.branches);
        assert_eq!(p.join_states.len() as u32, config.joins);
        assert_eq!(p.loop_transitions.len() as u32, config.loops);
        assert!(p.max_depth <= config.max_depth);
        println!(
            "model {i}: {} states, {} transitions, depth {}",
            model.states().len(),
            model.transitions().len(),
            p.max_depth
        );
    }
    for note in &batch.collisions {
        println!("note: {note}");
    }

    // Same seed, same batch.
    let again = synthesize_batch(&config, 4).expect("feasible quotas");
    assert_eq!(batch.models, again.models);
    println!("\nrerun with seed {} reproduced the batch", config.seed);

    println!("\nmodel 0 in text form:\n{}", batch.models[0].to_text());
}
