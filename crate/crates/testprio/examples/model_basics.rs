//! Build a model twice (text format, then from parts), check they agree,
//! and print the structural profile.

use testprio::lts::{LtsModel, Transition};

fn main() {
    let parsed = LtsModel::parse_text(
        "# toggle with a retry loop\n\
         initial: s0\n\
         s0 -> s1 : S - press the switch\n\
         s1 -> s2 : R - light on\n\
         s1 -> s3 : R - nothing happens\n\
         s3 -> s1 : S - press the switch again\n\
         s2 -> s4 : C - done\n",
    )
    .expect("text parses");

    let built = LtsModel::from_parts(
        "s0",
        (0..=4).map(|i| format!("s{i}")),
        [
            Transition::new("s0", "S - press the switch", "s1"),
            Transition::new("s1", "R - light on", "s2"),
            Transition::new("s1", "R - nothing happens", "s3"),
            Transition::new("s3", "S - press the switch again", "s1"),
            Transition::new("s2", "C - done", "s4"),
        ],
    );
    assert_eq!(parsed, built);

    let report = built.validate();
    println!("validation clean: {}", report.is_empty());

    let profile = built.profile().expect("valid model");
    println!("branch states:    {:?}", profile.branch_states);
    println!("join states:      {:?}", profile.join_states);
    println!("loop transitions: {}", profile.loop_transitions.len());
    println!("max depth:        {}", profile.max_depth);

    println!("\ntext form:\n{}", built.to_text());
    println!("json form:\n{}", built.to_json());
}
