//! Enumerate the bounded-path suite of the login model at three loop
//! bounds and print per-test structural metrics for the default bound.

use testprio::lts::LtsModel;
use testprio::testgen::{generate, metrics};

fn main() {
    let model = LtsModel::parse_text(include_str!("../fixtures/login.lts"))
        .expect("fixture parses");

    for bound in 1..=3 {
        let suite = generate(&model, bound).expect("generation succeeds");
        println!("loop bound {bound}: {} test cases", suite.len());
    }

    let suite = generate(&model, 2).expect("generation succeeds");
    println!("\nbound 2, per test:");
    for m in metrics(&suite, &model).expect("metrics cover the suite") {
        println!(
            "  {:4} size {:2}  branches {}  joins {}  loop traversals {}  essential {}",
            m.id, m.size, m.branch_count, m.join_count, m.loop_traversals, m.essential
        );
    }

    let tc1 = suite.get("TC1").expect("TC1 exists");
    println!("\nTC1, step by step:");
    for step in &tc1.steps {
        println!("  {step}");
    }
}
