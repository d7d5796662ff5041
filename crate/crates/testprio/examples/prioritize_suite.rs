//! Run all fourteen techniques over the login suite and print each order.
//! Opt consumes the fault report; everything else is fault-blind.

use testprio::faults::FaultReport;
use testprio::lts::LtsModel;
use testprio::prioritize::{Prioritizer, Technique};
use testprio::testgen::generate;

fn main() {
    let model = LtsModel::parse_text(include_str!("../fixtures/login.lts"))
        .expect("fixture parses");
    let suite = generate(&model, 2).expect("generation succeeds");
    let faults = FaultReport::from_csv_str(include_str!("../fixtures/login_tc1_fails.csv"))
        .expect("fixture parses");

    let prioritizer = Prioritizer::new(&suite)
        .expect("non-empty suite")
        .with_model(&model)
        .with_faults(&faults);

    for technique in Technique::ALL {
        let order = prioritizer.run(technique, 7).expect("technique runs");
        println!("{:8} {}", technique.id(), order.order.join(" "));
    }

    // The score-based rankers expose the numbers behind their orders.
    println!("\nFW scores:");
    let scores = Prioritizer::new(&suite)
        .expect("non-empty suite")
        .with_model(&model)
        .scores(Technique::FW)
        .expect("scoring runs")
        .expect("FW is score-based");
    for (id, score) in scores {
        println!("  {id:4} {score}");
    }
}
