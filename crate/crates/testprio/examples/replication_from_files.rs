//! Run the replication design over suite and fault files on disk, the way
//! recorded test runs from elsewhere would come in.

use std::fs;

use testprio::experiment::{run, ExperimentConfig, ReplicationObject};
use testprio::faults::FaultReport;
use testprio::lts::LtsModel;
use testprio::testgen::generate;

fn main() {
    let dir = std::env::temp_dir().join("testprio-replication-example");
    fs::create_dir_all(&dir).expect("temp dir");

    // Stand-in for externally recorded objects: one generated suite and a
    // hand-written fault report per object.
    let model = LtsModel::parse_text(include_str!("../fixtures/login.lts"))
        .expect("fixture parses");
    let suite = generate(&model, 2).expect("generation succeeds");
    let mut objects = Vec::new();
    for (i, failing) in ["TC1", "TC3"].iter().enumerate() {
        let mut suite = suite.clone();
        suite.name = format!("login{i}");
        let suite_path = dir.join(format!("suite{i}.json"));
        let faults_path = dir.join(format!("faults{i}.csv"));
        fs::write(&suite_path, suite.to_json()).expect("write suite");
        let mut report = FaultReport::new();
        report.record("F1", *failing);
        report.write_csv(&faults_path).expect("write faults");
        objects.push(ReplicationObject { suite: suite_path, faults: faults_path });
    }

    let mut config = ExperimentConfig::replication(objects);
    config.repetitions = 25;
    config.base_seed = 4;

    let result = run(&config).expect("experiment runs");
    println!("{} rows", result.rows.len());

    // Group label comes from classifying each object's failing tests.
    let mut seen: Vec<(String, String)> = result
        .rows
        .iter()
        .map(|r| (r.object.clone(), r.group.clone()))
        .collect();
    seen.sort();
    seen.dedup();
    for (object, group) in seen {
        println!("  {object} grouped {group}");
    }

    let csv = result.to_csv_string();
    println!("\nresults CSV starts:\n{}", csv.lines().take(3).collect::<Vec<_>>().join("\n"));
}
