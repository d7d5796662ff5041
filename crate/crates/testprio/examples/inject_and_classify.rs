//! Plant one failure per profile on the login suite, then read the class
//! back off the planted report.

use testprio::faults::{classify_suite, inject_failure, FailureProfile};
use testprio::lts::LtsModel;
use testprio::testgen::{generate, metrics};

fn main() {
    let model = LtsModel::parse_text(include_str!("../fixtures/login.lts"))
        .expect("fixture parses");
    let suite = generate(&model, 2).expect("generation succeeds");
    let metrics = metrics(&suite, &model).expect("metrics cover the suite");

    for profile in FailureProfile::ALL {
        match inject_failure(&suite, &metrics, profile, 5) {
            Ok(report) => {
                let failing: Vec<&str> = report.failing_tests().into_iter().collect();
                let class = classify_suite(&suite, &report).expect("report is non-empty");
                println!("{:9} plants on {failing:?}, classifies {class}", profile.name());
            }
            Err(e) => println!("{:9} {e}", profile.name()),
        }
    }
}
