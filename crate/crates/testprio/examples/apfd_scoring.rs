//! Score two orderings of one suite against the same fault report: the
//! failing test placed first, then placed sixth.

use testprio::faults::FaultReport;
use testprio::stats::apfd;

fn main() {
    let mut faults = FaultReport::new();
    faults.record("F1", "TC1");

    let early: Vec<String> = ["TC1", "TC7", "TC4", "TC5", "TC6", "TC2", "TC3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let late: Vec<String> = ["TC2", "TC4", "TC6", "TC3", "TC5", "TC1", "TC7"]
        .iter()
        .map(|s| s.to_string())
        .collect();

    for (name, order) in [("failing test first", &early), ("failing test sixth", &late)] {
        let score = apfd(order, &faults).expect("order covers the report");
        println!(
            "{name}: APFD {:.6}, first reveal at {:?}",
            score.value, score.first_reveal
        );
    }

    // Faults no test reveals are excluded from the average, and reported.
    faults.record("F2", "TC99");
    let score = apfd(&early, &faults).expect("one fault still counts");
    println!(
        "with an unrevealable fault: APFD {:.6}, excluded {:?}",
        score.value, score.excluded
    );
}
