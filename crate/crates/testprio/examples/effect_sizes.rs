//! Compare APFD samples with the A12 effect size and the Kruskal-Wallis
//! omnibus test.

use testprio::stats::{a12, kruskal_wallis, summarize};

fn main() {
    let strong: Vec<f64> = (0..30).map(|i| 0.80 + (i % 5) as f64 * 0.01).collect();
    let weak: Vec<f64> = (0..30).map(|i| 0.55 + (i % 7) as f64 * 0.02).collect();
    let noisy: Vec<f64> = (0..30).map(|i| 0.40 + (i % 13) as f64 * 0.04).collect();

    let effect = a12(&strong, &weak).expect("non-empty samples");
    println!(
        "strong vs weak:  a12 {:.4} ({}), beats it {:.0}% of the time",
        effect.value,
        effect.category.name(),
        effect.value * 100.0
    );
    let effect = a12(&weak, &noisy).expect("non-empty samples");
    println!(
        "weak vs noisy:   a12 {:.4} ({})",
        effect.value,
        effect.category.name()
    );
    let effect = a12(&weak, &weak).expect("non-empty samples");
    println!(
        "weak vs itself:  a12 {:.4} ({})",
        effect.value,
        effect.category.name()
    );

    let kw = kruskal_wallis(&[strong.clone(), weak, noisy]).expect("three groups");
    println!("\nomnibus: H {:.2}, df {}, p {:.2e}", kw.h, kw.df, kw.p_value);

    let s = summarize(&strong).expect("non-empty sample");
    println!(
        "\nstrong sample: n {}, min {:.2}, median {:.2}, mean {:.3}, max {:.2}",
        s.count, s.min, s.median, s.mean, s.max
    );
}
