//! APFD, the A12 effect size, the Kruskal-Wallis test, and small
//! descriptive summaries.
//!
//! Everything here is deterministic arithmetic over already-collected
//! numbers; randomness and ordering policy live elsewhere.

use std::collections::BTreeMap;
use std::fmt;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::faults::FaultReport;

/// Average percentage of faults detected by an execution order.
#[derive(Debug, Clone, PartialEq)]
pub struct Apfd {
    /// The APFD value, in (0, 1].
    pub value: f64,
    /// Number of tests in the order.
    pub tests: usize,
    /// Number of faults revealed by at least one test of the order.
    pub revealed: usize,
    /// Faults with no revealing test in the order, left out of the average.
    pub excluded: Vec<String>,
    /// 1-based position at which each counted fault is first revealed.
    pub first_reveal: BTreeMap<String, usize>,
}

/// APFD of `order` against `faults`.
///
/// With n tests, m revealed faults and TFi the 1-based position of the
/// first test revealing fault i, the value is
/// `1 - (TF1 + ... + TFm) / (n * m) + 1 / (2n)`.
///
/// Faults whose revealing tests all fall outside the order are excluded
/// from m; if that excludes every fault the computation is an error, since
/// the average would be over nothing.
pub fn apfd(order: &[String], faults: &FaultReport) -> Result<Apfd> {
    if order.is_empty() {
        return Err(Error::BadOrder("order is empty".into()));
    }
    let mut position = BTreeMap::new();
    for (i, id) in order.iter().enumerate() {
        if position.insert(id.as_str(), i + 1).is_some() {
            return Err(Error::BadOrder(format!("test `{id}` appears twice")));
        }
    }

    let mut first_reveal = BTreeMap::new();
    let mut excluded = Vec::new();
    for (fault, tests) in faults.iter() {
        let first = tests.iter().filter_map(|t| position.get(t.as_str())).min();
        match first {
            Some(&pos) => {
                first_reveal.insert(fault.to_string(), pos);
            }
            None => excluded.push(fault.to_string()),
        }
    }
    if first_reveal.is_empty() {
        return Err(Error::NoRevealableFault);
    }

    let n = order.len() as f64;
    let m = first_reveal.len() as f64;
    let tf_sum: usize = first_reveal.values().sum();
    let value = 1.0 - tf_sum as f64 / (n * m) + 1.0 / (2.0 * n);
    Ok(Apfd {
        value,
        tests: order.len(),
        revealed: first_reveal.len(),
        excluded,
        first_reveal,
    })
}

/// Magnitude bucket for an A12 value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EffectCategory {
    Small,
    Medium,
    Large,
}

impl EffectCategory {
    pub fn name(self) -> &'static str {
        match self {
            EffectCategory::Small => "Small",
            EffectCategory::Medium => "Medium",
            EffectCategory::Large => "Large",
        }
    }
}

impl fmt::Display for EffectCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Vargha-Delaney effect size between two samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A12 {
    /// Probability that a value from the first sample beats one from the
    /// second, counting ties as half.
    pub value: f64,
    pub category: EffectCategory,
}

/// A12 of `s1` versus `s2`: `(#{x > y} + 0.5 * #{x = y}) / (n1 * n2)` over
/// all pairs.
///
/// Values past 0.71 on either side of 0.5 are Large, past 0.64 Medium,
/// anything nearer is Small; the thresholds themselves are not past.
pub fn a12(s1: &[f64], s2: &[f64]) -> Result<A12> {
    if s1.is_empty() {
        return Err(Error::EmptySample("first a12 sample"));
    }
    if s2.is_empty() {
        return Err(Error::EmptySample("second a12 sample"));
    }
    if s1.iter().chain(s2).any(|v| v.is_nan()) {
        return Err(Error::NanSample("a12"));
    }
    let mut score = 0.0;
    for &x in s1 {
        for &y in s2 {
            if x > y {
                score += 1.0;
            } else if x == y {
                score += 0.5;
            }
        }
    }
    let value = score / (s1.len() as f64 * s2.len() as f64);
    Ok(A12 { value, category: categorize(value) })
}

fn categorize(value: f64) -> EffectCategory {
    if value > 0.71 || value < 0.29 {
        EffectCategory::Large
    } else if value > 0.64 || value < 0.36 {
        EffectCategory::Medium
    } else {
        EffectCategory::Small
    }
}

/// Kruskal-Wallis H test over k independent groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KruskalWallis {
    pub h: f64,
    /// Degrees of freedom, k - 1.
    pub df: usize,
    /// Upper tail of the chi-square approximation.
    pub p_value: f64,
}

/// Rank all observations together (ties get the mean of the ranks they
/// span), compute H from per-group rank sums, divide by the tie
/// correction, and read the p-value off a chi-square with k - 1 degrees
/// of freedom. When every observation is identical the correction is zero
/// and H is taken as 0.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::BadGroups(format!(
            "need at least two groups, got {}",
            groups.len()
        )));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(Error::BadGroups(format!("group {i} is empty")));
        }
        if g.iter().any(|v| v.is_nan()) {
            return Err(Error::NanSample("kruskal-wallis"));
        }
    }

    let mut pooled: Vec<(f64, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, xs)| xs.iter().map(move |&x| (x, g)))
        .collect();
    pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("NaN ruled out"));
    let n = pooled.len();

    let mut rank_sum = vec![0.0; groups.len()];
    let mut tie_sum = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // Ranks i+1..=j share one value; each gets their mean.
        let rank = (i + 1 + j) as f64 / 2.0;
        let t = (j - i) as f64;
        tie_sum += t * t * t - t;
        for k in i..j {
            rank_sum[pooled[k].1] += rank;
        }
        i = j;
    }

    let nf = n as f64;
    let mut h = groups
        .iter()
        .zip(&rank_sum)
        .map(|(g, &r)| r * r / g.len() as f64)
        .sum::<f64>()
        * 12.0
        / (nf * (nf + 1.0))
        - 3.0 * (nf + 1.0);
    let correction = 1.0 - tie_sum / (nf * nf * nf - nf);
    if correction == 0.0 {
        h = 0.0;
    } else {
        h = (h / correction).max(0.0);
    }

    let df = groups.len() - 1;
    let p_value = chi_square_sf(h, df);
    Ok(KruskalWallis { h, df, p_value })
}

fn chi_square_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df is at least 1");
    dist.sf(x).clamp(0.0, 1.0)
}

/// Five-number summary plus mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Summarize a sample; quartiles interpolate linearly between order
/// statistics (the same convention spreadsheet PERCENTILE and numpy's
/// default use).
pub fn summarize(xs: &[f64]) -> Result<Summary> {
    if xs.is_empty() {
        return Err(Error::EmptySample("summary"));
    }
    if xs.iter().any(|v| v.is_nan()) {
        return Err(Error::NanSample("summary"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN ruled out"));
    let quantile = |p: f64| -> f64 {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if frac == 0.0 {
            sorted[lo]
        } else {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        }
    };
    Ok(Summary {
        count: xs.len(),
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[sorted.len() - 1],
        mean: xs.iter().sum::<f64>() / xs.len() as f64,
    })
}
