//! Small statistical helpers shared by the experiments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Binomial proportion with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

pub fn wilson(successes: u64, trials: u64) -> Proportion {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let ph = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (ph + z2 / (2.0 * n)) / denom;
    let half = Z95 * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Proportion {
        successes,
        trials,
        estimate: ph,
        lower: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
        upper: if successes == trials { 1.0 } else { (center + half).min(1.0) },
    }
}

/// Median of a nonempty sample; the mean of the two middle values for
/// even sizes.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Empirical law of integer outcomes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Histogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: u64) {
        *self.counts.entry(value).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// Normalized law as `(value, probability)` pairs.
    pub fn law(&self) -> BTreeMap<u64, f64> {
        self.counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / self.total as f64))
            .collect()
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: u64) -> f64 {
        let c: u64 = self.counts.range(..=x).map(|(_, &c)| c).sum();
        c as f64 / self.total as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }
}

impl FromIterator<u64> for Histogram {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut h = Histogram::new();
        for v in iter {
            h.add(v);
        }
        h
    }
}

/// Total-variation distance between two laws on the integers.
pub fn total_variation(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let keys: std::collections::BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(&k).unwrap_or(&0.0) - b.get(&k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert!(x.len() == y.len() && x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}
