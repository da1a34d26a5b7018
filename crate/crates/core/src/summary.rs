//! Histograms, quantiles and distribution comparisons for chain output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::sampler::ChainOutput;

pub const DEFAULT_QUANTILES: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    /// Inclusive lower edge.
    pub lower: f64,
    /// Exclusive upper edge.
    pub upper: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub field: String,
    pub count: usize,
    pub mean: f64,
    /// `(probability, value)` pairs.
    pub quantiles: Vec<(f64, f64)>,
    pub bins: Vec<Bin>,
}

impl Summary {
    /// Bin counts keyed by lower edge.
    pub fn counts(&self) -> BTreeMap<i64, u64> {
        self.bins.iter().map(|b| (b.lower as i64, b.count)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lower,upper,count\n");
        for b in &self.bins {
            s.push_str(&format!("{},{},{}\n", b.lower, b.upper, b.count));
        }
        s
    }
}

/// Inverse empirical CDF: the smallest sample whose rank reaches `⌈q·n⌉`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Histogram and quantiles of one recorded field.
///
/// Bins start at multiples of `bin_width`; `None` gives one bin per distinct
/// value. Only occupied bins are listed.
pub fn summarize(output: &ChainOutput, field: &str, bin_width: Option<f64>) -> Result<Summary> {
    summarize_values(field, output.field(field)?, bin_width)
}

pub fn summarize_values(field: &str, values: &[f64], bin_width: Option<f64>) -> Result<Summary> {
    if let Some(w) = bin_width {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Config(format!("bin width must be positive (got {w})")));
        }
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut bins: Vec<Bin> = Vec::new();
    for &v in &sorted {
        let (lower, upper) = match bin_width {
            Some(w) => {
                let l = (v / w).floor() * w;
                (l, l + w)
            }
            None => (v, v),
        };
        match bins.last_mut() {
            Some(b) if b.lower == lower => b.count += 1,
            _ => bins.push(Bin { lower, upper, count: 1 }),
        }
    }
    let mean = if values.is_empty() { f64::NAN } else { values.iter().sum::<f64>() / values.len() as f64 };
    Ok(Summary {
        field: field.to_string(),
        count: values.len(),
        mean,
        quantiles: DEFAULT_QUANTILES.iter().map(|&q| (q, quantile(&sorted, q))).collect(),
        bins,
    })
}

/// Counts of integer-valued samples grouped into bins of `width` starting at
/// multiples of `width`.
pub fn binned_counts(values: &[f64], width: i64) -> BTreeMap<i64, u64> {
    let mut out = BTreeMap::new();
    for &v in values {
        *out.entry((v as i64).div_euclid(width) * width).or_insert(0) += 1;
    }
    out
}

/// Total variation distance between two count histograms, each normalized
/// to a probability distribution.
pub fn total_variation<K: Ord>(p: &BTreeMap<K, u64>, q: &BTreeMap<K, u64>) -> f64 {
    let sp = p.values().sum::<u64>() as f64;
    let sq = q.values().sum::<u64>() as f64;
    let mut tv = 0.0;
    for (k, &c) in p {
        let b = q.get(k).copied().unwrap_or(0) as f64 / sq;
        tv += (c as f64 / sp - b).abs();
    }
    for (k, &c) in q {
        if !p.contains_key(k) {
            tv += c as f64 / sq;
        }
    }
    tv / 2.0
}

/// Pearson goodness-of-fit of `observed` against `expected` probabilities.
/// Returns the statistic and its upper-tail p-value.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::Dimension { expected: expected.len().max(2), found: observed.len() });
    }
    let n = observed.iter().sum::<u64>() as f64;
    let total_p: f64 = expected.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = n * p / total_p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).map_err(|e| Error::Config(e.to_string()))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}

/// Lag-`k` autocorrelation of a series.
pub fn autocorrelation(values: &[f64], lag: usize) -> f64 {
    let n = values.len();
    if lag >= n {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let cov: f64 = (0..n - lag).map(|i| (values[i] - mean) * (values[i + lag] - mean)).sum();
    cov / var
}
