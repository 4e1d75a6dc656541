//! Multiple comparisons with the best, on per-series ranks.
//!
//! Each series ranks the methods (1 = lowest score, ties share the average
//! rank). A method's mean rank gets the interval
//! `mean ± c · sqrt(K (K + 1) / (12 N))`; two methods whose intervals do not
//! overlap differ significantly. The default `c` is half the upper quantile
//! of the studentized range for `K` groups and infinite degrees of freedom,
//! which makes non-overlap equivalent to the Nemenyi critical difference.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McbRank {
    pub method: String,
    pub mean_rank: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McbOptions {
    pub confidence: f64,
    /// Overrides the studentized-range based constant.
    pub critical_value: Option<f64>,
}

impl Default for McbOptions {
    fn default() -> Self {
        McbOptions {
            confidence: 0.95,
            critical_value: None,
        }
    }
}

/// Mean ranks and MCB intervals, in the order the methods are given.
pub fn mcb_ranks(scores: &[(String, Vec<f64>)], options: McbOptions) -> Result<Vec<McbRank>> {
    let k = scores.len();
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "methods",
            reason: format!("need at least 2 methods, got {k}"),
        });
    }
    let n = scores[0].1.len();
    if let Some((method, v)) = scores.iter().find(|(_, v)| v.len() != n) {
        return Err(Error::InvalidParameter {
            name: "scores",
            reason: format!("method `{method}` has {} scores, expected {n}", v.len()),
        });
    }
    if n < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: n,
        });
    }

    let mut rank_sums = vec![0.0; k];
    let mut row = Vec::with_capacity(k);
    for series in 0..n {
        row.clear();
        row.extend(scores.iter().map(|(_, v)| v[series]));
        for (method, r) in average_ranks(&row).into_iter().enumerate() {
            rank_sums[method] += r;
        }
    }

    let critical = options
        .critical_value
        .unwrap_or_else(|| studentized_range_quantile(options.confidence, k) / 2.0);
    let half_width = critical * ((k * (k + 1)) as f64 / (12.0 * n as f64)).sqrt();
    Ok(scores
        .iter()
        .zip(rank_sums)
        .map(|((method, _), sum)| {
            let mean_rank = sum / n as f64;
            McbRank {
                method: method.clone(),
                mean_rank,
                ci_lower: mean_rank - half_width,
                ci_upper: mean_rank + half_width,
            }
        })
        .collect())
}

/// 1-based ranks with ties sharing the average of the ranks they span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `P(range of k iid N(0,1) <= q) = k ∫ φ(z) [Φ(z + q) - Φ(z)]^(k-1) dz`.
fn studentized_range_cdf(q: f64, k: usize) -> f64 {
    const STEPS: usize = 4000;
    let (a, b) = (-9.0, 9.0);
    let step = (b - a) / STEPS as f64;
    let f = |z: f64| normal_pdf(z) * (normal_cdf(z + q) - normal_cdf(z)).powi(k as i32 - 1);
    let mut total = f(a) + f(b);
    for i in 1..STEPS {
        let z = a + i as f64 * step;
        total += if i % 2 == 1 { 4.0 } else { 2.0 } * f(z);
    }
    (k as f64 * total * step / 3.0).min(1.0)
}

/// Upper `confidence` quantile of the studentized range, infinite df.
pub fn studentized_range_quantile(confidence: f64, k: usize) -> f64 {
    let (mut lo, mut hi) = (0.0, 20.0);
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if studentized_range_cdf(mid, k) < confidence {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}
