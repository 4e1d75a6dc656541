#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use simforecast::dataio::CorpusRecord;
use simforecast::Frequency;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
enum Error {
    Additive,
    Multiplicative,
}

/// One series from a randomly parameterised exponential-smoothing state
/// space model: additive or multiplicative errors, none / linear / damped
/// trend, and a multiplicative seasonal pattern when `period > 1`.
pub fn ets_series(rng: &mut ChaCha8Rng, len: usize, period: usize) -> Vec<f64> {
    let error = if rng.random_bool(0.5) {
        Error::Additive
    } else {
        Error::Multiplicative
    };
    let mut level: f64 = rng.random_range(50.0..5000.0);
    let base = level;
    let mut trend = match rng.random_range(0..3) {
        0 => 0.0,
        _ => level * rng.random_range(-0.02..0.06),
    };
    let phi = if rng.random_bool(0.5) {
        1.0
    } else {
        rng.random_range(0.8..0.98)
    };
    let alpha = rng.random_range(0.1..0.8);
    let beta = rng.random_range(0.01..0.2) * alpha;
    let sigma = rng.random_range(0.01..0.08);
    let noise = Normal::new(0.0, sigma).unwrap();

    let amplitude = if period > 1 { rng.random_range(0.05..0.3) } else { 0.0 };
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let season: Vec<f64> = (0..period.max(1))
        .map(|j| {
            1.0 + amplitude
                * (std::f64::consts::TAU * j as f64 / period.max(1) as f64 + phase).sin()
        })
        .collect();

    let mut out = Vec::with_capacity(len);
    for t in 0..len {
        let e = noise.sample(rng);
        let fitted = level + phi * trend;
        let y_adj = match error {
            Error::Additive => fitted + base * e,
            Error::Multiplicative => fitted * (1.0 + e),
        };
        let innovation = y_adj - fitted;
        level = fitted + alpha * innovation;
        trend = phi * trend + beta * innovation;
        out.push(y_adj * season[t % season.len()]);
    }
    let min = out.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 1.0 {
        let lift = 1.0 - min + 0.1 * base;
        out.iter_mut().for_each(|v| *v += lift);
    }
    out
}

/// `count` yearly ETS series with lengths drawn from `lengths`.
pub fn ets_corpus(
    seed: u64,
    count: usize,
    lengths: std::ops::RangeInclusive<usize>,
    frequency: Frequency,
    horizon: usize,
) -> Vec<CorpusRecord> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let len = rng.random_range(lengths.clone());
            CorpusRecord {
                series_id: format!("s{seed}-{i}"),
                frequency,
                values: ets_series(&mut rng, len, frequency.period()),
                horizon,
            }
        })
        .collect()
}

pub fn white_noise(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let n = Normal::new(0.0, 1.0).unwrap();
    (0..len).map(|_| n.sample(rng)).collect()
}
