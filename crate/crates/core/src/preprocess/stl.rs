//! Seasonal-trend decomposition by Loess (Cleveland et al., 1990).
//!
//! Non-robust variant with a periodic seasonal: the cycle-subseries are
//! smoothed with a very long degree-0 window and the final seasonal component
//! is replaced by its per-phase means, so every cycle repeats the same
//! pattern. Trend and low-pass smoothers are local-linear.

use crate::error::{Error, Result};
use crate::types::check_finite;

use super::loess::tricube;

#[derive(Debug, Clone, PartialEq)]
pub struct StlDecomposition {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct StlParams {
    period: usize,
    seasonal_span: usize,
    trend_span: usize,
    lowpass_span: usize,
    seasonal_degree: usize,
    trend_degree: usize,
    lowpass_degree: usize,
    inner_iterations: usize,
}

impl StlParams {
    fn periodic(n: usize, period: usize) -> Self {
        let cycles = n.div_ceil(period);
        let seasonal_span = 10 * cycles + 1;
        let trend_span = next_odd(
            (1.5 * period as f64 / (1.0 - 1.5 / seasonal_span as f64)).ceil() as usize,
        );
        StlParams {
            period,
            seasonal_span,
            trend_span,
            lowpass_span: next_odd(period),
            seasonal_degree: 0,
            trend_degree: 1,
            lowpass_degree: 1,
            inner_iterations: 2,
        }
    }
}

fn next_odd(x: usize) -> usize {
    let x = x.max(3);
    if x % 2 == 0 {
        x + 1
    } else {
        x
    }
}

/// Decomposes `values` into trend, seasonal and remainder with
/// `values = trend + seasonal + remainder` (the remainder is the residual).
pub fn stl_decompose(values: &[f64], period: usize) -> Result<StlDecomposition> {
    if period < 2 {
        return Err(Error::InvalidParameter {
            name: "period",
            reason: format!("STL needs a seasonal period of at least 2, got {period}"),
        });
    }
    check_finite(values)?;
    let n = values.len();
    let required = 2 * period + 1;
    if n < required {
        return Err(Error::TooShort {
            required,
            actual: n,
        });
    }
    let params = StlParams::periodic(n, period);

    let mut trend = vec![0.0; n];
    let mut seasonal = vec![0.0; n];
    let mut detrended = vec![0.0; n];
    let mut cycle = vec![0.0; n + 2 * period];
    let mut deseasonalised = vec![0.0; n];

    for _ in 0..params.inner_iterations {
        for i in 0..n {
            detrended[i] = values[i] - trend[i];
        }
        smooth_cycle_subseries(&detrended, &params, &mut cycle);
        let low = low_pass(&cycle, &params);
        for i in 0..n {
            seasonal[i] = cycle[period + i] - low[i];
            deseasonalised[i] = values[i] - seasonal[i];
        }
        trend = loess_series(&deseasonalised, params.trend_span, params.trend_degree);
    }

    // periodic seasonal: replace by per-phase means
    let mut phase_sum = vec![0.0; period];
    let mut phase_count = vec![0usize; period];
    for (i, s) in seasonal.iter().enumerate() {
        phase_sum[i % period] += s;
        phase_count[i % period] += 1;
    }
    for (i, s) in seasonal.iter_mut().enumerate() {
        *s = phase_sum[i % period] / phase_count[i % period] as f64;
    }

    let remainder = values
        .iter()
        .zip(&trend)
        .zip(&seasonal)
        .map(|((y, t), s)| y - t - s)
        .collect();
    Ok(StlDecomposition {
        trend,
        seasonal,
        remainder,
    })
}

/// Smooths each cycle-subseries and extrapolates one cycle at both ends, so
/// `out` has length `n + 2 * period`.
fn smooth_cycle_subseries(y: &[f64], params: &StlParams, out: &mut [f64]) {
    let period = params.period;
    let n = y.len();
    let mut sub = Vec::with_capacity(n / period + 1);
    for phase in 0..period {
        sub.clear();
        sub.extend(y.iter().skip(phase).step_by(period).copied());
        let k = sub.len();
        let len = params.seasonal_span;
        let deg = params.seasonal_degree;
        let smoothed = loess_series(&sub, len, deg);

        // positions are 1-based in the Cleveland formulation
        let right = len.min(k);
        let before = loess_at(&sub, len, deg, 0.0, 1, right).unwrap_or(smoothed[0]);
        let left = if len >= k { 1 } else { k - len + 1 };
        let after = loess_at(&sub, len, deg, (k + 1) as f64, left, k).unwrap_or(smoothed[k - 1]);

        out[phase] = before;
        for (m, v) in smoothed.iter().enumerate() {
            out[(m + 1) * period + phase] = *v;
        }
        out[(k + 1) * period + phase] = after;
    }
}

/// Moving averages of length `period`, `period`, 3, then a Loess pass.
fn low_pass(cycle: &[f64], params: &StlParams) -> Vec<f64> {
    let first = moving_average(cycle, params.period);
    let second = moving_average(&first, params.period);
    let third = moving_average(&second, 3);
    loess_series(&third, params.lowpass_span, params.lowpass_degree)
}

fn moving_average(x: &[f64], len: usize) -> Vec<f64> {
    let out_len = x.len() + 1 - len;
    let mut out = Vec::with_capacity(out_len);
    let mut acc: f64 = x[..len].iter().sum();
    out.push(acc / len as f64);
    for i in 1..out_len {
        acc += x[i + len - 1] - x[i - 1];
        out.push(acc / len as f64);
    }
    out
}

/// Loess fit at every position of `y` with a window of `len` points.
fn loess_series(y: &[f64], len: usize, degree: usize) -> Vec<f64> {
    let n = y.len();
    if n < 2 {
        return y.to_vec();
    }
    let half = len.div_ceil(2);
    (1..=n)
        .map(|i| {
            let (left, right) = if len >= n {
                (1, n)
            } else if i < half {
                (1, len)
            } else if i + half > n {
                (n - len + 1, n)
            } else {
                (i + 1 - half, i + len - half)
            };
            loess_at(y, len, degree, i as f64, left, right).unwrap_or(y[i - 1])
        })
        .collect()
}

/// Single Loess estimate at 1-based position `xs` from points
/// `left..=right`. Returns `None` when every weight vanishes.
fn loess_at(
    y: &[f64],
    len: usize,
    degree: usize,
    xs: f64,
    left: usize,
    right: usize,
) -> Option<f64> {
    let n = y.len();
    let mut h = (xs - left as f64).max(right as f64 - xs);
    if len > n {
        h += ((len - n) / 2) as f64;
    }
    let upper = 0.999 * h;
    let lower = 0.001 * h;

    let mut weights = Vec::with_capacity(right + 1 - left);
    let mut total = 0.0;
    for j in left..=right {
        let r = (j as f64 - xs).abs();
        let w = if r <= upper {
            if r <= lower || h <= 0.0 {
                1.0
            } else {
                tricube(r / h)
            }
        } else {
            0.0
        };
        total += w;
        weights.push(w);
    }
    if total <= 0.0 {
        return None;
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    if degree > 0 {
        let a: f64 = (left..=right)
            .zip(&weights)
            .map(|(j, w)| w * j as f64)
            .sum();
        let c: f64 = (left..=right)
            .zip(&weights)
            .map(|(j, w)| w * (j as f64 - a).powi(2))
            .sum();
        let range = (n - 1) as f64;
        if c.sqrt() > 0.001 * range {
            let b = (xs - a) / c;
            for (j, w) in (left..=right).zip(weights.iter_mut()) {
                *w *= b * (j as f64 - a) + 1.0;
            }
        }
    }
    Some(
        (left..=right)
            .zip(&weights)
            .map(|(j, w)| w * y[j - 1])
            .sum(),
    )
}
