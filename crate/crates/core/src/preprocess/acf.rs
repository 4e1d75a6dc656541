/// Sample autocorrelations for lags `0..=max_lag` using the biased
/// autocovariance estimator (divide by `n`). Returns `None` for a constant
/// series, whose lag-0 autocovariance is zero.
pub fn acf(values: &[f64], max_lag: usize) -> Option<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let autocov = |lag: usize| -> f64 {
        if lag >= n {
            return 0.0;
        }
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let c0 = autocov(0);
    if c0 <= 0.0 || !c0.is_finite() {
        return None;
    }
    Some((0..=max_lag).map(|lag| autocov(lag) / c0).collect())
}

/// Tests the lag-`period` autocorrelation for significance.
///
/// Series with `period <= 1` or fewer than three full cycles are never
/// considered seasonal. Otherwise the series is seasonal when
/// `|ACF_s| > z * sqrt((1 + 2 * sum_{i<s} ACF_i^2) / n)`.
pub fn seasonality_test(values: &[f64], period: usize, z: f64) -> bool {
    let n = values.len();
    if period <= 1 || n < 3 * period {
        return false;
    }
    let Some(rho) = acf(values, period) else {
        return false;
    };
    let sum_sq: f64 = rho[1..period].iter().map(|r| r * r).sum();
    let limit = z * ((1.0 + 2.0 * sum_sq) / n as f64).sqrt();
    rho[period].abs() > limit
}
