use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::check_finite;

/// Spectral-entropy forecastability score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Forecastability {
    /// `1 - H / ln(M)`, where `H` is the Shannon entropy of the normalised
    /// smoothed periodogram over `M` Fourier frequencies. 1 for a single
    /// spectral line, near 0 for white noise.
    pub value: f64,
    /// The series was constant; the score is defined as 1.
    pub degenerate: bool,
}

/// Half-width of the modified Daniell kernel applied to the periodogram.
const DANIELL_HALF_WIDTH: usize = 1;

pub fn forecastability(values: &[f64]) -> Result<Forecastability> {
    check_finite(values)?;
    let n = values.len();
    if n < 8 {
        return Err(Error::TooShort {
            required: 8,
            actual: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buffer: Vec<Complex<f64>> = values.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    let scale = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if scale <= f64::EPSILON * mean.abs().max(1.0) {
        return Ok(Forecastability {
            value: 1.0,
            degenerate: true,
        });
    }

    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    // Fourier frequencies 1..=floor(n/2); the zero frequency is removed by demeaning.
    let periodogram: Vec<f64> = buffer[1..=n / 2]
        .iter()
        .map(|c| c.norm_sqr() / n as f64)
        .collect();
    let smoothed = modified_daniell(&periodogram, DANIELL_HALF_WIDTH);
    let total: f64 = smoothed.iter().sum();
    let entropy: f64 = smoothed
        .iter()
        .map(|s| s / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    let bins = smoothed.len() as f64;
    Ok(Forecastability {
        value: 1.0 - entropy / bins.ln(),
        degenerate: false,
    })
}

/// Kernel weights `[1/2, 1, …, 1, 1/2] / (2m)`, reflecting at the edges.
fn modified_daniell(x: &[f64], m: usize) -> Vec<f64> {
    let len = x.len() as isize;
    let reflect = |i: isize| -> usize {
        let mut i = i;
        if i < 0 {
            i = -i - 1;
        }
        if i >= len {
            i = 2 * len - i - 1;
        }
        i.clamp(0, len - 1) as usize
    };
    let m = m as isize;
    let norm = 2.0 * m as f64;
    (0..len)
        .map(|i| {
            (-m..=m)
                .map(|k| {
                    let w = if k.abs() == m { 0.5 } else { 1.0 };
                    w * x[reflect(i + k)]
                })
                .sum::<f64>()
                / norm
        })
        .collect()
}
