use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// In-sample mean absolute seasonal difference
/// `(1/(n-s)) Σ_{t=s+1..n} |y_t - y_{t-s}|`, the scale shared by MASE, MSIS
/// and spread.
pub fn mase_denominator(insample: &[f64], period: usize) -> Result<f64> {
    let n = insample.len();
    let s = period.max(1);
    if n <= s {
        return Err(Error::TooShort {
            required: s + 1,
            actual: n,
        });
    }
    let total: f64 = insample[s..]
        .iter()
        .zip(insample)
        .map(|(a, b)| (a - b).abs())
        .sum();
    let denom = total / (n - s) as f64;
    if denom > 0.0 && denom.is_finite() {
        Ok(denom)
    } else {
        Err(Error::ZeroDenominator)
    }
}

fn check_horizon(actuals: &[f64], other: &[f64]) -> Result<()> {
    if actuals.is_empty() {
        return Err(Error::EmptySeries);
    }
    if actuals.len() != other.len() {
        return Err(Error::LengthMismatch {
            left: actuals.len(),
            right: other.len(),
        });
    }
    Ok(())
}

/// Mean absolute scaled error.
pub fn mase(actuals: &[f64], forecasts: &[f64], insample: &[f64], period: usize) -> Result<f64> {
    check_horizon(actuals, forecasts)?;
    let denom = mase_denominator(insample, period)?;
    let mae = actuals
        .iter()
        .zip(forecasts)
        .map(|(y, f)| (y - f).abs())
        .sum::<f64>()
        / actuals.len() as f64;
    Ok(mae / denom)
}

/// Mean scaled interval score.
pub fn msis(
    actuals: &[f64],
    lower: &[f64],
    upper: &[f64],
    insample: &[f64],
    period: usize,
    alpha: f64,
) -> Result<f64> {
    check_horizon(actuals, lower)?;
    check_horizon(actuals, upper)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must lie in (0, 1), got {alpha}"),
        });
    }
    let denom = mase_denominator(insample, period)?;
    Ok(msis_with_denominator(actuals, lower, upper, alpha, denom))
}

/// Interval score averaged over the horizon and divided by `denominator`.
pub(crate) fn msis_with_denominator(
    actuals: &[f64],
    lower: &[f64],
    upper: &[f64],
    alpha: f64,
    denominator: f64,
) -> f64 {
    let penalty = 2.0 / alpha;
    let total: f64 = actuals
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(&y, (&l, &u))| {
            let mut score = u - l;
            if y < l {
                score += penalty * (l - y);
            }
            if y > u {
                score += penalty * (y - u);
            }
            score
        })
        .sum();
    total / actuals.len() as f64 / denominator
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    /// Share of actuals strictly inside `(L, U)`.
    pub coverage: f64,
    /// Share of actuals strictly below `U`.
    pub upper_coverage: f64,
    /// Mean interval width over the MASE denominator.
    pub spread: f64,
}

pub fn coverage_stats(
    actuals: &[f64],
    lower: &[f64],
    upper: &[f64],
    insample: &[f64],
    period: usize,
) -> Result<CoverageStats> {
    check_horizon(actuals, lower)?;
    check_horizon(actuals, upper)?;
    let denom = mase_denominator(insample, period)?;
    let h = actuals.len() as f64;
    let mut inside = 0usize;
    let mut below = 0usize;
    let mut width = 0.0;
    for ((&y, &l), &u) in actuals.iter().zip(lower).zip(upper) {
        if y > l && y < u {
            inside += 1;
        }
        if y < u {
            below += 1;
        }
        width += u - l;
    }
    Ok(CoverageStats {
        coverage: inside as f64 / h,
        upper_coverage: below as f64 / h,
        spread: width / h / denom,
    })
}
