//! Series preprocessing and its inverse.
//!
//! Forward path: seasonal adjustment (Box-Cox, STL, inverse Box-Cox) when the
//! series tests seasonal, Loess smoothing, then division by the forecast
//! origin. [`postprocess_forecast`] undoes the scaling and reapplies the last
//! estimated seasonal cycle.

mod acf;
mod boxcox;
mod loess;
mod stl;

use serde::{Deserialize, Serialize};

pub use acf::{acf, seasonality_test};
pub use boxcox::{box_cox, guerrero_lambda, inverse_box_cox, LambdaEstimate};
pub use loess::loess_smooth;
pub use stl::{stl_decompose, StlDecomposition};

use crate::error::Result;
use crate::types::{check_finite, PreprocessConfig, ReferenceSeries, TimeSeries};

/// Inversion state of the seasonal-adjustment step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalAdjustment {
    pub lambda: f64,
    /// Seasonal component in Box-Cox space, one value per observation.
    pub seasonal_component_transformed: Vec<f64>,
    pub was_seasonal: bool,
    #[serde(default)]
    pub lambda_fallback: bool,
}

impl SeasonalAdjustment {
    pub fn identity(len: usize) -> Self {
        SeasonalAdjustment {
            lambda: 1.0,
            seasonal_component_transformed: vec![0.0; len],
            was_seasonal: false,
            lambda_fallback: false,
        }
    }

    /// Seasonal index applied to forecast step `step` (0-based) for a
    /// forecast made at the end of `history_len` observations. Uses the last
    /// full cycle, repeated as often as needed.
    fn index_for_step(&self, history_len: usize, period: usize, step: usize) -> f64 {
        let start = history_len - period;
        self.seasonal_component_transformed[start + step % period]
    }
}

/// Seasonally adjusts `values` when they pass the seasonality test.
pub fn seasonal_adjust(
    values: &[f64],
    period: usize,
    config: &PreprocessConfig,
) -> Result<(Vec<f64>, SeasonalAdjustment)> {
    check_finite(values)?;
    if !seasonality_test(values, period, config.acf_confidence_z) {
        return Ok((values.to_vec(), SeasonalAdjustment::identity(values.len())));
    }
    let estimate = guerrero_lambda(values, period, config.box_cox_lambda_range);
    let lambda = estimate.lambda;
    let transformed = box_cox(values, lambda)?;
    let parts = stl_decompose(&transformed, period)?;
    let without_season: Vec<f64> = parts
        .trend
        .iter()
        .zip(&parts.remainder)
        .map(|(t, r)| t + r)
        .collect();
    let adjusted = inverse_box_cox(&without_season, lambda)?;
    Ok((
        adjusted,
        SeasonalAdjustment {
            lambda,
            seasonal_component_transformed: parts.seasonal,
            was_seasonal: true,
            lambda_fallback: estimate.fallback,
        },
    ))
}

/// Target series after seasonal adjustment, smoothing and origin scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessedSeries {
    pub source_id: String,
    pub scaled: Vec<f64>,
    /// Last value of the adjusted, smoothed series before scaling.
    pub origin: f64,
    /// Added to every value before scaling when the origin is zero.
    pub shift: f64,
    pub adjustment: SeasonalAdjustment,
    pub period: usize,
}

impl PreprocessedSeries {
    pub fn zero_origin(&self) -> bool {
        self.shift != 0.0
    }

    /// Maps a path in scaled space back to the original scale of this series.
    pub fn postprocess(&self, path: &[f64]) -> Result<Vec<f64>> {
        postprocess_forecast(path, self.origin, self.shift, &self.adjustment, self.period)
    }
}

/// Steps 1-3 of the pipeline for one series.
pub fn preprocess_series(ts: &TimeSeries, config: &PreprocessConfig) -> Result<PreprocessedSeries> {
    config.validate()?;
    let period = ts.frequency().period();
    let (adjusted, adjustment) = adjust(ts.values(), period, config)?;
    let smoothed = smooth(&adjusted, ts.horizon(), config)?;
    let (divisor, shift) = origin_divisor(&smoothed);
    let origin = divisor - shift;
    let scaled = smoothed.iter().map(|v| (v + shift) / divisor).collect();
    Ok(PreprocessedSeries {
        source_id: ts.id().to_string(),
        scaled,
        origin,
        shift,
        adjustment,
        period,
    })
}

/// Preprocesses one reference window of `n + h` raw values.
///
/// Seasonal adjustment runs on the whole window; smoothing and the origin
/// use the first `n` values only, exactly as for a target of length `n`. The
/// future part is kept unsmoothed, seasonally adjusted and divided by the
/// same origin.
pub(crate) fn preprocess_reference(
    id: &str,
    window: &[f64],
    n: usize,
    period: usize,
    config: &PreprocessConfig,
) -> Result<ReferenceSeries> {
    let h = window.len() - n;
    let (adjusted, adjustment) = adjust(window, period, config)?;
    let smoothed = smooth(&adjusted[..n], h, config)?;
    let (divisor, shift) = origin_divisor(&smoothed);
    Ok(ReferenceSeries {
        id: id.to_string(),
        history: window[..n].to_vec(),
        future_path: window[n..].to_vec(),
        preprocessed_history: smoothed.iter().map(|v| (v + shift) / divisor).collect(),
        scaled_future: adjusted[n..].iter().map(|v| (v + shift) / divisor).collect(),
        origin: divisor - shift,
        shift,
        adjustment,
    })
}

fn adjust(
    values: &[f64],
    period: usize,
    config: &PreprocessConfig,
) -> Result<(Vec<f64>, SeasonalAdjustment)> {
    if config.enable_seasonal_adjustment {
        seasonal_adjust(values, period, config)
    } else {
        check_finite(values)?;
        Ok((values.to_vec(), SeasonalAdjustment::identity(values.len())))
    }
}

fn smooth(values: &[f64], h: usize, config: &PreprocessConfig) -> Result<Vec<f64>> {
    if config.enable_smoothing {
        loess_smooth(values, config.span_observations(h, values.len()))
    } else {
        Ok(values.to_vec())
    }
}

/// Returns `(divisor, shift)`; the shift is non-zero only for a zero origin.
fn origin_divisor(smoothed: &[f64]) -> (f64, f64) {
    let origin = *smoothed.last().expect("non-empty series");
    if origin != 0.0 {
        return (origin, 0.0);
    }
    let min = smoothed.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 + min.abs();
    (origin + shift, shift)
}

/// Steps 6-7: undo origin scaling, then reseasonalise with the last
/// estimated seasonal cycle when the series was seasonally adjusted.
///
/// `adjustment.seasonal_component_transformed` must cover the series the
/// forecast continues; step `j` reuses seasonal index `n - s + (j mod s)`.
pub fn postprocess_forecast(
    path: &[f64],
    origin: f64,
    shift: f64,
    adjustment: &SeasonalAdjustment,
    period: usize,
) -> Result<Vec<f64>> {
    let rescaled: Vec<f64> = path.iter().map(|v| v * (origin + shift) - shift).collect();
    if !adjustment.was_seasonal {
        return Ok(rescaled);
    }
    let lambda = adjustment.lambda;
    let history_len = adjustment.seasonal_component_transformed.len();
    let mut transformed = box_cox(&rescaled, lambda)?;
    for (step, v) in transformed.iter_mut().enumerate() {
        *v += adjustment.index_for_step(history_len, period, step);
    }
    inverse_box_cox(&transformed, lambda)
}

/// Like [`postprocess_forecast`], but values outside the Box-Cox domain are
/// clamped to its boundary instead of failing. Used for neighbour paths,
/// where one extreme reference must not abort the whole forecast.
pub(crate) fn postprocess_clamped(path: &[f64], pre: &PreprocessedSeries) -> Vec<f64> {
    let divisor = pre.origin + pre.shift;
    let adjustment = &pre.adjustment;
    let history_len = adjustment.seasonal_component_transformed.len();
    path.iter()
        .enumerate()
        .map(|(step, v)| {
            let rescaled = v * divisor - pre.shift;
            if !adjustment.was_seasonal {
                return rescaled;
            }
            let lambda = adjustment.lambda;
            let x = boxcox::box_cox_clamped(rescaled, lambda)
                + adjustment.index_for_step(history_len, pre.period, step);
            boxcox::inverse_box_cox_clamped(x, lambda)
        })
        .collect()
}
