//! The forecasting pipeline: preprocess the target, find its nearest
//! reference series, map their future paths onto the target's scale and
//! seasonality, aggregate them into point forecasts and derive calibrated
//! prediction intervals.

use rayon::prelude::*;

use crate::dataio::rebuild_for_length;
use crate::error::{Error, Result};
use crate::metrics::{mase_denominator, msis_with_denominator};
use crate::preprocess::{postprocess_clamped, preprocess_series, PreprocessedSeries};
use crate::similarity::{nearest_k, NearestNeighbors};
use crate::types::{
    Aggregator, CalibrationStatus, ForecastConfig, ForecastResult, ReferenceSet, TimeSeries,
};

const WEIGHT_EPSILON: f64 = 1e-9;

/// Combines `k` paths step by step into one path.
///
/// `WeightedMean` weights path `i` by `1 / (distance_i + 1e-9)`, normalised to
/// sum to one.
pub fn aggregate_paths(
    paths: &[Vec<f64>],
    aggregator: Aggregator,
    distances: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let first = paths
        .first()
        .ok_or_else(|| Error::Aggregation("no paths to aggregate".into()))?;
    let h = first.len();
    if let Some(bad) = paths.iter().find(|p| p.len() != h) {
        return Err(Error::LengthMismatch {
            left: h,
            right: bad.len(),
        });
    }
    let weights = match aggregator {
        Aggregator::WeightedMean => {
            let distances = distances.ok_or_else(|| {
                Error::Aggregation("weighted mean requires neighbour distances".into())
            })?;
            if distances.len() != paths.len() {
                return Err(Error::LengthMismatch {
                    left: paths.len(),
                    right: distances.len(),
                });
            }
            let raw: Vec<f64> = distances.iter().map(|d| 1.0 / (d + WEIGHT_EPSILON)).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / total).collect()
        }
        _ => Vec::new(),
    };

    let mut column = Vec::with_capacity(paths.len());
    let out = (0..h)
        .map(|t| {
            column.clear();
            column.extend(paths.iter().map(|p| p[t]));
            match aggregator {
                Aggregator::Median => median(&mut column),
                Aggregator::Mean => column.iter().sum::<f64>() / column.len() as f64,
                Aggregator::WeightedMean => column.iter().zip(&weights).map(|(v, w)| v * w).sum(),
            }
        })
        .collect();
    Ok(out)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Empirical quantile of sorted data, linear interpolation between order
/// statistics (the "type 7" convention).
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Per-step `alpha/2` and `1 - alpha/2` quantiles across the paths.
fn path_quantiles(paths: &[Vec<f64>], alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let h = paths[0].len();
    let mut column = Vec::with_capacity(paths.len());
    (0..h)
        .map(|t| {
            column.clear();
            column.extend(paths.iter().map(|p| p[t]));
            column.sort_unstable_by(f64::total_cmp);
            (
                empirical_quantile(&column, alpha / 2.0),
                empirical_quantile(&column, 1.0 - alpha / 2.0),
            )
        })
        .unzip()
}

fn widen(q_lo: &[f64], q_hi: &[f64], delta: f64) -> (Vec<f64>, Vec<f64>) {
    (
        q_lo.iter().map(|q| (1.0 - delta) * q).collect(),
        q_hi.iter().map(|q| (1.0 + delta) * q).collect(),
    )
}

/// Prediction-interval bounds `L_t = (1 - δ) F⁻¹(α/2)` and
/// `U_t = (1 + δ) F⁻¹(1 - α/2)` from the empirical distribution of the
/// paths at each step.
///
/// The multiplicative widening only widens the interval for positive
/// quantiles; for negative values the formula is applied as written.
pub fn interval_bounds(paths: &[Vec<f64>], alpha: f64, delta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if paths.len() < 2 {
        return Err(Error::Aggregation(format!(
            "interval bounds need at least 2 paths, got {}",
            paths.len()
        )));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must lie in [0, 1], got {delta}"),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must lie in (0, 1), got {alpha}"),
        });
    }
    let (q_lo, q_hi) = path_quantiles(paths, alpha);
    Ok(widen(&q_lo, &q_hi, delta))
}

/// The candidate calibration factors `0, step, 2·step, …, 1`.
pub fn delta_grid(step: f64) -> Vec<f64> {
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| (i as f64 * step).min(1.0)).collect();
    if (1.0 - grid[count]).abs() > 1e-9 {
        grid.push(1.0);
    } else {
        grid[count] = 1.0;
    }
    grid
}

/// Neighbour future paths on the target's scale and seasonality.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledNeighborPaths {
    pub target: PreprocessedSeries,
    pub neighbors: NearestNeighbors,
    pub paths: Vec<Vec<f64>>,
}

impl RescaledNeighborPaths {
    pub fn distances(&self) -> Vec<f64> {
        self.neighbors.neighbors.iter().map(|n| n.distance).collect()
    }

    /// The first `k` paths and distances (neighbours are sorted by distance).
    pub fn prefix(&self, k: usize) -> (&[Vec<f64>], Vec<f64>) {
        let k = k.min(self.paths.len());
        (
            &self.paths[..k],
            self.neighbors.neighbors[..k].iter().map(|n| n.distance).collect(),
        )
    }
}

fn check_shape(target: &TimeSeries, reference_set: &ReferenceSet) -> Result<()> {
    if target.len() != reference_set.target_n() {
        return Err(Error::ShapeMismatch {
            what: "target length n",
            expected: reference_set.target_n(),
            actual: target.len(),
        });
    }
    if target.horizon() != reference_set.horizon() {
        return Err(Error::ShapeMismatch {
            what: "forecast horizon h",
            expected: reference_set.horizon(),
            actual: target.horizon(),
        });
    }
    if target.frequency() != reference_set.frequency() {
        return Err(Error::ShapeMismatch {
            what: "seasonal period",
            expected: reference_set.frequency().period(),
            actual: target.frequency().period(),
        });
    }
    Ok(())
}

/// Steps 1-4 plus the per-neighbour inversion of steps 6-7.
///
/// The target is preprocessed with the reference set's own configuration.
/// Each neighbour's seasonally adjusted future, already divided by that
/// neighbour's origin, is multiplied by the target origin and
/// reseasonalised with the target's last seasonal cycle.
pub fn neighbor_paths(
    target: &TimeSeries,
    reference_set: &ReferenceSet,
    config: &ForecastConfig,
) -> Result<RescaledNeighborPaths> {
    config.validate()?;
    check_shape(target, reference_set)?;
    let pre = preprocess_series(target, reference_set.preprocessing_config())?;
    let neighbors = nearest_k(&pre.scaled, reference_set, config.distance, config.k)?;
    let entries = reference_set.entries();
    let paths = neighbors
        .neighbors
        .iter()
        .map(|n| postprocess_clamped(entries[n.index].scaled_future(), &pre))
        .collect();
    Ok(RescaledNeighborPaths {
        target: pre,
        neighbors,
        paths,
    })
}

/// Result of the δ grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub delta_star: f64,
    pub status: CalibrationStatus,
    /// `(δ, score)` for every grid member evaluated, in grid order.
    pub scores: Vec<(f64, f64)>,
}

impl Calibration {
    fn skipped() -> Self {
        Calibration {
            delta_star: 0.0,
            status: CalibrationStatus::Skipped,
            scores: Vec::new(),
        }
    }
}

fn needs_skip(target: &TimeSeries) -> bool {
    target.len() <= 2 * target.horizon()
}

/// Chooses δ by grid search on an inner holdout.
///
/// The last `h` observations of the target are held out, the pipeline is run
/// on the first `n - h` against the reference set rebuilt for that length,
/// and the δ with the lowest MSIS on the holdout wins (ties go to the
/// smaller δ). Targets with `n <= 2h` are not calibrated and get δ = 0.
pub fn calibrate_delta(
    target: &TimeSeries,
    reference_set: &ReferenceSet,
    config: &ForecastConfig,
) -> Result<Calibration> {
    check_shape(target, reference_set)?;
    if needs_skip(target) {
        return Ok(Calibration::skipped());
    }
    let inner_set = rebuild_for_length(reference_set, target.len() - target.horizon())?;
    calibrate_delta_with(target, &inner_set, config)
}

/// [`calibrate_delta`] with a caller-supplied reference set already built for
/// length `n - h`. Lets callers share one rebuilt set across many targets.
pub fn calibrate_delta_with(
    target: &TimeSeries,
    inner_set: &ReferenceSet,
    config: &ForecastConfig,
) -> Result<Calibration> {
    config.validate()?;
    if needs_skip(target) {
        return Ok(Calibration::skipped());
    }
    let n = target.len();
    let h = target.horizon();
    let (train, test) = target.values().split_at(n - h);
    let inner = target.with_values(train.to_vec())?;
    let inner_paths = neighbor_paths(&inner, inner_set, config)?;
    let (q_lo, q_hi) = path_quantiles(&inner_paths.paths, config.alpha);

    // The scaling denominator is constant across δ; when it is unusable the
    // unscaled interval score has the same minimiser.
    let period = target.frequency().period();
    let denominator = mase_denominator(train, period).unwrap_or(1.0);

    let scores: Vec<(f64, f64)> = delta_grid(config.delta_grid_step)
        .into_par_iter()
        .map(|delta| {
            let (lower, upper) = widen(&q_lo, &q_hi, delta);
            let score = msis_with_denominator(test, &lower, &upper, config.alpha, denominator);
            (delta, score)
        })
        .collect();
    let mut best = scores[0];
    for &(delta, score) in &scores[1..] {
        if score < best.1 {
            best = (delta, score);
        }
    }
    Ok(Calibration {
        delta_star: best.0,
        status: CalibrationStatus::Calibrated,
        scores,
    })
}

/// Full forecast: point forecasts from the aggregated neighbour paths and
/// prediction intervals calibrated on an inner holdout.
pub fn forecast(
    target: &TimeSeries,
    reference_set: &ReferenceSet,
    config: &ForecastConfig,
) -> Result<ForecastResult> {
    let calibration = calibrate_delta(target, reference_set, config)?;
    forecast_with_calibration(target, reference_set, config, &calibration)
}

/// Like [`forecast`] with an explicit rebuilt set for calibration (`None`
/// rebuilds it on demand).
pub fn forecast_with(
    target: &TimeSeries,
    reference_set: &ReferenceSet,
    inner_set: Option<&ReferenceSet>,
    config: &ForecastConfig,
) -> Result<ForecastResult> {
    let calibration = match inner_set {
        Some(inner) => {
            check_shape(target, reference_set)?;
            calibrate_delta_with(target, inner, config)?
        }
        None => calibrate_delta(target, reference_set, config)?,
    };
    forecast_with_calibration(target, reference_set, config, &calibration)
}

fn forecast_with_calibration(
    target: &TimeSeries,
    reference_set: &ReferenceSet,
    config: &ForecastConfig,
    calibration: &Calibration,
) -> Result<ForecastResult> {
    let rescaled = neighbor_paths(target, reference_set, config)?;
    let distances = rescaled.distances();
    let point = aggregate_paths(&rescaled.paths, config.aggregator, Some(&distances))?;
    let (q_lo, q_hi) = path_quantiles(&rescaled.paths, config.alpha);
    let (lower, upper) = widen(&q_lo, &q_hi, calibration.delta_star);
    let entries = reference_set.entries();
    Ok(ForecastResult {
        point,
        lower,
        upper,
        neighbor_ids: rescaled
            .neighbors
            .neighbors
            .iter()
            .map(|n| entries[n.index].id().to_string())
            .collect(),
        neighbor_distances: distances,
        delta_star: calibration.delta_star,
        calibration: calibration.status,
        k_truncated: rescaled.neighbors.truncated,
    })
}
