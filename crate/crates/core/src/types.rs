//! Shared domain types.
//!
//! Everything here is an immutable value type. Construction validates the
//! invariants once so the numeric modules can assume them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::SeasonalAdjustment;

/// Number of observations per seasonal cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Frequency(u32);

impl Frequency {
    pub const YEARLY: Frequency = Frequency(1);
    pub const QUARTERLY: Frequency = Frequency(4);
    pub const MONTHLY: Frequency = Frequency(12);

    pub fn new(period: u32) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidParameter {
                name: "period",
                reason: "must be at least 1".into(),
            });
        }
        Ok(Frequency(period))
    }

    pub fn period(self) -> usize {
        self.0 as usize
    }

    /// Parses `yearly`, `quarterly`, `monthly` or `other:<s>`.
    pub fn from_label(label: &str) -> Result<Self> {
        let trimmed = label.trim();
        match trimmed.to_ascii_lowercase().as_str() {
            "yearly" => Ok(Self::YEARLY),
            "quarterly" => Ok(Self::QUARTERLY),
            "monthly" => Ok(Self::MONTHLY),
            other => other
                .strip_prefix("other:")
                .and_then(|s| s.parse::<u32>().ok())
                .and_then(|s| Frequency::new(s).ok())
                .ok_or_else(|| Error::UnknownFrequency(trimmed.to_string())),
        }
    }

    pub fn label(self) -> String {
        match self.0 {
            1 => "yearly".into(),
            4 => "quarterly".into(),
            12 => "monthly".into(),
            s => format!("other:{s}"),
        }
    }

    /// Forecast horizon used by the M-competitions for this frequency.
    pub fn default_horizon(self) -> Option<usize> {
        match self.0 {
            1 => Some(6),
            4 => Some(8),
            12 => Some(18),
            _ => None,
        }
    }
}

impl TryFrom<u32> for Frequency {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        Frequency::new(value)
    }
}

impl From<Frequency> for u32 {
    fn from(value: Frequency) -> Self {
        value.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Identified, frequency-tagged series of finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    id: String,
    frequency: Frequency,
    values: Vec<f64>,
    horizon: usize,
}

impl TimeSeries {
    pub fn new(
        id: impl Into<String>,
        frequency: Frequency,
        values: Vec<f64>,
        horizon: usize,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        check_finite(&values)?;
        if horizon == 0 {
            return Err(Error::InvalidParameter {
                name: "horizon",
                reason: "must be at least 1".into(),
            });
        }
        Ok(TimeSeries {
            id: id.into(),
            frequency,
            values,
            horizon,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Same series restricted to the given sub-range of observations.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        TimeSeries::new(self.id.clone(), self.frequency, values, self.horizon)
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Preprocessing settings shared by the target and every reference series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub acf_confidence_z: f64,
    /// Loess span as a multiple of the forecast horizon.
    pub span_factor: f64,
    pub box_cox_lambda_range: (f64, f64),
    pub enable_seasonal_adjustment: bool,
    pub enable_smoothing: bool,
}

impl PreprocessConfig {
    /// Defaults keyed on the seasonal period: less smoothing for yearly and
    /// quarterly data, more for monthly.
    pub fn for_frequency(frequency: Frequency) -> Self {
        let span_factor = match frequency.period() {
            1 | 4 => 0.7,
            12 => 1.3,
            _ => 1.0,
        };
        PreprocessConfig {
            acf_confidence_z: 1.645,
            span_factor,
            box_cox_lambda_range: (0.0, 1.0),
            enable_seasonal_adjustment: true,
            enable_smoothing: true,
        }
    }

    /// Only origin scaling; no seasonal adjustment and no smoothing.
    pub fn scaling_only() -> Self {
        PreprocessConfig {
            enable_seasonal_adjustment: false,
            enable_smoothing: false,
            ..Self::for_frequency(Frequency::YEARLY)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.span_factor.is_finite() && self.span_factor > 0.0) {
            return Err(Error::InvalidParameter {
                name: "span_factor",
                reason: format!("must be positive, got {}", self.span_factor),
            });
        }
        if !(self.acf_confidence_z.is_finite() && self.acf_confidence_z > 0.0) {
            return Err(Error::InvalidParameter {
                name: "acf_confidence_z",
                reason: format!("must be positive, got {}", self.acf_confidence_z),
            });
        }
        let (lo, hi) = self.box_cox_lambda_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidParameter {
                name: "box_cox_lambda_range",
                reason: format!("must be a closed interval within [0, 1], got [{lo}, {hi}]"),
            });
        }
        Ok(())
    }

    /// Loess span in observations for a series of `n` points and horizon `h`.
    pub fn span_observations(&self, h: usize, n: usize) -> usize {
        let span = (self.span_factor * h as f64).round() as usize;
        span.max(2).min(n.max(2))
    }
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self::for_frequency(Frequency::YEARLY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMeasure {
    L1,
    L2,
    Dtw,
}

impl DistanceMeasure {
    pub fn name(self) -> &'static str {
        match self {
            DistanceMeasure::L1 => "l1",
            DistanceMeasure::L2 => "l2",
            DistanceMeasure::Dtw => "dtw",
        }
    }
}

impl std::str::FromStr for DistanceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(DistanceMeasure::L1),
            "l2" => Ok(DistanceMeasure::L2),
            "dtw" => Ok(DistanceMeasure::Dtw),
            _ => Err(Error::InvalidParameter {
                name: "distance",
                reason: format!("expected one of l1, l2, dtw; got `{s}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Median,
    Mean,
    #[serde(rename = "wmean")]
    WeightedMean,
}

impl Aggregator {
    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Median => "median",
            Aggregator::Mean => "mean",
            Aggregator::WeightedMean => "wmean",
        }
    }
}

impl std::str::FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "median" => Ok(Aggregator::Median),
            "mean" => Ok(Aggregator::Mean),
            "wmean" | "weighted_mean" | "weightedmean" => Ok(Aggregator::WeightedMean),
            _ => Err(Error::InvalidParameter {
                name: "aggregator",
                reason: format!("expected one of median, mean, wmean; got `{s}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub distance: DistanceMeasure,
    pub k: usize,
    pub aggregator: Aggregator,
    pub alpha: f64,
    pub delta_grid_step: f64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig {
            distance: DistanceMeasure::Dtw,
            k: 500,
            aggregator: Aggregator::Median,
            alpha: 0.05,
            delta_grid_step: 0.01,
        }
    }
}

impl ForecastConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must lie in (0, 1), got {}", self.alpha),
            });
        }
        if !(self.delta_grid_step > 0.0 && self.delta_grid_step <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "delta_grid_step",
                reason: format!("must lie in (0, 1], got {}", self.delta_grid_step),
            });
        }
        Ok(())
    }
}

/// One truncated reference series: raw window plus its preprocessed state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSeries {
    pub(crate) id: String,
    pub(crate) history: Vec<f64>,
    pub(crate) future_path: Vec<f64>,
    pub(crate) preprocessed_history: Vec<f64>,
    /// Future path after seasonal adjustment and division by the origin.
    pub(crate) scaled_future: Vec<f64>,
    pub(crate) origin: f64,
    pub(crate) shift: f64,
    pub(crate) adjustment: SeasonalAdjustment,
}

impl ReferenceSeries {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn future_path(&self) -> &[f64] {
        &self.future_path
    }

    pub fn preprocessed_history(&self) -> &[f64] {
        &self.preprocessed_history
    }

    pub fn scaled_future(&self) -> &[f64] {
        &self.scaled_future
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn adjustment(&self) -> &SeasonalAdjustment {
        &self.adjustment
    }
}

/// Immutable corpus of reference series, all truncated to `n + h` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub(crate) target_n: usize,
    pub(crate) horizon_h: usize,
    pub(crate) frequency: Frequency,
    pub(crate) entries: Vec<ReferenceSeries>,
    pub(crate) preprocessing_config: PreprocessConfig,
}

impl ReferenceSet {
    pub fn target_n(&self) -> usize {
        self.target_n
    }

    pub fn horizon(&self) -> usize {
        self.horizon_h
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn entries(&self) -> &[ReferenceSeries] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn preprocessing_config(&self) -> &PreprocessConfig {
        &self.preprocessing_config
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationStatus {
    Calibrated,
    /// History too short for an inner holdout; `delta_star` is 0.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub point: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub neighbor_ids: Vec<String>,
    pub neighbor_distances: Vec<f64>,
    pub delta_star: f64,
    pub calibration: CalibrationStatus,
    /// Set when fewer than `k` reference series were available.
    pub k_truncated: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_series_constructor() {
        let ts = TimeSeries::new("a", Frequency::YEARLY, vec![1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.id(), "a");
        assert_eq!(ts.horizon(), 2);
        assert_eq!(ts.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn empty_series_rejected() {
        let err = TimeSeries::new("a", Frequency::MONTHLY, vec![], 6).unwrap_err();
        assert_eq!(err, Error::EmptySeries);
        assert_eq!(err.to_string(), "empty series");
    }

    #[test]
    fn nan_reports_index() {
        let err = TimeSeries::new("a", Frequency::QUARTERLY, vec![1.0, f64::NAN], 8).unwrap_err();
        assert_eq!(err, Error::NonFinite { index: 1 });
    }

    #[test]
    fn zero_horizon_rejected() {
        assert!(TimeSeries::new("a", Frequency::YEARLY, vec![1.0], 0).is_err());
    }

    #[test]
    fn frequency_labels() {
        assert_eq!(Frequency::from_label("Monthly").unwrap(), Frequency::MONTHLY);
        assert_eq!(Frequency::from_label("other:7").unwrap().period(), 7);
        assert!(Frequency::from_label("weekly").is_err());
        assert!(Frequency::from_label("other:0").is_err());
        assert_eq!(Frequency::new(24).unwrap().label(), "other:24");
        assert_eq!(Frequency::MONTHLY.default_horizon(), Some(18));
    }

    #[test]
    fn span_factor_defaults() {
        assert_eq!(PreprocessConfig::for_frequency(Frequency::YEARLY).span_factor, 0.7);
        assert_eq!(PreprocessConfig::for_frequency(Frequency::QUARTERLY).span_factor, 0.7);
        assert_eq!(PreprocessConfig::for_frequency(Frequency::MONTHLY).span_factor, 1.3);
        let weekly = Frequency::new(52).unwrap();
        assert_eq!(PreprocessConfig::for_frequency(weekly).span_factor, 1.0);
    }

    #[test]
    fn span_observations_clamped() {
        let cfg = PreprocessConfig::for_frequency(Frequency::MONTHLY);
        assert_eq!(cfg.span_observations(18, 100), 23);
        assert_eq!(cfg.span_observations(18, 10), 10);
        let cfg = PreprocessConfig {
            span_factor: 0.1,
            ..cfg
        };
        assert_eq!(cfg.span_observations(6, 10), 2);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ForecastConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.k = 0;
        assert!(cfg.validate().is_err());
        let cfg = ForecastConfig {
            alpha: 1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let pcfg = PreprocessConfig {
            box_cox_lambda_range: (0.5, 0.2),
            ..Default::default()
        };
        assert!(pcfg.validate().is_err());
    }

    #[test]
    fn parse_enums() {
        assert_eq!("DTW".parse::<DistanceMeasure>().unwrap(), DistanceMeasure::Dtw);
        assert_eq!("wmean".parse::<Aggregator>().unwrap(), Aggregator::WeightedMean);
        assert!("cosine".parse::<DistanceMeasure>().is_err());
    }
}
