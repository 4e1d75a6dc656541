//! Model-free forecasting by cross-similarity.
//!
//! A target series is preprocessed (seasonal adjustment, smoothing, scaling
//! by its last value), compared against a corpus of reference series cut to
//! the same length, and forecast by aggregating the futures of its nearest
//! neighbours. Prediction intervals come from the empirical spread of those
//! futures, widened by a factor chosen on an inner holdout.

pub mod dataio;
pub mod error;
pub mod forecaster;
pub mod metrics;
pub mod preprocess;
pub mod similarity;
pub mod types;

pub use error::{Error, Result};
pub use forecaster::{calibrate_delta, forecast, forecast_with, Calibration};
pub use types::{
    Aggregator, CalibrationStatus, DistanceMeasure, ForecastConfig, ForecastResult, Frequency,
    PreprocessConfig, ReferenceSeries, ReferenceSet, TimeSeries,
};
