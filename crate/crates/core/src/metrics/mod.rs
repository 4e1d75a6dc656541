//! Accuracy and interval measures, forecastability and rank tests.

mod accuracy;
mod entropy;
mod mcb;
mod report;

pub(crate) use accuracy::msis_with_denominator;
pub use accuracy::{coverage_stats, mase, mase_denominator, msis, CoverageStats};
pub use entropy::{forecastability, Forecastability};
pub use mcb::{mcb_ranks, studentized_range_quantile, McbOptions, McbRank};
pub use report::{
    score_series, AggregateRow, EvaluationReport, Exclusion, SeriesForecast, SeriesScore,
};
