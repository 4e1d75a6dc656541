use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use simforecast::{Aggregator, DistanceMeasure, Frequency, PreprocessConfig};

#[derive(Debug, Parser)]
#[command(name = "simforecast", version, about = "Forecasting by cross-similarity against a reference corpus")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "SIMFORECAST_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and save a preprocessed reference set from a corpus CSV.
    BuildRef(BuildRefArgs),
    /// Forecast every series of a target CSV.
    Forecast(ForecastArgs),
    /// Report the calibrated interval factor and forecastability per target.
    Calibrate(ForecastArgs),
    /// Score forecast files against held-out actuals.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PreprocessArgs {
    /// Loess span as a multiple of h [default: 0.7 yearly/quarterly, 1.3 monthly, 1.0 otherwise].
    #[arg(long)]
    pub span_factor: Option<f64>,
    /// Critical value of the lag-s autocorrelation test.
    #[arg(long, default_value_t = 1.645)]
    pub acf_z: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_max: f64,
    #[arg(long)]
    pub no_seasonal_adjustment: bool,
    #[arg(long)]
    pub no_smoothing: bool,
}

impl PreprocessArgs {
    pub fn config(&self, frequency: Frequency) -> PreprocessConfig {
        let base = PreprocessConfig::for_frequency(frequency);
        PreprocessConfig {
            acf_confidence_z: self.acf_z,
            span_factor: self.span_factor.unwrap_or(base.span_factor),
            box_cox_lambda_range: (self.lambda_min, self.lambda_max),
            enable_seasonal_adjustment: !self.no_seasonal_adjustment,
            enable_smoothing: !self.no_smoothing,
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildRefArgs {
    #[arg(long, env = "SIMFORECAST_CORPUS")]
    pub corpus: PathBuf,
    /// Target length n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Forecast horizon h [default: 6 yearly, 8 quarterly, 18 monthly].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub h: Option<u64>,
    /// yearly, quarterly, monthly or other:<period>.
    #[arg(long = "freq", value_parser = parse_frequency)]
    pub frequency: Frequency,
    #[arg(long)]
    pub out: PathBuf,
    /// Also dump the set as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Target series in corpus CSV format; the horizon column (or the
    /// frequency default) sets h.
    #[arg(long)]
    pub targets: PathBuf,
    /// Saved reference set; every target must match its n, h and frequency.
    #[arg(long = "ref", env = "SIMFORECAST_REF", conflicts_with = "corpus")]
    pub reference: Option<PathBuf>,
    /// Reference corpus; a set is built for each (frequency, n, h) among the targets.
    #[arg(long, env = "SIMFORECAST_CORPUS")]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "dtw", value_parser = parse_distance)]
    pub distance: DistanceMeasure,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value = "median", value_parser = parse_aggregator)]
    pub aggregator: Aggregator,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta_step: f64,
    /// Keep only the last YEARS seasonal cycles of each target.
    #[arg(long, value_name = "YEARS", value_parser = clap::value_parser!(u64).range(1..))]
    pub cut: Option<u64>,
    /// Output JSON path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Holdout values in corpus CSV format, used for the plot CSV's actual column.
    #[arg(long)]
    pub actuals: Option<PathBuf>,
    /// Write `id,step,actual,point,lower,upper` rows for plotting.
    #[arg(long)]
    pub plot_csv: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Forecast JSON from `forecast`, optionally as METHOD=PATH. Repeatable.
    #[arg(long = "forecasts", required_unless_present = "sweep_k")]
    pub forecasts: Vec<String>,
    /// In-sample histories (corpus CSV).
    #[arg(long)]
    pub history: PathBuf,
    /// Holdout values (corpus CSV).
    #[arg(long)]
    pub actuals: PathBuf,
    #[arg(long, env = "SIMFORECAST_OUT_DIR")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Metric used for the mean-rank comparison across methods.
    #[arg(long, default_value = "mase", value_parser = ["mase", "msis"])]
    pub rank_by: String,
    /// Forecast the histories once per k and score each as its own method.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
    pub sweep_k: Vec<u64>,
    #[arg(long = "ref", env = "SIMFORECAST_REF", conflicts_with = "corpus")]
    pub reference: Option<PathBuf>,
    #[arg(long, env = "SIMFORECAST_CORPUS")]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "dtw", value_parser = parse_distance)]
    pub distance: DistanceMeasure,
    #[arg(long, default_value = "median", value_parser = parse_aggregator)]
    pub aggregator: Aggregator,
    #[arg(long, default_value_t = 0.01)]
    pub delta_step: f64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

fn parse_frequency(s: &str) -> Result<Frequency, String> {
    Frequency::from_label(s).map_err(|e| e.to_string())
}

fn parse_distance(s: &str) -> Result<DistanceMeasure, String> {
    s.parse().map_err(|e: simforecast::Error| e.to_string())
}

fn parse_aggregator(s: &str) -> Result<Aggregator, String> {
    s.parse().map_err(|e: simforecast::Error| e.to_string())
}
