//! Per-series scores and their aggregation into evaluation tables.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::accuracy::{coverage_stats, mase, msis};
use crate::error::{Error, Result};
use crate::types::Frequency;

/// Everything needed to score one forecast of one series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesForecast<'a> {
    pub id: &'a str,
    pub frequency: Frequency,
    pub method: &'a str,
    pub insample: &'a [f64],
    pub actuals: &'a [f64],
    pub point: &'a [f64],
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesScore {
    pub id: String,
    pub frequency: Frequency,
    pub method: String,
    pub mase: f64,
    pub msis: f64,
    pub coverage: f64,
    pub upper_coverage: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub id: String,
    pub method: String,
    pub reason: String,
}

/// Mean scores of one method over one frequency, or over all series when
/// `frequency` is `"total"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: String,
    pub frequency: String,
    pub count: usize,
    pub mase: f64,
    pub msis: f64,
    pub coverage: f64,
    pub upper_coverage: f64,
    pub spread: f64,
}

pub fn score_series(input: &SeriesForecast<'_>) -> Result<SeriesScore> {
    let period = input.frequency.period();
    let cov = coverage_stats(input.actuals, input.lower, input.upper, input.insample, period)?;
    Ok(SeriesScore {
        id: input.id.to_string(),
        frequency: input.frequency,
        method: input.method.to_string(),
        mase: mase(input.actuals, input.point, input.insample, period)?,
        msis: msis(
            input.actuals,
            input.lower,
            input.upper,
            input.insample,
            period,
            input.alpha,
        )?,
        coverage: cov.coverage,
        upper_coverage: cov.upper_coverage,
        spread: cov.spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<SeriesScore>,
    pub exclusions: Vec<Exclusion>,
    pub aggregates: Vec<AggregateRow>,
}

impl EvaluationReport {
    /// Scores every input. Series whose scaling denominator is unusable are
    /// listed as exclusions; any other error aborts.
    pub fn evaluate(inputs: &[SeriesForecast<'_>]) -> Result<Self> {
        let mut rows = Vec::with_capacity(inputs.len());
        let mut exclusions = Vec::new();
        for input in inputs {
            match score_series(input) {
                Ok(row) => rows.push(row),
                Err(err @ (Error::ZeroDenominator | Error::TooShort { .. })) => {
                    exclusions.push(Exclusion {
                        id: input.id.to_string(),
                        method: input.method.to_string(),
                        reason: err.to_string(),
                    })
                }
                Err(err) => return Err(err),
            }
        }
        Ok(Self::from_rows(rows, exclusions))
    }

    pub fn from_rows(rows: Vec<SeriesScore>, exclusions: Vec<Exclusion>) -> Self {
        let aggregates = aggregate(&rows);
        EvaluationReport {
            rows,
            exclusions,
            aggregates,
        }
    }

    /// Per-series table: `id,frequency,method,mase,msis,coverage,upper_coverage,spread`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record([
            "id",
            "frequency",
            "method",
            "mase",
            "msis",
            "coverage",
            "upper_coverage",
            "spread",
        ])
        .map_err(io)?;
        for r in &self.rows {
            out.write_record([
                r.id.clone(),
                r.frequency.label(),
                r.method.clone(),
                r.mase.to_string(),
                r.msis.to_string(),
                r.coverage.to_string(),
                r.upper_coverage.to_string(),
                r.spread.to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Aggregates and exclusions as pretty JSON.
    pub fn aggregate_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct View<'a> {
            aggregates: &'a [AggregateRow],
            exclusions: &'a [Exclusion],
        }
        serde_json::to_string_pretty(&View {
            aggregates: &self.aggregates,
            exclusions: &self.exclusions,
        })
        .map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn aggregate_for(&self, method: &str, frequency: &str) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.method == method && a.frequency == frequency)
    }
}

#[derive(Default)]
struct Sums {
    count: usize,
    mase: f64,
    msis: f64,
    coverage: f64,
    upper_coverage: f64,
    spread: f64,
}

impl Sums {
    fn add(&mut self, r: &SeriesScore) {
        self.count += 1;
        self.mase += r.mase;
        self.msis += r.msis;
        self.coverage += r.coverage;
        self.upper_coverage += r.upper_coverage;
        self.spread += r.spread;
    }

    fn row(&self, method: &str, frequency: String) -> AggregateRow {
        let n = self.count as f64;
        AggregateRow {
            method: method.to_string(),
            frequency,
            count: self.count,
            mase: self.mase / n,
            msis: self.msis / n,
            coverage: self.coverage / n,
            upper_coverage: self.upper_coverage / n,
            spread: self.spread / n,
        }
    }
}

/// Methods in first-appearance order; frequencies ascending by period,
/// followed by the series-count weighted total.
fn aggregate(rows: &[SeriesScore]) -> Vec<AggregateRow> {
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let mut out = Vec::new();
    for method in methods {
        let mut per_freq: BTreeMap<Frequency, Sums> = BTreeMap::new();
        let mut total = Sums::default();
        for r in rows.iter().filter(|r| r.method == method) {
            per_freq.entry(r.frequency).or_default().add(r);
            total.add(r);
        }
        for (freq, sums) in &per_freq {
            out.push(sums.row(method, freq.label()));
        }
        out.push(total.row(method, "total".into()));
    }
    out
}
