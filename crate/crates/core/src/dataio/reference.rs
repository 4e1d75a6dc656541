use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::CorpusRecord;
use crate::error::{Error, Result};
use crate::preprocess::preprocess_reference;
use crate::types::{Frequency, PreprocessConfig, ReferenceSeries, ReferenceSet, TimeSeries};

/// What happened to the corpus while building a reference set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BuildReport {
    /// Series with the requested frequency.
    pub considered: usize,
    /// Dropped for having fewer than `n + h` observations.
    pub too_short: usize,
    /// Dropped because preprocessing failed, with the reason.
    pub failed: Vec<(String, String)>,
    pub kept: usize,
}

impl BuildReport {
    pub fn dropped(&self) -> usize {
        self.too_short + self.failed.len()
    }
}

/// Builds the reference set for targets of length `target_n` and horizon
/// `horizon_h`.
///
/// Only series of the given frequency are used. Series with fewer than
/// `n + h` values are dropped; longer ones keep their last `n + h` values.
/// Corpus order is preserved.
pub fn build_reference_set(
    corpus: &[CorpusRecord],
    target_n: usize,
    horizon_h: usize,
    frequency: Frequency,
    config: &PreprocessConfig,
) -> Result<(ReferenceSet, BuildReport)> {
    check_dims(target_n, horizon_h)?;
    config.validate()?;
    let window = target_n + horizon_h;
    let mut report = BuildReport::default();
    let mut candidates: Vec<(&str, &[f64])> = Vec::new();
    for record in corpus.iter().filter(|r| r.frequency == frequency) {
        report.considered += 1;
        if record.values.len() < window {
            report.too_short += 1;
        } else {
            candidates.push((&record.series_id, &record.values[record.values.len() - window..]));
        }
    }
    let (entries, failed) = preprocess_all(&candidates, target_n, frequency, config);
    report.failed = failed;
    report.kept = entries.len();
    if entries.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    Ok((
        ReferenceSet {
            target_n,
            horizon_h,
            frequency,
            entries,
            preprocessing_config: config.clone(),
        },
        report,
    ))
}

/// Rebuilds `set` for shorter targets of length `n_new`, using the last
/// `n_new + h` values of each stored window. Series that fail preprocessing
/// at the new length are dropped.
pub fn rebuild_for_length(set: &ReferenceSet, n_new: usize) -> Result<ReferenceSet> {
    check_dims(n_new, set.horizon_h)?;
    if n_new > set.target_n {
        return Err(Error::InvalidParameter {
            name: "n_new",
            reason: format!(
                "cannot extend reference windows from n = {} to {n_new}",
                set.target_n
            ),
        });
    }
    let skip = set.target_n - n_new;
    let windows: Vec<Vec<f64>> = set
        .entries
        .iter()
        .map(|e| e.history[skip..].iter().chain(&e.future_path).copied().collect())
        .collect();
    let candidates: Vec<(&str, &[f64])> = set
        .entries
        .iter()
        .zip(&windows)
        .map(|(e, w)| (e.id.as_str(), w.as_slice()))
        .collect();
    let (entries, failed) =
        preprocess_all(&candidates, n_new, set.frequency, &set.preprocessing_config);
    if !failed.is_empty() {
        log::debug!("{} reference series dropped at n = {n_new}", failed.len());
    }
    if entries.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    Ok(ReferenceSet {
        target_n: n_new,
        horizon_h: set.horizon_h,
        frequency: set.frequency,
        entries,
        preprocessing_config: set.preprocessing_config.clone(),
    })
}

fn check_dims(n: usize, h: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "must be at least 1".into(),
        });
    }
    if h == 0 {
        return Err(Error::InvalidParameter {
            name: "h",
            reason: "must be at least 1".into(),
        });
    }
    Ok(())
}

type Failures = Vec<(String, String)>;

fn preprocess_all(
    candidates: &[(&str, &[f64])],
    n: usize,
    frequency: Frequency,
    config: &PreprocessConfig,
) -> (Vec<ReferenceSeries>, Failures) {
    let results: Vec<Result<ReferenceSeries>> = candidates
        .par_iter()
        .map(|(id, window)| preprocess_reference(id, window, n, frequency.period(), config))
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for ((id, _), result) in candidates.iter().zip(results) {
        match result {
            Ok(entry) => entries.push(entry),
            Err(err) => failed.push((id.to_string(), err.to_string())),
        }
    }
    (entries, failed)
}

/// Keeps the last `max_years` seasonal cycles (`max_years` observations for
/// non-seasonal data). Shorter series are returned unchanged.
pub fn apply_history_cut(ts: &TimeSeries, max_years: usize) -> Result<TimeSeries> {
    if max_years == 0 {
        return Err(Error::InvalidParameter {
            name: "max_years",
            reason: "must be at least 1".into(),
        });
    }
    let keep = max_years.saturating_mul(ts.frequency().period());
    if ts.len() <= keep {
        return Ok(ts.clone());
    }
    ts.with_values(ts.values()[ts.len() - keep..].to_vec())
}
