//! Reference sets for a batch of targets, from a saved set or a corpus.

use std::collections::BTreeMap;
use std::path::Path;

use simforecast::dataio::{build_reference_set, load_reference_set, read_corpus, rebuild_for_length};
use simforecast::{Frequency, ReferenceSet, TimeSeries};

use crate::args::PreprocessArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

type Key = (Frequency, usize, usize);

fn key(ts: &TimeSeries) -> Key {
    (ts.frequency(), ts.len(), ts.horizon())
}

pub struct References {
    /// A single loaded set used for every target.
    fixed: Option<ReferenceSet>,
    built: BTreeMap<Key, ReferenceSet>,
    /// Sets rebuilt for length `n - h`, keyed by the outer set's key.
    inner: BTreeMap<Key, ReferenceSet>,
}

impl References {
    /// Loads or builds every set the targets need, plus the shorter sets
    /// used to calibrate targets long enough for an inner holdout.
    pub fn prepare(
        reference: Option<&Path>,
        corpus: Option<&Path>,
        preprocess: &PreprocessArgs,
        targets: &[TimeSeries],
        manifest: &mut RunManifest,
    ) -> CliResult<Self> {
        let mut refs = References {
            fixed: None,
            built: BTreeMap::new(),
            inner: BTreeMap::new(),
        };
        match (reference, corpus) {
            (Some(path), _) => {
                manifest.input("reference", path);
                let set = manifest.time("load_reference", || load_reference_set(path, None))?;
                manifest.config(&serde_json::json!({
                    "reference_n": set.target_n(),
                    "reference_h": set.horizon(),
                    "reference_frequency": set.frequency().label(),
                    "reference_m": set.len(),
                    "preprocess": set.preprocessing_config(),
                }));
                refs.fixed = Some(set);
            }
            (None, Some(path)) => {
                manifest.input("corpus", path);
                let corpus = manifest.time("read_corpus", || read_corpus(path))?;
                let mut configs = BTreeMap::new();
                for ts in targets {
                    let k = key(ts);
                    if refs.built.contains_key(&k) {
                        continue;
                    }
                    let (freq, n, h) = k;
                    let config = preprocess.config(freq);
                    let built = manifest.time("build_reference", || {
                        build_reference_set(&corpus, n, h, freq, &config)
                    });
                    let (set, report) = built.map_err(|e| match e {
                        simforecast::Error::EmptyReferenceSet => CliError::Data(format!(
                            "no {freq} reference series with at least n + h = {} observations",
                            n + h
                        )),
                        other => other.into(),
                    })?;
                    log::info!("{freq} n={n} h={h}: m={} dropped={}", set.len(), report.dropped());
                    configs.insert(format!("{freq}/n={n}/h={h}"), config);
                    refs.built.insert(k, set);
                }
                manifest.config(&serde_json::json!({ "preprocess": configs }));
            }
            (None, None) => {
                return Err(CliError::Usage(
                    "one of --ref or --corpus is required (or set SIMFORECAST_REF / SIMFORECAST_CORPUS)"
                        .into(),
                ))
            }
        }

        for ts in targets {
            let k = key(ts);
            let (_, n, h) = k;
            if n <= 2 * h || refs.inner.contains_key(&k) {
                continue;
            }
            let Some(set) = refs.outer_for(ts) else { continue };
            if set.target_n() != n {
                continue;
            }
            let inner = manifest.time("rebuild_reference", || rebuild_for_length(set, n - h))?;
            refs.inner.insert(k, inner);
        }
        Ok(refs)
    }

    fn outer_for(&self, ts: &TimeSeries) -> Option<&ReferenceSet> {
        self.fixed.as_ref().or_else(|| self.built.get(&key(ts)))
    }

    pub fn set_for(&self, ts: &TimeSeries) -> CliResult<&ReferenceSet> {
        self.outer_for(ts).ok_or_else(|| {
            CliError::Internal(format!("no reference set prepared for `{}`", ts.id()))
        })
    }

    pub fn inner_for(&self, ts: &TimeSeries) -> Option<&ReferenceSet> {
        self.inner.get(&key(ts))
    }
}
