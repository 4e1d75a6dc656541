//! Long-format corpus CSV: `series_id,frequency,index,value[,horizon]`.
//!
//! Rows of one series are contiguous with `index` running 1, 2, 3, …

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Frequency, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub series_id: String,
    pub frequency: Frequency,
    pub values: Vec<f64>,
    pub horizon: usize,
}

impl CorpusRecord {
    pub fn to_time_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(
            self.series_id.clone(),
            self.frequency,
            self.values.clone(),
            self.horizon,
        )
    }
}

impl From<&TimeSeries> for CorpusRecord {
    fn from(ts: &TimeSeries) -> Self {
        CorpusRecord {
            series_id: ts.id().to_string(),
            frequency: ts.frequency(),
            values: ts.values().to_vec(),
            horizon: ts.horizon(),
        }
    }
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_corpus_from(file)
}

struct Columns {
    id: usize,
    frequency: usize,
    index: usize,
    value: usize,
    horizon: Option<usize>,
}

impl Columns {
    fn locate(header: &csv::StringRecord) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let require = |name: &str| {
            find(name).ok_or_else(|| Error::Corpus {
                line: 1,
                reason: format!("missing column `{name}` in header"),
            })
        };
        Ok(Columns {
            id: require("series_id")?,
            frequency: require("frequency")?,
            index: require("index")?,
            value: require("value")?,
            horizon: find("horizon"),
        })
    }
}

struct Pending {
    record: CorpusRecord,
    explicit_horizon: Option<usize>,
    first_line: u64,
}

pub fn read_corpus_from<R: Read>(reader: R) -> Result<Vec<CorpusRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = csv.headers().map_err(|e| Error::Corpus {
        line: 1,
        reason: e.to_string(),
    })?;
    let cols = Columns::locate(header)?;

    let mut done: Vec<CorpusRecord> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut current: Option<Pending> = None;
    let mut row = csv::StringRecord::new();
    loop {
        let more = csv.read_record(&mut row).map_err(|e| Error::Corpus {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = row.position().map_or(0, |p| p.line());
        let bad = |reason: String| Error::Corpus { line, reason };
        let field = |i: usize| -> Result<&str> {
            row.get(i)
                .map(str::trim)
                .ok_or_else(|| bad(format!("expected at least {} fields", i + 1)))
        };

        let id = field(cols.id)?;
        if id.is_empty() {
            return Err(bad("empty series_id".into()));
        }
        let frequency = Frequency::from_label(field(cols.frequency)?)?;
        let index: u64 = field(cols.index)?
            .parse()
            .map_err(|_| bad(format!("index `{}` is not a positive integer", field(cols.index).unwrap_or(""))))?;
        let raw_value = field(cols.value)?;
        let value: f64 = raw_value
            .parse()
            .map_err(|_| bad(format!("value `{raw_value}` is not a number")))?;
        if !value.is_finite() {
            return Err(bad(format!("value `{raw_value}` is not finite")));
        }
        let horizon = match cols.horizon.and_then(|i| row.get(i)).map(str::trim) {
            None | Some("") => None,
            Some(h) => Some(
                h.parse::<usize>()
                    .ok()
                    .filter(|&h| h > 0)
                    .ok_or_else(|| bad(format!("horizon `{h}` is not a positive integer")))?,
            ),
        };

        let continues = current.as_ref().is_some_and(|p| p.record.series_id == id);
        if !continues {
            if let Some(p) = current.take() {
                done.push(finish(p)?);
            }
            if !seen.insert(id.to_string()) {
                return Err(bad(format!("rows of series `{id}` are not contiguous")));
            }
            if index != 1 {
                return Err(bad(format!("series `{id}` must start at index 1, got {index}")));
            }
            current = Some(Pending {
                record: CorpusRecord {
                    series_id: id.to_string(),
                    frequency,
                    values: vec![value],
                    horizon: 0,
                },
                explicit_horizon: horizon,
                first_line: line,
            });
            continue;
        }

        let p = current.as_mut().expect("continuing series");
        let expected = p.record.values.len() as u64 + 1;
        if index == expected - 1 {
            return Err(Error::DuplicateIndex {
                id: id.to_string(),
                index,
                line,
            });
        }
        if index != expected {
            return Err(bad(format!(
                "series `{id}` index {index} out of sequence (expected {expected})"
            )));
        }
        if frequency != p.record.frequency {
            return Err(bad(format!("frequency of series `{id}` changes mid-series")));
        }
        if horizon.is_some() && p.explicit_horizon.is_some() && horizon != p.explicit_horizon {
            return Err(bad(format!("horizon of series `{id}` changes mid-series")));
        }
        p.explicit_horizon = p.explicit_horizon.or(horizon);
        p.record.values.push(value);
    }
    if let Some(p) = current.take() {
        done.push(finish(p)?);
    }
    Ok(done)
}

fn finish(mut p: Pending) -> Result<CorpusRecord> {
    p.record.horizon = match p.explicit_horizon.or(p.record.frequency.default_horizon()) {
        Some(h) => h,
        None => {
            return Err(Error::Corpus {
                line: p.first_line,
                reason: format!(
                    "series `{}` has frequency {} and no horizon column",
                    p.record.series_id, p.record.frequency
                ),
            })
        }
    };
    Ok(p.record)
}

/// Writes records in the corpus format, always including the horizon column.
pub fn write_corpus<W: Write>(records: &[CorpusRecord], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(["series_id", "frequency", "index", "value", "horizon"])
        .map_err(io)?;
    for r in records {
        let freq = r.frequency.label();
        let horizon = r.horizon.to_string();
        for (i, v) in r.values.iter().enumerate() {
            out.write_record([
                r.series_id.as_str(),
                freq.as_str(),
                &(i + 1).to_string(),
                &v.to_string(),
                horizon.as_str(),
            ])
            .map_err(io)?;
        }
    }
    out.flush()?;
    Ok(())
}
