//! Binary persistence of reference sets.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic        8 bytes  "SIMFREF\0"
//! version      u32
//! n, h         u64, u64
//! period       u32
//! m            u64      number of series
//! config hash  u64      first 8 bytes of SHA-256 over the config JSON
//! config       u32 length + UTF-8 JSON
//! m × series:
//!   id                     u32 length + UTF-8
//!   history                n × f64
//!   future                 h × f64
//!   preprocessed history   n × f64
//!   scaled future          h × f64
//!   origin, shift, lambda  3 × f64
//!   was_seasonal, fallback 2 × u8
//!   seasonal component     u64 length + f64 values
//! crc32        u32      over every preceding byte
//! ```

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::preprocess::SeasonalAdjustment;
use crate::types::{Frequency, PreprocessConfig, ReferenceSeries, ReferenceSet};

const MAGIC: &[u8; 8] = b"SIMFREF\0";
pub const FORMAT_VERSION: u32 = 1;

/// Stable 64-bit digest of a preprocessing configuration.
pub fn config_hash(config: &PreprocessConfig) -> u64 {
    let json = serde_json::to_vec(config).expect("config serialises");
    let digest = Sha256::digest(&json);
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub fn encode_reference_set(set: &ReferenceSet) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(set.target_n as u64).to_le_bytes());
    out.extend_from_slice(&(set.horizon_h as u64).to_le_bytes());
    out.extend_from_slice(&(set.frequency.period() as u32).to_le_bytes());
    out.extend_from_slice(&(set.entries.len() as u64).to_le_bytes());
    out.extend_from_slice(&config_hash(&set.preprocessing_config).to_le_bytes());
    let config = serde_json::to_vec(&set.preprocessing_config).expect("config serialises");
    put_bytes(&mut out, &config);

    for e in &set.entries {
        put_bytes(&mut out, e.id.as_bytes());
        for v in e
            .history
            .iter()
            .chain(&e.future_path)
            .chain(&e.preprocessed_history)
            .chain(&e.scaled_future)
        {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [e.origin, e.shift, e.adjustment.lambda] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(e.adjustment.was_seasonal as u8);
        out.push(e.adjustment.lambda_fallback as u8);
        let seasonal = &e.adjustment.seasonal_component_transformed;
        out.extend_from_slice(&(seasonal.len() as u64).to_le_bytes());
        for v in seasonal {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(bytes);
}

/// Decodes a set; with `expected` given, rejects sets built with any other
/// preprocessing configuration.
pub fn decode_reference_set(
    bytes: &[u8],
    expected: Option<&PreprocessConfig>,
) -> Result<ReferenceSet> {
    if bytes.len() < MAGIC.len() + 4 + 4 {
        return Err(Error::Checksum);
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().expect("4 bytes"));
    if crc32fast::hash(body) != stored {
        return Err(Error::Checksum);
    }

    let mut r = Cursor { bytes: body, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(Error::Malformed("not a reference-set file".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let n = r.len_u64()?;
    let h = r.len_u64()?;
    let frequency = Frequency::new(r.u32()?)?;
    let m = r.len_u64()?;
    let hash = r.u64()?;
    let config_len = r.u32()? as usize;
    let config: PreprocessConfig = serde_json::from_slice(r.take(config_len)?)
        .map_err(|e| Error::Malformed(format!("config: {e}")))?;
    if config_hash(&config) != hash {
        return Err(Error::Malformed("config hash does not match stored config".into()));
    }
    if let Some(expected) = expected {
        if config_hash(expected) != hash {
            return Err(Error::ConfigMismatch);
        }
    }

    let mut entries = Vec::with_capacity(m.min(1 << 20));
    for _ in 0..m {
        let id_len = r.u32()? as usize;
        let id = String::from_utf8(r.take(id_len)?.to_vec())
            .map_err(|_| Error::Malformed("series id is not UTF-8".into()))?;
        let history = r.f64s(n)?;
        let future_path = r.f64s(h)?;
        let preprocessed_history = r.f64s(n)?;
        let scaled_future = r.f64s(h)?;
        let origin = r.f64()?;
        let shift = r.f64()?;
        let lambda = r.f64()?;
        let was_seasonal = r.flag()?;
        let lambda_fallback = r.flag()?;
        let seasonal_len = r.len_u64()?;
        let seasonal = r.f64s(seasonal_len)?;
        entries.push(ReferenceSeries {
            id,
            history,
            future_path,
            preprocessed_history,
            scaled_future,
            origin,
            shift,
            adjustment: SeasonalAdjustment {
                lambda,
                seasonal_component_transformed: seasonal,
                was_seasonal,
                lambda_fallback,
            },
        });
    }
    if r.pos != body.len() {
        return Err(Error::Malformed(format!(
            "{} trailing bytes after the last series",
            body.len() - r.pos
        )));
    }
    Ok(ReferenceSet {
        target_n: n,
        horizon_h: h,
        frequency,
        entries,
        preprocessing_config: config,
    })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| Error::Malformed("unexpected end of payload".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn len_u64(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Malformed("length overflows".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, count: usize) -> Result<Vec<f64>> {
        let raw = self.take(
            count
                .checked_mul(8)
                .ok_or_else(|| Error::Malformed("length overflows".into()))?,
        )?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn flag(&mut self) -> Result<bool> {
        match self.take(1)?[0] {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(Error::Malformed(format!("invalid flag byte {b}"))),
        }
    }
}

pub fn save_reference_set(set: &ReferenceSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_reference_set(set))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_reference_set(
    path: impl AsRef<Path>,
    expected: Option<&PreprocessConfig>,
) -> Result<ReferenceSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    decode_reference_set(&bytes, expected)
}

/// Human-readable dump for debugging; not read back by the tools.
pub fn export_json(set: &ReferenceSet) -> Result<String> {
    serde_json::to_string_pretty(set).map_err(|e| Error::Malformed(e.to_string()))
}
