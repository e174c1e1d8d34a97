//! Tomograph files: a little-endian `u64` dimension header followed by the
//! row-major entries as `(re, im)` little-endian `f64` pairs, plus a JSON
//! sidecar with the copy accounting.

use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::Tomograph;
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, C64};

/// Sidecar metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographMeta {
    #[serde(rename = "N")]
    pub n_dim: usize,
    pub s: u64,
    pub lambda: usize,
    pub copies: u128,
    pub aborted: bool,
}

/// Self-contained text form: sidecar fields plus the base64 binary body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographBlob {
    pub meta: TomographMeta,
    pub data: String,
}

impl From<Tomograph> for TomographBlob {
    fn from(t: Tomograph) -> Self {
        let (bytes, meta) = encode_tomograph(&t);
        Self {
            meta,
            data: STANDARD.encode(bytes),
        }
    }
}

impl TryFrom<TomographBlob> for Tomograph {
    type Error = Error;

    fn try_from(blob: TomographBlob) -> Result<Self> {
        let bytes = STANDARD
            .decode(blob.data.as_bytes())
            .map_err(|e| Error::Codec(format!("base64: {e}")))?;
        decode_tomograph(&bytes, &blob.meta)
    }
}

pub fn encode_tomograph(t: &Tomograph) -> (Vec<u8>, TomographMeta) {
    let dim = t.dim();
    let mut bytes = Vec::with_capacity(8 + 16 * dim * dim);
    bytes.extend_from_slice(&(dim as u64).to_le_bytes());
    for r in 0..dim {
        for c in 0..dim {
            let z = t.matrix[(r, c)];
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let meta = TomographMeta {
        n_dim: dim,
        s: t.s,
        lambda: t.lambda,
        copies: t.copies,
        aborted: t.aborted,
    };
    (bytes, meta)
}

pub fn decode_tomograph(bytes: &[u8], meta: &TomographMeta) -> Result<Tomograph> {
    let header: [u8; 8] = bytes
        .get(..8)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| Error::Codec("missing dimension header".into()))?;
    let dim = usize::try_from(u64::from_le_bytes(header))
        .map_err(|_| Error::Codec("dimension does not fit in usize".into()))?;
    if dim != meta.n_dim {
        return Err(Error::Codec(format!("header dimension {dim} disagrees with sidecar {}", meta.n_dim)));
    }
    let expected = dim
        .checked_mul(dim)
        .and_then(|d| d.checked_mul(16))
        .and_then(|d| d.checked_add(8))
        .ok_or_else(|| Error::Codec("dimension overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::Codec(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let f = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8-byte slice"));
    let matrix = CMatrix::from_fn(dim, dim, |r, c| {
        let off = 8 + 16 * (r * dim + c);
        C64::new(f(off), f(off + 8))
    });
    Ok(Tomograph {
        matrix,
        s: meta.s,
        lambda: meta.lambda,
        copies: meta.copies,
        aborted: meta.aborted,
    })
}

/// Writes `<stem>.bin` and `<stem>.json`.
pub fn write_tomograph(t: &Tomograph, dir: &Path, stem: &str) -> Result<()> {
    let (bytes, meta) = encode_tomograph(t);
    std::fs::write(dir.join(format!("{stem}.bin")), bytes)?;
    std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_vec_pretty(&meta)?)?;
    Ok(())
}

pub fn read_tomograph(dir: &Path, stem: &str) -> Result<Tomograph> {
    let bytes = std::fs::read(dir.join(format!("{stem}.bin")))?;
    let meta: TomographMeta = serde_json::from_slice(&std::fs::read(dir.join(format!("{stem}.json")))?)?;
    decode_tomograph(&bytes, &meta)
}
