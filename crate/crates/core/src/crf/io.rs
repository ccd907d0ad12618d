//! Binary model container.
//!
//! ```text
//! magic      7 bytes   "CRFSEQ1"
//! version    u32 LE
//! length     u64 LE    payload byte count
//! payload    labels, feature alphabet, l2_sigma, metadata,
//!            feature config (key=value text), gazetteers, weights
//! checksum   32 bytes  SHA-256 of every preceding byte
//! ```
//!
//! Strings are a u32 byte length followed by UTF-8; floats are IEEE-754 bits, LE.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::gazetteer::Gazetteer;

use super::{num_params, FeatureIndex, Model, TrainMetadata};

pub const MAGIC: &[u8; 7] = b"CRFSEQ1";
pub const FORMAT_VERSION: u32 = 1;

const HEADER_LEN: usize = MAGIC.len() + 4 + 8;
const CHECKSUM_LEN: usize = 32;

#[derive(Default)]
struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    fn len(&mut self, n: usize) {
        self.u32(u32::try_from(n).expect("collection too large for the model format"));
    }

    fn str(&mut self, s: &str) {
        self.len(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }
}

struct Decoder<'a> {
    buf: &'a [u8],
}

impl<'a> Decoder<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Corrupt("payload ends early".into()));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn len(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    fn str(&mut self) -> Result<String> {
        let n = self.len()?;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| Error::Corrupt("string is not UTF-8".into()))
    }

    fn strings(&mut self) -> Result<Vec<String>> {
        let n = self.len()?;
        (0..n).map(|_| self.str()).collect()
    }
}

fn encode_payload(model: &Model) -> Vec<u8> {
    let mut e = Encoder::default();
    e.len(model.labels.len());
    model.labels.iter().for_each(|l| e.str(l));
    e.len(model.features.len());
    model.features.names().iter().for_each(|f| e.str(f));
    e.f64(model.l2_sigma);
    e.u32(model.metadata.iterations);
    e.f64(model.metadata.final_objective);
    e.u64(model.metadata.config_hash);
    e.str(&model.feature_config.to_kv_string());
    e.len(model.gazetteers.len());
    for g in &model.gazetteers {
        e.str(g.name());
        e.u8(g.fold_case() as u8);
        e.len(g.len());
        for entry in g.entries() {
            e.len(entry.len());
            entry.iter().for_each(|t| e.str(t));
        }
    }
    e.u64(model.weights.len() as u64);
    model.weights.iter().for_each(|w| e.f64(*w));
    e.buf
}

fn decode_payload(payload: &[u8]) -> Result<Model> {
    let mut d = Decoder { buf: payload };
    let labels = d.strings()?;
    let features = FeatureIndex::new(d.strings()?).map_err(|e| Error::Corrupt(e.to_string()))?;
    let l2_sigma = d.f64()?;
    let metadata = TrainMetadata {
        iterations: d.u32()?,
        final_objective: d.f64()?,
        config_hash: d.u64()?,
    };
    let feature_config =
        FeatureConfig::from_kv_str(&d.str()?).map_err(|e| Error::Corrupt(e.to_string()))?;
    let num_gaz = d.len()?;
    let mut gazetteers = Vec::with_capacity(num_gaz);
    for _ in 0..num_gaz {
        let name = d.str()?;
        let fold_case = d.u8()? != 0;
        let num_entries = d.len()?;
        let mut lines = Vec::with_capacity(num_entries);
        for _ in 0..num_entries {
            lines.push(d.strings()?.join(" "));
        }
        let g = Gazetteer::from_lines(name, lines, fold_case)
            .map_err(|e| Error::Corrupt(e.to_string()))?;
        if g.len() != num_entries {
            return Err(Error::Corrupt("gazetteer entries are not canonical".into()));
        }
        gazetteers.push(g);
    }
    let num_weights = d.u64()? as usize;
    if num_weights != num_params(features.len(), labels.len()) {
        return Err(Error::Corrupt(format!(
            "{num_weights} weights for {} features and {} labels",
            features.len(),
            labels.len()
        )));
    }
    let weights = (0..num_weights).map(|_| d.f64()).collect::<Result<Vec<_>>>()?;
    if !d.buf.is_empty() {
        return Err(Error::Corrupt("trailing bytes after weights".into()));
    }

    let mut model = Model::new(labels, features, feature_config, gazetteers)
        .map_err(|e| Error::Corrupt(e.to_string()))?;
    model.set_l2_sigma(l2_sigma).map_err(|e| Error::Corrupt(e.to_string()))?;
    model.weights = weights;
    model.metadata = metadata;
    Ok(model)
}

pub fn write_model<W: Write>(model: &Model, out: &mut W) -> std::io::Result<()> {
    let payload = encode_payload(model);
    let mut bytes = Vec::with_capacity(HEADER_LEN + payload.len() + CHECKSUM_LEN);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&payload);
    let digest = Sha256::digest(&bytes);
    bytes.extend_from_slice(&digest);
    out.write_all(&bytes)
}

pub fn read_model<R: Read>(input: &mut R) -> Result<Model> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

fn decode(bytes: &[u8]) -> Result<Model> {
    if bytes.len() < MAGIC.len() {
        return Err(if MAGIC.starts_with(bytes) {
            Error::Truncated
        } else {
            Error::BadMagic
        });
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated);
    }
    let version = u32::from_le_bytes(bytes[7..11].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let payload_len = u64::from_le_bytes(bytes[11..HEADER_LEN].try_into().unwrap());
    let total = (HEADER_LEN as u64)
        .checked_add(payload_len)
        .and_then(|n| n.checked_add(CHECKSUM_LEN as u64))
        .ok_or(Error::Truncated)?;
    if (bytes.len() as u64) < total {
        return Err(Error::Truncated);
    }
    if bytes.len() as u64 > total {
        return Err(Error::Corrupt("trailing bytes after checksum".into()));
    }
    let body_end = HEADER_LEN + payload_len as usize;
    let digest = Sha256::digest(&bytes[..body_end]);
    if digest.as_slice() != &bytes[body_end..] {
        return Err(Error::ChecksumMismatch);
    }
    decode_payload(&bytes[HEADER_LEN..body_end])
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
