//! Checkpoint files: one text header line, then a little-endian binary body.
//!
//! Body layout: magic `ADVMTCKP`, format version (u32), model dimensions
//! (three u64), source and target vocabularies (u32 count, then u32 byte
//! length and UTF-8 bytes per token), tensor count (u32), then per tensor
//! its name, rank (u32), dimensions (u64 each) and f64 data.

use std::io::{Read, Write};
use std::path::Path;

use super::{ModelConfig, ModelParams, ToyModel};
use crate::error::{Error, Result};
use crate::text::{Token, Vocabulary};

pub const MAGIC: &[u8; 8] = b"ADVMTCKP";
pub const FORMAT_VERSION: u32 = 1;

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

fn put_vocab(out: &mut Vec<u8>, v: &Vocabulary) {
    put_u32(out, v.len() as u32);
    for t in v.tokens() {
        put_str(out, t.as_str());
    }
}

/// Serializes `model` after the single-line `header`.
pub fn to_bytes(model: &ToyModel, header: &str) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(header.trim_end_matches('\n').as_bytes());
    out.push(b'\n');
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, FORMAT_VERSION);
    let c = model.params.config();
    for d in [c.d_emb, c.d_hid, c.max_positions] {
        put_u64(&mut out, d as u64);
    }
    put_vocab(&mut out, &model.src_vocab);
    put_vocab(&mut out, &model.tgt_vocab);
    let tensors = model.params.tensors();
    put_u32(&mut out, tensors.len() as u32);
    for (name, (shape, data)) in tensors {
        put_str(&mut out, name);
        put_u32(&mut out, shape.len() as u32);
        for d in shape {
            put_u64(&mut out, d as u64);
        }
        for v in data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.at)))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    fn vocab(&mut self) -> Result<Vocabulary> {
        let n = self.u32()? as usize;
        let mut tokens = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            tokens.push(Token::new(self.string()?)?);
        }
        Vocabulary::from_tokens(tokens)
    }
}

/// Parses a checkpoint, returning the model and its header line.
pub fn from_bytes(bytes: &[u8]) -> Result<(ToyModel, String)> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Checkpoint("missing header line".into()))?;
    let header = String::from_utf8(bytes[..nl].to_vec()).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let mut cur = Cursor { bytes, at: nl + 1 };
    if cur.take(8)? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = cur.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported format version {version}")));
    }
    let config = ModelConfig {
        d_emb: cur.u64()? as usize,
        d_hid: cur.u64()? as usize,
        max_positions: cur.u64()? as usize,
    };
    let src_vocab = cur.vocab()?;
    let tgt_vocab = cur.vocab()?;
    let mut params = ModelParams::zeros(config, src_vocab.len(), tgt_vocab.len());
    let count = cur.u32()? as usize;
    if count != super::TENSOR_NAMES.len() {
        return Err(Error::Checkpoint(format!(
            "expected {} tensors, found {count}",
            super::TENSOR_NAMES.len()
        )));
    }
    let expected: Vec<(&str, Vec<usize>)> = params.tensors().into_iter().map(|(n, (s, _))| (n, s)).collect();
    let mut loaded: Vec<Vec<f64>> = Vec::with_capacity(count);
    for (name, shape) in &expected {
        let got = cur.string()?;
        if got != *name {
            return Err(Error::Checkpoint(format!("expected tensor {name}, found {got}")));
        }
        let rank = cur.u32()? as usize;
        let dims = (0..rank)
            .map(|_| cur.u64().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        if dims != *shape {
            return Err(Error::Checkpoint(format!("{name}: shape {dims:?}, expected {shape:?}")));
        }
        let n: usize = dims.iter().product();
        loaded.push((0..n).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?);
    }
    if cur.at != bytes.len() {
        return Err(Error::Checkpoint("trailing bytes".into()));
    }
    for ((_, dst), src) in params.tensors_mut().into_iter().zip(loaded) {
        dst.copy_from_slice(&src);
    }
    if !params.all_finite() {
        return Err(Error::Checkpoint("non-finite parameter".into()));
    }
    Ok((ToyModel::from_parts(src_vocab, tgt_vocab, params)?, header))
}

pub fn save(path: &Path, model: &ToyModel, header: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&to_bytes(model, header)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<(ToyModel, String)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
