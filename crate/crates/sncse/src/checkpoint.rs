//! Binary checkpoint container.
//!
//! Layout:
//!
//! ```text
//! magic     8 bytes   "SNCSECKP"
//! version   u32 LE
//! hdr_len   u64 LE
//! header    hdr_len bytes of UTF-8 JSON (config, vocabulary, tensor
//!           names and shapes, optimizer step, run metadata)
//! payload   f64 LE values: every parameter tensor in header order, then
//!           the first and second optimizer moments in the same order
//!           when an optimizer is stored
//! ```
//!
//! Values are stored bit-exactly, so a reloaded model scores identically.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sncse_core::encoder::{EncoderConfig, EncoderParams, Vocabulary};
use sncse_core::numerics::{AdamWConfig, OptimizerState, Tensor};
use sncse_core::objectives::Hyperparams;

use crate::error::{write_file, Error, Result};

pub const MAGIC: &[u8; 8] = b"SNCSECKP";
pub const VERSION: u32 = 1;

/// Run details stored alongside the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub mode: String,
    pub hyper: Hyperparams,
    /// Optimizer steps taken when the weights were captured.
    pub step: usize,
    pub dev_rho: Option<f64>,
    pub keep_mlp: bool,
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub params: EncoderParams,
    pub vocab: Vocabulary,
    pub optimizer: Option<OptimizerState>,
    pub meta: CheckpointMeta,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct OptimizerEntry {
    config: AdamWConfig,
    step: u64,
}

#[derive(Serialize, Deserialize)]
struct Header {
    encoder: EncoderConfig,
    vocab: Vec<String>,
    tensors: Vec<TensorEntry>,
    optimizer: Option<OptimizerEntry>,
    meta: CheckpointMeta,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            encoder: self.params.config,
            vocab: self.vocab.tokens().to_vec(),
            tensors: self.params.iter().map(|(n, t)| TensorEntry { name: n.into(), shape: t.shape().to_vec() }).collect(),
            optimizer: self.optimizer.as_ref().map(|o| OptimizerEntry { config: o.config, step: o.step_count() }),
            meta: self.meta.clone(),
        };
        let json = serde_json::to_vec(&header).expect("plain data serializes");
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        let mut push = |ts: &[Tensor]| {
            for t in ts {
                for v in t.data() {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        };
        push(self.params.tensors());
        if let Some(o) = &self.optimizer {
            push(o.first_moments());
            push(o.second_moments());
        }
        out
    }

    /// `path` only labels errors.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |m: &str| Error::Checkpoint { path: path.to_path_buf(), message: m.into() };
        if bytes.len() < 20 || &bytes[..8] != MAGIC {
            return Err(bad("not a checkpoint (bad magic)"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(bad(&format!("unsupported checkpoint version {}", version)));
        }
        let hdr_len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
        let body = &bytes[20..];
        if body.len() < hdr_len {
            return Err(bad("truncated header"));
        }
        let header: Header = serde_json::from_slice(&body[..hdr_len]).map_err(|e| bad(&format!("header: {}", e)))?;
        let mut payload = body[hdr_len..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
        if (body.len() - hdr_len) % 8 != 0 {
            return Err(bad("payload is not a whole number of f64 values"));
        }
        let mut read = |shape: &[usize]| -> Result<Tensor> {
            let n = shape.iter().product();
            let data: Vec<f64> = payload.by_ref().take(n).collect();
            if data.len() != n {
                return Err(bad("truncated payload"));
            }
            Ok(Tensor::new(shape.to_vec(), data)?)
        };
        let mut named = Vec::with_capacity(header.tensors.len());
        for e in &header.tensors {
            named.push((e.name.clone(), read(&e.shape)?));
        }
        let params = EncoderParams::from_named(header.encoder, named)?;
        let optimizer = match &header.optimizer {
            Some(o) => {
                let first = header.tensors.iter().map(|e| read(&e.shape)).collect::<Result<Vec<_>>>()?;
                let second = header.tensors.iter().map(|e| read(&e.shape)).collect::<Result<Vec<_>>>()?;
                Some(OptimizerState::from_parts(o.config, o.step, first, second)?)
            }
            None => None,
        };
        if payload.next().is_some() {
            return Err(bad("trailing data after payload"));
        }
        let vocab = Vocabulary::from_tokens(header.vocab)?;
        if vocab.len() != params.config.vocab_size {
            return Err(bad("vocabulary size does not match the embedding table"));
        }
        Ok(Self { params, vocab, optimizer, meta: header.meta })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sncse_core::encoder::init_params;

    fn sample(with_opt: bool) -> Checkpoint {
        let vocab = Vocabulary::build(["a man plays", "a dog runs"], 1);
        let cfg = EncoderConfig { vocab_size: vocab.len(), dim: 8, heads: 2, layers: 1, ffn_dim: 8, max_len: 16 };
        let params = init_params(3, cfg).unwrap();
        let mut optimizer = None;
        if with_opt {
            let mut o = OptimizerState::new(AdamWConfig::default(), params.tensors()).unwrap();
            let mut p = params.tensors().to_vec();
            let g: Vec<Tensor> = p.iter().map(|t| Tensor::full(t.shape(), 0.5)).collect();
            o.step(&mut p, &g).unwrap();
            optimizer = Some(o);
        }
        let meta = CheckpointMeta { mode: "sncse".into(), hyper: Hyperparams::default(), step: 7, dev_rho: Some(0.25), keep_mlp: false };
        Checkpoint { params, vocab, optimizer, meta }
    }

    #[test]
    fn bytes_round_trip() {
        for with_opt in [false, true] {
            let c = sample(with_opt);
            let back = Checkpoint::from_bytes(&c.to_bytes(), Path::new("x")).unwrap();
            assert!(back.params.bitwise_eq(&c.params));
            assert_eq!(back.vocab, c.vocab);
            assert_eq!(back.meta, c.meta);
            assert_eq!(back.optimizer, c.optimizer);
        }
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let bytes = sample(true).to_bytes();
        let p = Path::new("x");
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 8], p).is_err());
        let mut extra = bytes.clone();
        extra.extend_from_slice(&0f64.to_le_bytes());
        assert!(Checkpoint::from_bytes(&extra, p).is_err());
        let mut wrong = bytes.clone();
        wrong[8] = 9;
        assert!(Checkpoint::from_bytes(&wrong, p).unwrap_err().to_string().contains("version 9"));
        assert!(Checkpoint::from_bytes(b"hello", p).is_err());
    }
}
