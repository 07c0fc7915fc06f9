use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use super::template::MAX_LEN;
use crate::error::{Error, Result};
use crate::numerics::Tensor;
use crate::rng::rng_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EncoderConfig {
    pub vocab_size: usize,
    pub dim: usize,
    pub heads: usize,
    pub layers: usize,
    pub ffn_dim: usize,
    pub max_len: usize,
}

impl EncoderConfig {
    /// The reference architecture: 2 layers, width 64, 4 heads.
    pub fn standard(vocab_size: usize) -> Self {
        Self { vocab_size, dim: 64, heads: 4, layers: 2, ffn_dim: 128, max_len: MAX_LEN }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [self.vocab_size, self.dim, self.heads, self.layers, self.ffn_dim, self.max_len];
        if dims.contains(&0) {
            return Err(Error::Config(format!("encoder dimensions must be positive: {:?}", self)));
        }
        if self.dim % self.heads != 0 {
            return Err(Error::Config(format!(
                "model width {} is not divisible by {} heads",
                self.dim, self.heads
            )));
        }
        if self.vocab_size < 3 {
            return Err(Error::Config("vocabulary must hold the reserved tokens".into()));
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.dim / self.heads
    }

    /// Parameter names and shapes in their canonical order.
    pub fn layout(&self) -> Vec<(String, Vec<usize>)> {
        let d = self.dim;
        let mut out = Vec::new();
        out.push((String::from("tok_emb"), alloc::vec![self.vocab_size, d]));
        out.push((String::from("pos_emb"), alloc::vec![self.max_len, d]));
        for l in 0..self.layers {
            for (n, shape) in [
                ("wq", alloc::vec![d, d]),
                ("bq", alloc::vec![d]),
                ("wk", alloc::vec![d, d]),
                ("bk", alloc::vec![d]),
                ("wv", alloc::vec![d, d]),
                ("bv", alloc::vec![d]),
                ("wo", alloc::vec![d, d]),
                ("bo", alloc::vec![d]),
                ("w1", alloc::vec![d, self.ffn_dim]),
                ("b1", alloc::vec![self.ffn_dim]),
                ("w2", alloc::vec![self.ffn_dim, d]),
                ("b2", alloc::vec![d]),
            ] {
                out.push((format!("l{}.{}", l, n), shape));
            }
        }
        out.push((String::from("mlp.w"), alloc::vec![d, d]));
        out.push((String::from("mlp.b"), alloc::vec![d]));
        out
    }
}

/// All encoder weights as an ordered list of named tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub config: EncoderConfig,
    names: Vec<String>,
    tensors: Vec<Tensor>,
}

impl EncoderParams {
    /// Assembles parameters from named tensors, checking them against the
    /// layout implied by `config`.
    pub fn from_named(config: EncoderConfig, named: Vec<(String, Tensor)>) -> Result<Self> {
        config.validate()?;
        let layout = config.layout();
        if layout.len() != named.len() {
            return Err(Error::Config(format!("expected {} tensors, got {}", layout.len(), named.len())));
        }
        let mut names = Vec::with_capacity(named.len());
        let mut tensors = Vec::with_capacity(named.len());
        for ((want_name, want_shape), (name, t)) in layout.into_iter().zip(named) {
            if want_name != name || want_shape.as_slice() != t.shape() {
                return Err(Error::Config(format!(
                    "expected {} {:?}, got {} {:?}",
                    want_name,
                    want_shape,
                    name,
                    t.shape()
                )));
            }
            if !t.is_finite() {
                return Err(Error::NonFinite(format!("parameter {}", name)));
            }
            names.push(name);
            tensors.push(t);
        }
        Ok(Self { config, names, tensors })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.names.iter().position(|n| n == name).map(|i| &self.tensors[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.names.iter().map(String::as_str).zip(&self.tensors)
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(Tensor::is_finite)
    }

    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.names == other.names
            && self.tensors.iter().zip(&other.tensors).all(|(a, b)| a.bitwise_eq(b))
    }
}

/// Seeded initialization: embeddings uniform in `±1/sqrt(dim)`, weight
/// matrices normal with standard deviation `1/sqrt(fan_in)`, biases zero.
pub fn init_params(seed: u64, config: EncoderConfig) -> Result<EncoderParams> {
    config.validate()?;
    let mut rng = rng_from(seed);
    let bound = 1.0 / libm::sqrt(config.dim as f64);
    let mut named = Vec::new();
    for (name, shape) in config.layout() {
        let n: usize = shape.iter().product();
        let data: Vec<f64> = if name.ends_with("_emb") {
            (0..n).map(|_| rng.random_range(-bound..bound)).collect()
        } else if shape.len() == 2 {
            let std = 1.0 / libm::sqrt(shape[0] as f64);
            let normal = Normal::new(0.0, std).map_err(|e| Error::Config(format!("{e}")))?;
            (0..n).map(|_| normal.sample(&mut rng)).collect()
        } else {
            alloc::vec![0.0; n]
        };
        named.push((name, Tensor::new(shape, data)?));
    }
    EncoderParams::from_named(config, named)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_params() {
        let c = EncoderConfig::standard(50);
        assert!(init_params(7, c).unwrap().bitwise_eq(&init_params(7, c).unwrap()));
        assert!(!init_params(7, c).unwrap().bitwise_eq(&init_params(8, c).unwrap()));
    }

    #[test]
    fn head_count_must_divide_width() {
        let c = EncoderConfig { heads: 5, ..EncoderConfig::standard(50) };
        assert!(matches!(init_params(1, c), Err(Error::Config(_))));
    }

    #[test]
    fn embedding_rows_match_vocab() {
        let p = init_params(1, EncoderConfig::standard(123)).unwrap();
        assert_eq!(p.get("tok_emb").unwrap().shape(), &[123, 64]);
        assert_eq!(p.get("pos_emb").unwrap().shape(), &[64, 64]);
        assert_eq!(p.names().len(), 2 + 2 * 12 + 2);
    }
}
