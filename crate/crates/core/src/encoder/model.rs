use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::params::EncoderParams;
use super::template::Prompted;
use crate::error::{Error, Result};
use crate::numerics::{Axis, Gradients, Graph, NodeId, Tensor};

/// Added to attention scores of padded keys; `exp` of it underflows to 0.
const MASKED_SCORE: f64 = -1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// `tanh(W h_mask + b)`, the training-time readout.
    Projected,
    /// The raw hidden state at the mask slot.
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeOptions {
    pub training: bool,
    pub dropout: f64,
    /// Keep the projection layer at evaluation time.
    pub keep_mlp: bool,
}

impl EncodeOptions {
    pub fn train(dropout: f64) -> Self {
        Self { training: true, dropout, keep_mlp: true }
    }

    pub fn eval() -> Self {
        Self { training: false, dropout: 0.0, keep_mlp: false }
    }

    pub fn readout(&self) -> Readout {
        if self.training || self.keep_mlp {
            Readout::Projected
        } else {
            Readout::Hidden
        }
    }

    fn dropout_active(&self) -> bool {
        self.training && self.dropout > 0.0
    }
}

/// An evaluated encoder graph whose output rows are the sentence embeddings.
#[derive(Debug)]
pub struct EncodedBatch {
    graph: Graph,
    output: NodeId,
}

impl EncodedBatch {
    /// Builds and runs the encoder over `seqs`, padded to a common length.
    ///
    /// `seeds` holds one dropout seed per sequence and is only consulted
    /// when dropout is active.
    pub fn run(params: &EncoderParams, seqs: &[Prompted], seeds: &[u64], opts: EncodeOptions) -> Result<Self> {
        let (graph, output) = build(params, seqs, seeds, opts)?;
        let mut batch = Self { graph, output };
        let feeds: Vec<(&str, &Tensor)> = params.iter().collect();
        batch.graph.forward(&feeds)?;
        Ok(batch)
    }

    /// `[batch, dim]` embeddings.
    pub fn embeddings(&self) -> Result<&Tensor> {
        self.graph.value(self.output)
    }

    /// Parameter gradients for an upstream gradient on the embeddings.
    pub fn backward(&self, upstream: &Tensor) -> Result<Gradients> {
        self.graph.backward(self.output, upstream)
    }

    pub fn node_count(&self) -> usize {
        self.graph.len()
    }
}

/// Embeds a batch of prompted sentences.
pub fn encode(params: &EncoderParams, seqs: &[Prompted], seeds: &[u64], opts: EncodeOptions) -> Result<Tensor> {
    Ok(EncodedBatch::run(params, seqs, seeds, opts)?.embeddings()?.clone())
}

fn build(params: &EncoderParams, seqs: &[Prompted], seeds: &[u64], opts: EncodeOptions) -> Result<(Graph, NodeId)> {
    let cfg = params.config;
    if seqs.is_empty() {
        return Err(Error::Input("cannot encode an empty batch".into()));
    }
    if opts.dropout_active() && seeds.len() != seqs.len() {
        return Err(Error::Contract(format!("{} dropout seeds for {} sequences", seeds.len(), seqs.len())));
    }
    let len = seqs.iter().map(|s| s.ids.len()).max().unwrap_or(0);
    if len > cfg.max_len {
        return Err(Error::Contract(format!("sequence of length {} exceeds {}", len, cfg.max_len)));
    }
    for (b, s) in seqs.iter().enumerate() {
        if s.mask_pos >= s.ids.len() {
            return Err(Error::Contract(format!(
                "mask position {} out of range for sequence {} of length {}",
                s.mask_pos,
                b,
                s.ids.len()
            )));
        }
        if let Some(&bad) = s.ids.iter().find(|&&i| i >= cfg.vocab_size) {
            return Err(Error::Contract(format!("token id {} outside vocabulary of {}", bad, cfg.vocab_size)));
        }
    }

    let batch = seqs.len();
    let dh = cfg.head_dim();
    let inv_sqrt = 1.0 / libm::sqrt(dh as f64);
    let mut g = Graph::new();
    let p = |g: &mut Graph, name: &str| g.input(name, true);

    let mut ids = Vec::with_capacity(batch * len);
    let mut positions = Vec::with_capacity(batch * len);
    for s in seqs {
        ids.extend_from_slice(&s.ids);
        ids.extend(core::iter::repeat(0).take(len - s.ids.len()));
        positions.extend(0..len);
    }
    let tok_table = p(&mut g, "tok_emb");
    let pos_table = p(&mut g, "pos_emb");
    let tok = g.gather(tok_table, ids);
    let pos = g.gather(pos_table, positions);
    let mut x = g.add(tok, pos);

    let mut site = 0u64;
    let seeds = seeds.to_vec();
    let drop = |g: &mut Graph, node: NodeId, site: &mut u64| {
        *site += 1;
        if opts.dropout_active() {
            g.dropout(node, opts.dropout, seeds.clone(), *site)
        } else {
            node
        }
    };
    x = drop(&mut g, x, &mut site);

    // key masks: 0 for real tokens, MASKED_SCORE for padding
    let key_mask = |q_rows: usize, real: usize| {
        let mut m = vec![0.0; q_rows * len];
        for r in 0..q_rows {
            m[r * len + real..(r + 1) * len].fill(MASKED_SCORE);
        }
        Tensor::matrix(q_rows, len, m)
    };
    let full_masks: Vec<Option<NodeId>> = seqs
        .iter()
        .map(|s| (s.ids.len() < len).then(|| key_mask(len, s.ids.len())).transpose())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|m| m.map(|t| g.constant(t)))
        .collect();
    let row_masks: Vec<Option<NodeId>> = seqs
        .iter()
        .map(|s| (s.ids.len() < len).then(|| key_mask(1, s.ids.len())).transpose())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|m| m.map(|t| g.constant(t)))
        .collect();

    for layer in 0..cfg.layers {
        let last = layer + 1 == cfg.layers;
        let name = |n: &str| format!("l{}.{}", layer, n);
        let (wq, bq) = (p(&mut g, &name("wq")), p(&mut g, &name("bq")));
        let (wk, bk) = (p(&mut g, &name("wk")), p(&mut g, &name("bk")));
        let (wv, bv) = (p(&mut g, &name("wv")), p(&mut g, &name("bv")));
        let (wo, bo) = (p(&mut g, &name("wo")), p(&mut g, &name("bo")));
        let (w1, b1) = (p(&mut g, &name("w1")), p(&mut g, &name("b1")));
        let (w2, b2) = (p(&mut g, &name("w2")), p(&mut g, &name("b2")));

        // only the mask rows matter after the last layer
        let (query_src, q_rows) = if last {
            let rows = seqs.iter().enumerate().map(|(b, s)| b * len + s.mask_pos).collect();
            (g.gather(x, rows), 1)
        } else {
            (x, len)
        };
        let qm = g.matmul(query_src, wq);
        let q = g.add_row(qm, bq);
        let km = g.matmul(x, wk);
        let k = g.add_row(km, bk);
        let vm = g.matmul(x, wv);
        let v = g.add_row(vm, bv);

        let attn_site = {
            site += 1;
            site
        };
        let mut per_seq = Vec::with_capacity(batch);
        for b in 0..batch {
            let mut heads = Vec::with_capacity(cfg.heads);
            for h in 0..cfg.heads {
                let cols = h * dh..(h + 1) * dh;
                let qh = g.slice(q, b * q_rows..(b + 1) * q_rows, cols.clone());
                let kh = g.slice(k, b * len..(b + 1) * len, cols.clone());
                let vh = g.slice(v, b * len..(b + 1) * len, cols);
                let raw = g.matmul_nt(qh, kh);
                let mut scores = g.scale(raw, inv_sqrt);
                let mask = if last { row_masks[b] } else { full_masks[b] };
                if let Some(m) = mask {
                    scores = g.add(scores, m);
                }
                let mut probs = g.softmax(scores);
                if opts.dropout_active() {
                    let s = crate::rng::derive_index(seeds[b], h as u64);
                    probs = g.dropout(probs, opts.dropout, vec![s], attn_site);
                }
                heads.push(g.matmul(probs, vh));
            }
            per_seq.push(g.concat(heads, Axis::Cols));
        }
        let merged = g.concat(per_seq, Axis::Rows);
        let om = g.matmul(merged, wo);
        let mut attn_out = g.add_row(om, bo);
        attn_out = drop(&mut g, attn_out, &mut site);
        let x1 = g.add(query_src, attn_out);

        let f1 = g.matmul(x1, w1);
        let f1 = g.add_row(f1, b1);
        let f1 = g.relu(f1);
        let f2 = g.matmul(f1, w2);
        let mut ff = g.add_row(f2, b2);
        ff = drop(&mut g, ff, &mut site);
        x = g.add(x1, ff);
    }

    let out = match opts.readout() {
        Readout::Hidden => x,
        Readout::Projected => {
            let w = p(&mut g, "mlp.w");
            let bias = p(&mut g, "mlp.b");
            let z = g.matmul(x, w);
            let z = g.add_row(z, bias);
            g.tanh(z)
        }
    };
    // feed every parameter even if this readout does not use the MLP
    for (name, _) in params.iter() {
        g.input(name, true);
    }
    Ok((g, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{apply_template, init_params, EncoderConfig, TemplateVariant, Vocabulary};
    use crate::numerics::grad_check;
    use crate::objectives::cosine_similarity;

    fn setup() -> (Vocabulary, EncoderParams) {
        let vocab = Vocabulary::build(["a man is playing a guitar", "a woman is slicing an onion", "a cat sleeps"], 1);
        let params = init_params(3, EncoderConfig::standard(vocab.len())).unwrap();
        (vocab, params)
    }

    fn prompt(v: &Vocabulary, s: &str) -> Prompted {
        apply_template(s, TemplateVariant::Original, v).unwrap()
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let (v, p) = setup();
        let s = [prompt(&v, "a man is playing a guitar")];
        let a = encode(&p, &s, &[11], EncodeOptions::train(0.1)).unwrap();
        let b = encode(&p, &s, &[11], EncodeOptions::train(0.1)).unwrap();
        assert!(a.bitwise_eq(&b));
    }

    #[test]
    fn different_dropout_seeds_give_different_views() {
        let (v, p) = setup();
        let s = [prompt(&v, "a man is playing a guitar")];
        let a = encode(&p, &s, &[11], EncodeOptions::train(0.1)).unwrap();
        let b = encode(&p, &s, &[12], EncodeOptions::train(0.1)).unwrap();
        let c = cosine_similarity(a.row(0), b.row(0)).unwrap();
        assert!(c < 1.0 - 1e-9, "{c}");
    }

    #[test]
    fn eval_mode_ignores_dropout_seed() {
        let (v, p) = setup();
        let s = [prompt(&v, "a cat sleeps")];
        let opts = EncodeOptions { training: false, dropout: 0.1, keep_mlp: false };
        let a = encode(&p, &s, &[1], opts).unwrap();
        let b = encode(&p, &s, &[2], opts).unwrap();
        assert!(a.bitwise_eq(&b));
        assert_eq!(a.shape(), &[1, 64]);
    }

    #[test]
    fn padding_and_batch_order_do_not_leak() {
        let (v, p) = setup();
        let short = prompt(&v, "a cat sleeps");
        let long = prompt(&v, "a woman is slicing an onion and a man is playing a guitar");
        let opts = EncodeOptions::eval();
        let alone = encode(&p, std::slice::from_ref(&short), &[], opts).unwrap();
        let padded = encode(&p, &[short.clone(), long.clone()], &[], opts).unwrap();
        assert_eq!(alone.row(0), padded.row(0));
        let swapped = encode(&p, &[long, short], &[], opts).unwrap();
        assert_eq!(padded.row(0), swapped.row(1));
        assert_eq!(padded.row(1), swapped.row(0));
    }

    #[test]
    fn training_permutation_equivariance_with_dropout() {
        let (v, p) = setup();
        let a = prompt(&v, "a cat sleeps");
        let b = prompt(&v, "a man is playing a guitar");
        let o = EncodeOptions::train(0.1);
        let x = encode(&p, &[a.clone(), b.clone()], &[5, 9], o).unwrap();
        let y = encode(&p, &[b, a], &[9, 5], o).unwrap();
        assert_eq!(x.row(0), y.row(1));
        assert_eq!(x.row(1), y.row(0));
    }

    #[test]
    fn bad_mask_position_is_contract_error() {
        let (v, p) = setup();
        let mut s = prompt(&v, "a cat sleeps");
        s.mask_pos = 99;
        assert!(matches!(encode(&p, &[s], &[], EncodeOptions::eval()), Err(Error::Contract(_))));
    }

    #[test]
    fn projected_readout_is_nonzero() {
        let (v, p) = setup();
        let e = encode(&p, &[prompt(&v, "a cat sleeps")], &[1], EncodeOptions::train(0.1)).unwrap();
        assert!(e.norm() > 1e-6);
        assert!(e.data().iter().all(|x| x.abs() < 1.0));
    }

    #[test]
    fn small_encoder_gradient_matches_finite_differences() {
        let vocab = Vocabulary::build(["a b c d"], 1);
        let cfg = EncoderConfig { vocab_size: vocab.len(), dim: 8, heads: 2, layers: 2, ffn_dim: 8, max_len: 16 };
        let params = init_params(5, cfg).unwrap();
        let seqs = [prompt(&vocab, "a b"), prompt(&vocab, "c d a")];
        let upstream = Tensor::matrix(2, 8, (0..16).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3).collect()).unwrap();
        for target in ["l0.wq", "l1.w1", "tok_emb", "mlp.w", "pos_emb"] {
            let idx = params.names().iter().position(|n| n == target).unwrap();
            let point = params.tensors()[idx].clone();
            let err = grad_check(
                |t: &Tensor| {
                    let mut p = params.clone();
                    p.tensors_mut()[idx] = t.clone();
                    let run = EncodedBatch::run(&p, &seqs, &[], EncodeOptions { keep_mlp: true, ..EncodeOptions::eval() })?;
                    let e = run.embeddings()?;
                    let value: f64 = e.data().iter().zip(upstream.data()).map(|(a, b)| a * b).sum();
                    let grads = run.backward(&upstream)?;
                    Ok((Tensor::scalar(value), grads[target].clone()))
                },
                &point,
                1e-6,
            )
            .unwrap();
            assert!(err < 1e-6, "{target}: {err}");
        }
    }
}
