//! Finite-difference checks of every objective and of the full
//! encoder-to-loss pipeline on small random instances.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::encoder::{init_params, EncodeOptions, EncodedBatch, EncoderConfig, EncoderParams, Prompted, PromptedTriplet, Vocabulary};
use crate::error::Result;
use crate::numerics::{grad_check, Tensor};
use crate::objectives::{bml_loss, deltas, deltas_with_grad, infonce_loss, nl_loss, pl_loss, sncse_loss, Hyperparams, LossGrad};
use crate::rng::{derive_index, rng_from, Rng, SeedStream};

/// Minimum distance of every gap from the margin-loss kinks.
pub const KINK_CLEARANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub step: f64,
    pub max_batch: usize,
    pub max_dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { trials: 10, seed: 42, step: 1e-6, max_batch: 4, max_dim: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckResult {
    pub name: String,
    /// Largest relative error over all trials.
    pub max_error: f64,
    pub trials: usize,
}

fn hyper() -> Hyperparams {
    // a large weight keeps the margin term visible next to InfoNCE
    Hyperparams { lambda: 1.0, ..Hyperparams::default() }
}

fn clear_of_kinks(ds: &[f64], h: &Hyperparams) -> bool {
    ds.iter().all(|d| (d + h.alpha).abs() >= KINK_CLEARANCE && (d + h.beta).abs() >= KINK_CLEARANCE)
}

fn random_matrix(rng: &mut Rng, n: usize, d: usize) -> Tensor {
    Tensor::matrix(n, d, (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("sizes agree")
}

/// Anchor, positive and soft-negative rows stacked into one `[3n, d]` point.
fn stack(parts: [&Tensor; 3]) -> Tensor {
    let n = parts[0].rows();
    let d = parts[0].cols();
    let data = parts.iter().flat_map(|t| t.data().iter().copied()).collect();
    Tensor::matrix(3 * n, d, data).expect("sizes agree")
}

fn unstack(t: &Tensor) -> Result<[Tensor; 3]> {
    let n = t.rows() / 3;
    let d = t.cols();
    let part = |k: usize| Tensor::matrix(n, d, t.data()[k * n * d..(k + 1) * n * d].to_vec());
    Ok([part(0)?, part(1)?, part(2)?])
}

fn stacked_grad(g: &LossGrad, n: usize, d: usize) -> Tensor {
    let zeros = Tensor::zeros(&[n, d]);
    stack([&g.anchor, &g.positive, g.soft_negative.as_ref().unwrap_or(&zeros)])
}

/// Margin loss as a function of the embeddings.
fn bml_of(h: &Tensor, hp: &Tensor, hn: &Tensor, hy: &Hyperparams) -> Result<LossGrad> {
    let (ds, [da, dp, dn]) = deltas_with_grad(h, hp, hn)?;
    let (value, w) = bml_loss(&ds, hy.alpha, hy.beta)?;
    let scale = |m: &Tensor| {
        let d = m.cols();
        let data = m.data().iter().enumerate().map(|(k, v)| v * w[k / d]).collect();
        Tensor::matrix(m.rows(), d, data)
    };
    Ok(LossGrad { value, anchor: scale(&da)?, positive: scale(&dp)?, soft_negative: Some(scale(&dn)?) })
}

type LossFn = fn(&Tensor, &Tensor, &Tensor, &Hyperparams) -> Result<LossGrad>;

fn losses() -> [(&'static str, LossFn); 5] {
    [
        ("infonce", |h, hp, _, hy| infonce_loss(h, hp, hy.tau)),
        ("bml", bml_of),
        ("sncse_total", |h, hp, hn, hy| Ok(sncse_loss(h, hp, hn, hy)?.grads)),
        ("pl", |h, hp, hn, hy| pl_loss(h, hp, hn, hy.tau)),
        ("nl", |h, hp, hn, hy| nl_loss(h, hp, hn, hy.tau)),
    ]
}

/// Checks one loss on `cfg.trials` random instances.
pub fn check_loss(name: &str, cfg: &SuiteConfig) -> Result<Option<CheckResult>> {
    let Some((_, f)) = losses().into_iter().find(|(n, _)| *n == name) else {
        return Ok(None);
    };
    let hy = hyper();
    let mut rng = SeedStream::new(cfg.seed).rng(name);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials {
        let (h, hp, hn) = loop {
            let n = rng.random_range(2..=cfg.max_batch.max(2));
            let d = rng.random_range(2..=cfg.max_dim.max(2));
            let (a, b, c) = (random_matrix(&mut rng, n, d), random_matrix(&mut rng, n, d), random_matrix(&mut rng, n, d));
            if clear_of_kinks(&deltas(&a, &b, &c)?, &hy) {
                break (a, b, c);
            }
        };
        let (n, d) = (h.rows(), h.cols());
        let point = stack([&h, &hp, &hn]);
        let err = grad_check(
            |p: &Tensor| {
                let [a, b, c] = unstack(p)?;
                let g = f(&a, &b, &c, &hy)?;
                Ok((Tensor::scalar(g.value), stacked_grad(&g, n, d)))
            },
            &point,
            cfg.step,
        )?;
        worst = worst.max(err);
    }
    Ok(Some(CheckResult { name: name.into(), max_error: worst, trials: cfg.trials }))
}

const PIPELINE_TEXTS: [(&str, &str); 4] = [
    ("a man plays a guitar", "a man does not play a guitar"),
    ("the cat sleeps", "the cat does not sleep"),
    ("kids ran home", "kids did not run home"),
    ("she is happy", "she is not happy"),
];

fn flatten(params: &EncoderParams) -> Tensor {
    Tensor::vector(params.tensors().iter().flat_map(|t| t.data().iter().copied()).collect())
}

fn unflatten(template: &EncoderParams, flat: &Tensor) -> EncoderParams {
    let mut p = template.clone();
    let mut at = 0;
    for t in p.tensors_mut() {
        let n = t.len();
        t.data_mut().copy_from_slice(&flat.data()[at..at + n]);
        at += n;
    }
    p
}

/// Total SNCSE loss of a tiny encoder over `triplets` with fixed dropout
/// seeds, with the gradient for every parameter flattened in order.
fn pipeline_loss(params: &EncoderParams, triplets: &[PromptedTriplet], seeds: &[u64], hy: &Hyperparams) -> Result<(f64, Tensor, Vec<f64>)> {
    let n = triplets.len();
    let mut seqs: Vec<Prompted> = triplets.iter().map(|t| t.original.clone()).collect();
    seqs.extend(triplets.iter().map(|t| t.positive.clone()));
    seqs.extend(triplets.iter().map(|t| t.soft_negative.clone().expect("pipeline triplets carry negations")));
    let run = EncodedBatch::run(params, &seqs, seeds, EncodeOptions::train(hy.dropout))?;
    let [h, hp, hn] = unstack(run.embeddings()?)?;
    let loss = sncse_loss(&h, &hp, &hn, hy)?;
    let upstream = stacked_grad(&loss.grads, n, h.cols());
    let grads = run.backward(&upstream)?;
    let flat = params.iter().flat_map(|(name, t)| match grads.get(name) {
        Some(g) => g.data().to_vec(),
        None => alloc::vec![0.0; t.len()],
    });
    Ok((loss.total, Tensor::vector(flat.collect()), loss.deltas))
}

/// Checks the encoder-to-loss gradient for every parameter on random
/// initializations of a small encoder with dropout active.
pub fn check_pipeline(cfg: &SuiteConfig) -> Result<CheckResult> {
    let hy = hyper();
    let texts = PIPELINE_TEXTS.iter().flat_map(|(a, b)| [*a, *b]);
    let vocab = Vocabulary::build(texts, 1);
    let dim = cfg.max_dim.clamp(2, 8) & !1;
    let ecfg = EncoderConfig { vocab_size: vocab.len(), dim, heads: 2, layers: 2, ffn_dim: dim, max_len: 16 };
    let all: Vec<PromptedTriplet> = PIPELINE_TEXTS
        .iter()
        .map(|(a, b)| PromptedTriplet::new(a, Some(b), &vocab))
        .collect::<Result<_>>()?;
    let stream = SeedStream::new(cfg.seed).substream("pipeline");
    let mut worst: f64 = 0.0;
    let mut trial = 0u64;
    let mut done = 0;
    while done < cfg.trials {
        trial += 1;
        let mut rng = rng_from(derive_index(stream.seed("instance"), trial));
        let n = rng.random_range(2..=cfg.max_batch.clamp(2, all.len()));
        let triplets = &all[..n];
        let params = init_params(derive_index(stream.seed("init"), trial), ecfg)?;
        let seeds: Vec<u64> = (0..3 * n).map(|_| rng.random()).collect();
        let (_, _, ds) = pipeline_loss(&params, triplets, &seeds, &hy)?;
        if !clear_of_kinks(&ds, &hy) {
            continue;
        }
        let err = grad_check(
            |flat: &Tensor| {
                let p = unflatten(&params, flat);
                let (v, g, _) = pipeline_loss(&p, triplets, &seeds, &hy)?;
                Ok((Tensor::scalar(v), g))
            },
            &flatten(&params),
            cfg.step,
        )?;
        worst = worst.max(err);
        done += 1;
    }
    Ok(CheckResult { name: "encoder_sncse".into(), max_error: worst, trials: cfg.trials })
}

/// Names of the checks run by [`run_suite`], in order.
pub const CHECKS: [&str; 6] = ["infonce", "bml", "sncse_total", "pl", "nl", "encoder_sncse"];

pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let mut out = Vec::with_capacity(CHECKS.len());
    for name in &CHECKS[..5] {
        out.push(check_loss(name, cfg)?.expect("known loss"));
    }
    out.push(check_pipeline(cfg)?);
    Ok(out)
}
