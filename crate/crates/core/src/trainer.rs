//! Training loop and hyperparameter sweep.
//!
//! Each step encodes the anchors, positives and (when negations are
//! available) soft negatives of a batch in one graph, evaluates the selected
//! objective on the embeddings, pushes the embedding gradients back through
//! the encoder and takes a clipped AdamW step. The soft negatives are encoded
//! in every mode so that the mode only changes the loss, never the forward
//! pass or the random draws.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::data::{batch_triplets, prompt_all, StsPair, TripletBatch};
use crate::encoder::{init_params, EncodeOptions, EncodedBatch, EncoderConfig, EncoderParams, Prompted, PromptedTriplet, Vocabulary};
use crate::error::{Error, Result};
use crate::evaluation::evaluate;
use crate::numerics::{AdamWConfig, OptimizerState, Tensor};
use crate::objectives::{bml_loss, deltas, infonce_loss, nl_loss, pl_loss, sncse_loss, Hyperparams, LossGrad};
use crate::rng::{derive_index, SeedStream};

/// Which objective drives the updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LossMode {
    /// InfoNCE plus the weighted bidirectional margin loss.
    Sncse,
    /// InfoNCE alone; soft negatives are ignored.
    InfoNce,
    /// Soft negative treated as a second positive.
    Pl,
    /// Soft negative added to the InfoNCE denominator.
    Nl,
}

impl LossMode {
    pub const ALL: [LossMode; 4] = [LossMode::Pl, LossMode::Nl, LossMode::InfoNce, LossMode::Sncse];

    pub fn as_str(&self) -> &'static str {
        match self {
            LossMode::Sncse => "sncse",
            LossMode::InfoNce => "infonce",
            LossMode::Pl => "pl",
            LossMode::Nl => "nl",
        }
    }

    pub fn needs_negations(&self) -> bool {
        *self != LossMode::InfoNce
    }
}

impl fmt::Display for LossMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sncse" => Ok(LossMode::Sncse),
            "infonce" => Ok(LossMode::InfoNce),
            "pl" => Ok(LossMode::Pl),
            "nl" => Ok(LossMode::Nl),
            other => Err(Error::Config(format!("unknown loss mode '{}' (expected sncse, infonce, pl or nl)", other))),
        }
    }
}

/// Encoder size; the vocabulary size comes from the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EncoderShape {
    pub dim: usize,
    pub heads: usize,
    pub layers: usize,
    pub ffn_dim: usize,
}

impl Default for EncoderShape {
    fn default() -> Self {
        let s = EncoderConfig::standard(1);
        Self { dim: s.dim, heads: s.heads, layers: s.layers, ffn_dim: s.ffn_dim }
    }
}

impl EncoderShape {
    pub fn config(&self, vocab_size: usize) -> EncoderConfig {
        EncoderConfig { vocab_size, dim: self.dim, heads: self.heads, layers: self.layers, ffn_dim: self.ffn_dim, ..EncoderConfig::standard(vocab_size) }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunConfig {
    pub hyper: Hyperparams,
    pub mode: LossMode,
    /// AdamW moments and weight decay; its `lr` is replaced by `hyper.lr`.
    pub optimizer: AdamWConfig,
    pub encoder: EncoderShape,
    pub epochs: usize,
    /// Stop after this many steps, even mid-epoch.
    pub max_steps: Option<usize>,
    /// Evaluate on the dev pairs every this many steps (and after the last step).
    pub eval_interval: usize,
    /// Linear warmup length in steps; 0 keeps the learning rate constant.
    pub warmup_steps: usize,
    /// Global gradient-norm cap; `None` disables clipping.
    pub clip_norm: Option<f64>,
    /// Keep the projection layer when embedding for evaluation.
    pub keep_mlp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hyper: Hyperparams::default(),
            mode: LossMode::Sncse,
            optimizer: AdamWConfig::default(),
            encoder: EncoderShape::default(),
            epochs: 1,
            max_steps: None,
            eval_interval: 125,
            warmup_steps: 0,
            clip_norm: Some(1.0),
            keep_mlp: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        self.optimizer_config().validate()?;
        if self.eval_interval == 0 {
            return Err(Error::Config("eval interval must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if let Some(c) = self.clip_norm {
            if !(c > 0.0) {
                return Err(Error::Config(format!("clip norm must be positive, got {}", c)));
            }
        }
        self.encoder.config(16).validate()
    }

    pub fn optimizer_config(&self) -> AdamWConfig {
        AdamWConfig { lr: self.hyper.lr, ..self.optimizer }
    }

    /// Learning rate for 0-based step `t`.
    pub fn lr_at(&self, t: usize) -> f64 {
        if self.warmup_steps == 0 {
            self.hyper.lr
        } else {
            self.hyper.lr * (((t + 1) as f64) / self.warmup_steps as f64).min(1.0)
        }
    }

    pub fn eval_options(&self) -> EncodeOptions {
        EncodeOptions { training: false, dropout: 0.0, keep_mlp: self.keep_mlp }
    }
}

/// What the training loop consumes.
#[derive(Debug, Clone, Copy)]
pub struct TrainData<'a> {
    pub vocab: &'a Vocabulary,
    pub sentences: &'a [String],
    /// Aligned with `sentences`.
    pub negations: Option<&'a [String]>,
    /// Pairs for model selection; may be empty.
    pub dev: &'a [StsPair],
}

/// Loss components of one step. `bml`, `pl`, `nl` and `mean_delta` need
/// soft negatives and are `None` without them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepRecord {
    pub step: usize,
    pub epoch: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// The value of the objective being optimized.
    pub loss: f64,
    pub infonce: f64,
    pub bml: Option<f64>,
    /// `infonce + lambda * bml`.
    pub total: Option<f64>,
    pub pl: Option<f64>,
    pub nl: Option<f64>,
    pub mean_delta: Option<f64>,
    /// Global gradient norm before clipping.
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalRecord {
    /// Number of optimizer steps taken before the evaluation.
    pub step: usize,
    pub dev_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainLog {
    pub steps: Vec<StepRecord>,
    pub evals: Vec<EvalRecord>,
    /// Step of the best dev evaluation (the checkpoint kept).
    pub best_step: Option<usize>,
    pub best_dev_rho: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub log: TrainLog,
    /// Parameters at the best dev evaluation; the final parameters when no
    /// dev set was given.
    pub best: EncoderParams,
    pub last: EncoderParams,
    pub optimizer: OptimizerState,
}

/// Progress callback argument.
#[derive(Debug, Clone, Copy)]
pub enum Event<'a> {
    Step(&'a StepRecord),
    Eval(&'a EvalRecord),
}

/// Embeddings of one batch split into anchor, positive and soft-negative rows.
struct Forward {
    encoded: EncodedBatch,
    anchor: Tensor,
    positive: Tensor,
    soft_negative: Option<Tensor>,
}

fn split_rows(all: &Tensor, n: usize, parts: usize) -> Result<Vec<Tensor>> {
    let d = all.cols();
    (0..parts).map(|k| Tensor::matrix(n, d, all.data()[k * n * d..(k + 1) * n * d].to_vec())).collect()
}

fn forward(params: &EncoderParams, batch: &TripletBatch, dropout: f64) -> Result<Forward> {
    let n = batch.len();
    let with_neg = batch.has_soft_negatives();
    let mut seqs: Vec<Prompted> = Vec::with_capacity(3 * n);
    let mut seeds: Vec<u64> = Vec::with_capacity(3 * n);
    seqs.extend(batch.triplets.iter().map(|t| t.original.clone()));
    seeds.extend(batch.seeds.iter().map(|s| s[0]));
    seqs.extend(batch.triplets.iter().map(|t| t.positive.clone()));
    seeds.extend(batch.seeds.iter().map(|s| s[1]));
    if with_neg {
        seqs.extend(batch.triplets.iter().map(|t| t.soft_negative.clone().expect("checked")));
        seeds.extend(batch.seeds.iter().map(|s| s[1]));
    }
    let encoded = EncodedBatch::run(params, &seqs, &seeds, EncodeOptions::train(dropout))?;
    let mut parts = split_rows(encoded.embeddings()?, n, if with_neg { 3 } else { 2 })?.into_iter();
    let anchor = parts.next().expect("two parts");
    let positive = parts.next().expect("two parts");
    Ok(Forward { encoded, anchor, positive, soft_negative: parts.next() })
}

/// Loss values for logging plus the gradient of the optimized objective.
struct StepLoss {
    grads: LossGrad,
    infonce: f64,
    bml: Option<f64>,
    total: Option<f64>,
    pl: Option<f64>,
    nl: Option<f64>,
    mean_delta: Option<f64>,
}

fn step_loss(mode: LossMode, hyper: &Hyperparams, f: &Forward) -> Result<StepLoss> {
    let (h, hp) = (&f.anchor, &f.positive);
    let Some(hn) = f.soft_negative.as_ref() else {
        if mode.needs_negations() {
            return Err(Error::Config(format!("loss mode {} needs soft negatives", mode)));
        }
        let grads = infonce_loss(h, hp, hyper.tau)?;
        return Ok(StepLoss { infonce: grads.value, grads, bml: None, total: None, pl: None, nl: None, mean_delta: None });
    };
    let full = sncse_loss(h, hp, hn, hyper)?;
    let pl = pl_loss(h, hp, hn, hyper.tau)?;
    let nl = nl_loss(h, hp, hn, hyper.tau)?;
    let mean_delta = full.deltas.iter().sum::<f64>() / full.deltas.len() as f64;
    let grads = match mode {
        LossMode::Sncse => full.grads,
        LossMode::InfoNce => {
            let g = infonce_loss(h, hp, hyper.tau)?;
            LossGrad { soft_negative: Some(Tensor::zeros(hn.shape())), ..g }
        }
        LossMode::Pl => pl.clone(),
        LossMode::Nl => nl.clone(),
    };
    Ok(StepLoss {
        grads,
        infonce: full.infonce,
        bml: Some(full.bml),
        total: Some(full.total),
        pl: Some(pl.value),
        nl: Some(nl.value),
        mean_delta: Some(mean_delta),
    })
}

/// Parameter gradients in parameter order.
fn param_grads(params: &EncoderParams, f: &Forward, g: &LossGrad) -> Result<Vec<Tensor>> {
    let mut parts = vec![g.anchor.clone(), g.positive.clone()];
    if f.soft_negative.is_some() {
        parts.push(g.soft_negative.clone().unwrap_or_else(|| Tensor::zeros(f.anchor.shape())));
    }
    let n = f.anchor.rows();
    let d = f.anchor.cols();
    let data: Vec<f64> = parts.iter().flat_map(|t| t.data().iter().copied()).collect();
    let upstream = Tensor::matrix(parts.len() * n, d, data)?;
    let mut by_name = f.encoded.backward(&upstream)?;
    Ok(params
        .iter()
        .map(|(name, t)| by_name.remove(name).unwrap_or_else(|| Tensor::zeros(t.shape())))
        .collect())
}

fn global_norm(grads: &[Tensor]) -> f64 {
    libm::sqrt(grads.iter().flat_map(|g| g.data()).map(|v| v * v).sum())
}

/// Scales `grads` so their global norm is at most `max`; returns the norm
/// before scaling.
pub fn clip_global_norm(grads: &mut [Tensor], max: f64) -> f64 {
    let norm = global_norm(grads);
    if norm > max {
        let s = max / norm;
        for g in grads.iter_mut() {
            g.data_mut().iter_mut().for_each(|v| *v *= s);
        }
    }
    norm
}

/// Seed of the batch order and dropout draws for `epoch` of a run.
pub fn epoch_seed(run_seed: u64, epoch: usize) -> u64 {
    derive_index(SeedStream::new(run_seed).seed("shuffle"), epoch as u64)
}

/// Initial parameters of a run.
pub fn initial_params(config: &RunConfig, vocab: &Vocabulary) -> Result<EncoderParams> {
    init_params(SeedStream::new(config.hyper.seed).seed("init"), config.encoder.config(vocab.len()))
}

fn dev_rho(config: &RunConfig, params: &EncoderParams, data: &TrainData<'_>) -> Result<f64> {
    Ok(evaluate(params, data.vocab, data.dev, config.eval_options())?.average)
}

fn record_eval<F: FnMut(Event<'_>)>(
    config: &RunConfig,
    data: &TrainData<'_>,
    step: usize,
    params: &EncoderParams,
    log: &mut TrainLog,
    best: &mut Option<EncoderParams>,
    on_event: &mut F,
) -> Result<()> {
    if data.dev.is_empty() {
        return Ok(());
    }
    let rho = dev_rho(config, params, data)?;
    let rec = EvalRecord { step, dev_rho: rho };
    on_event(Event::Eval(&rec));
    log.evals.push(rec);
    if log.best_dev_rho.is_none_or(|b| rho > b) {
        log.best_dev_rho = Some(rho);
        log.best_step = Some(step);
        *best = Some(params.clone());
    }
    Ok(())
}

/// Trains from the seeded initialization.
pub fn train(config: &RunConfig, data: &TrainData<'_>) -> Result<TrainOutcome> {
    train_with(config, data, |_| {})
}

/// [`train`] with a progress callback.
pub fn train_with<F>(config: &RunConfig, data: &TrainData<'_>, mut on_event: F) -> Result<TrainOutcome>
where
    F: FnMut(Event<'_>),
{
    config.validate()?;
    if config.mode.needs_negations() && data.negations.is_none() {
        return Err(Error::Config(format!("loss mode {} needs a negation file", config.mode)));
    }
    if data.sentences.is_empty() {
        return Err(Error::Input("training corpus is empty".into()));
    }
    let triplets = prompt_all(data.sentences, data.negations, data.vocab)?;
    let mut params = initial_params(config, data.vocab)?;
    let mut opt = OptimizerState::new(config.optimizer_config(), params.tensors())?;
    let mut log = TrainLog::default();
    let mut best: Option<EncoderParams> = None;
    let mut step = 0usize;

    'epochs: for epoch in 0..config.epochs {
        let batches = batch_triplets(&triplets, config.hyper.batch_size, epoch_seed(config.hyper.seed, epoch))?;
        for batch in &batches {
            if config.max_steps.is_some_and(|m| step >= m) {
                break 'epochs;
            }
            let lr = config.lr_at(step);
            let f = forward(&params, batch, config.hyper.dropout)?;
            let loss = step_loss(config.mode, &config.hyper, &f)?;
            if !loss.grads.value.is_finite() {
                return Err(Error::NonFinite(format!(
                    "loss is {} at step {} (infonce {}, bml {:?}, pl {:?}, nl {:?})",
                    loss.grads.value, step, loss.infonce, loss.bml, loss.pl, loss.nl
                )));
            }
            let mut grads = param_grads(&params, &f, &loss.grads)?;
            let grad_norm = match config.clip_norm {
                Some(c) => clip_global_norm(&mut grads, c),
                None => global_norm(&grads),
            };
            opt.step_with_lr(params.tensors_mut(), &grads, lr)
                .map_err(|e| Error::NonFinite(format!("step {}: {}", step, e)))?;
            let rec = StepRecord {
                step,
                epoch,
                batch_size: batch.len(),
                lr,
                loss: loss.grads.value,
                infonce: loss.infonce,
                bml: loss.bml,
                total: loss.total,
                pl: loss.pl,
                nl: loss.nl,
                mean_delta: loss.mean_delta,
                grad_norm,
            };
            on_event(Event::Step(&rec));
            log.steps.push(rec);
            step += 1;
            if step % config.eval_interval == 0 {
                record_eval(config, data, step, &params, &mut log, &mut best, &mut on_event)?;
            }
        }
    }
    if step % config.eval_interval != 0 || step == 0 {
        record_eval(config, data, step, &params, &mut log, &mut best, &mut on_event)?;
    }
    let best = best.unwrap_or_else(|| params.clone());
    Ok(TrainOutcome { log, best, last: params, optimizer: opt })
}

/// Held-out gap measurement on prompted triplets, using the training
/// readout with dropout off.
pub fn heldout_delta(params: &EncoderParams, triplets: &[PromptedTriplet]) -> Result<f64> {
    let opts = EncodeOptions { training: false, dropout: 0.0, keep_mlp: true };
    Ok(crate::evaluation::mean_delta(params, triplets, opts)?.mean_delta)
}

/// Value of the margin loss on held-out triplets (diagnostic).
pub fn heldout_bml(params: &EncoderParams, triplets: &[PromptedTriplet], hyper: &Hyperparams) -> Result<f64> {
    let opts = EncodeOptions { training: false, dropout: 0.0, keep_mlp: true };
    let enc = |sel: &dyn Fn(&PromptedTriplet) -> Option<Prompted>| -> Result<Tensor> {
        let seqs = triplets.iter().map(|t| sel(t).ok_or_else(|| Error::Input("triplet without a soft negative".into()))).collect::<Result<Vec<_>>>()?;
        crate::encoder::encode(params, &seqs, &[], opts)
    };
    let h = enc(&|t| Some(t.original.clone()))?;
    let hp = enc(&|t| Some(t.positive.clone()))?;
    let hn = enc(&|t| t.soft_negative.clone())?;
    Ok(bml_loss(&deltas(&h, &hp, &hn)?, hyper.alpha, hyper.beta)?.0)
}

/// Axes of a sweep over the margin-loss hyperparameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub lambdas: Vec<f64>,
}

/// `beta` at or above this value leaves the upper gap unconstrained
/// (cosine gaps never exceed 2).
pub const BETA_UNBOUNDED: f64 = 2.0;

impl Default for SweepGrid {
    fn default() -> Self {
        Self { alphas: vec![0.0, 0.1, 0.2], betas: vec![0.2, 0.3, 0.4, 2.0], lambdas: vec![5e-4, 1e-3, 5e-3] }
    }
}

impl SweepGrid {
    pub fn cells(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.alphas.len() * self.betas.len() * self.lambdas.len());
        for &a in &self.alphas {
            for &b in &self.betas {
                for &l in &self.lambdas {
                    out.push((a, b, l));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    /// Best dev ρ of the run (NaN when the run had no dev set).
    pub dev_rho: f64,
    /// "upper difference ignored" when `beta` leaves the gap unbounded above.
    pub label: String,
}

/// Runs one training per grid cell; cells where `alpha > beta` are
/// rejected. Rows come back sorted by dev ρ, best first.
pub fn sweep(base: &RunConfig, grid: &SweepGrid, data: &TrainData<'_>) -> Result<Vec<SweepRow>> {
    sweep_with(base, grid, data, |cfg| train(cfg, data).map(|o| o.log.best_dev_rho.unwrap_or(f64::NAN)))
}

/// [`sweep`] with a caller-supplied runner (e.g. to run cells in parallel
/// elsewhere or to record per-cell logs).
pub fn sweep_with<R>(base: &RunConfig, grid: &SweepGrid, _data: &TrainData<'_>, mut run: R) -> Result<Vec<SweepRow>>
where
    R: FnMut(&RunConfig) -> Result<f64>,
{
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::Config("sweep grid has an empty axis".into()));
    }
    let mut rows = Vec::with_capacity(cells.len());
    for (alpha, beta, lambda) in cells {
        let mut cfg = base.clone();
        cfg.hyper.alpha = alpha;
        cfg.hyper.beta = beta;
        cfg.hyper.lambda = lambda;
        let dev_rho = run(&cfg)?;
        rows.push(sweep_row(alpha, beta, lambda, dev_rho));
    }
    sort_rows(&mut rows);
    Ok(rows)
}

pub fn sweep_row(alpha: f64, beta: f64, lambda: f64, dev_rho: f64) -> SweepRow {
    let label = if beta >= BETA_UNBOUNDED { "upper difference ignored" } else { "" };
    SweepRow { alpha, beta, lambda, dev_rho, label: label.into() }
}

/// Best dev ρ first; NaN rows last; ties keep grid order.
pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| match (a.dev_rho.is_nan(), b.dev_rho.is_nan()) {
        (false, false) => b.dev_rho.total_cmp(&a.dev_rho),
        (x, y) => x.cmp(&y),
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn corpus() -> (Vec<String>, Vec<String>, Vocabulary, Vec<StsPair>) {
        let s: Vec<String> = [
            "a man plays a guitar",
            "the dog runs in the park",
            "she reads a long book",
            "two kids eat some bread",
            "the cat sleeps on the bed",
            "he drives a red car",
            "birds fly over the lake",
            "we watch a funny movie",
        ]
        .iter()
        .map(|x| x.to_string())
        .collect();
        let n: Vec<String> = s.iter().map(|x| x.replacen(' ', " does not ", 1)).collect();
        let v = Vocabulary::build(s.iter().chain(&n).map(String::as_str), 1);
        let dev = (0..6)
            .map(|i| StsPair::new(s[i].clone(), s[(i * 3 + 1) % 8].clone(), i as f64 * 0.8, "dev".into(), "dev".into()).unwrap())
            .collect();
        (s, n, v, dev)
    }

    fn small(mode: LossMode) -> RunConfig {
        RunConfig {
            mode,
            hyper: Hyperparams { batch_size: 3, ..Hyperparams::default() },
            encoder: EncoderShape { dim: 8, heads: 2, layers: 1, ffn_dim: 8 },
            epochs: 2,
            eval_interval: 2,
            ..RunConfig::default()
        }
    }

    #[test]
    fn loss_mode_parsing() {
        for m in LossMode::ALL {
            assert_eq!(m.as_str().parse::<LossMode>().unwrap(), m);
        }
        assert!("bogus".parse::<LossMode>().is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let (s, n, v, dev) = corpus();
        let data = TrainData { vocab: &v, sentences: &s, negations: Some(&n), dev: &dev };
        let a = train(&small(LossMode::Sncse), &data).unwrap();
        let b = train(&small(LossMode::Sncse), &data).unwrap();
        assert_eq!(a.log, b.log);
        assert!(a.best.bitwise_eq(&b.best));
        assert_eq!(a.log.steps.len(), 6);
        // evaluations after steps 2, 4, 6
        assert_eq!(a.log.evals.iter().map(|e| e.step).collect::<Vec<_>>(), [2, 4, 6]);
        let best = a.log.evals.iter().map(|e| e.dev_rho).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(a.log.best_dev_rho, Some(best));
    }

    #[test]
    fn zero_lambda_matches_infonce() {
        let (s, n, v, dev) = corpus();
        let data = TrainData { vocab: &v, sentences: &s, negations: Some(&n), dev: &dev };
        let mut a = small(LossMode::Sncse);
        a.hyper.lambda = 0.0;
        let b = small(LossMode::InfoNce);
        let ra = train(&a, &data).unwrap();
        let rb = train(&b, &data).unwrap();
        assert!(ra.last.bitwise_eq(&rb.last));
    }

    #[test]
    fn nl_dominates_infonce() {
        let (s, n, v, dev) = corpus();
        let data = TrainData { vocab: &v, sentences: &s, negations: Some(&n), dev: &dev };
        for mode in LossMode::ALL {
            let out = train(&small(mode), &data).unwrap();
            assert!(out.log.steps.iter().all(|r| r.nl.unwrap() >= r.infonce));
        }
    }

    #[test]
    fn missing_negations_is_a_config_error() {
        let (s, _, v, dev) = corpus();
        let data = TrainData { vocab: &v, sentences: &s, negations: None, dev: &dev };
        assert!(matches!(train(&small(LossMode::Pl), &data), Err(Error::Config(_))));
        assert!(train(&small(LossMode::InfoNce), &data).is_ok());
    }

    #[test]
    fn max_steps_truncates() {
        let (s, n, v, dev) = corpus();
        let data = TrainData { vocab: &v, sentences: &s, negations: Some(&n), dev: &dev };
        let mut c = small(LossMode::Sncse);
        c.max_steps = Some(4);
        c.eval_interval = 3;
        let out = train(&c, &data).unwrap();
        assert_eq!(out.log.steps.len(), 4);
        assert_eq!(out.log.evals.iter().map(|e| e.step).collect::<Vec<_>>(), [3, 4]);
    }

    #[test]
    fn repeated_batch_descends() {
        let (s, n, v, _) = corpus();
        let cfg = RunConfig { hyper: Hyperparams { dropout: 0.0, lr: 1e-2, ..Hyperparams::default() }, ..small(LossMode::Sncse) };
        let triplets = prompt_all(&s, Some(&n), &v).unwrap();
        let batch = batch_triplets(&triplets, 8, 0).unwrap().remove(0);
        let mut params = initial_params(&cfg, &v).unwrap();
        let mut opt = OptimizerState::new(cfg.optimizer_config(), params.tensors()).unwrap();
        let loss_of = |p: &EncoderParams| step_loss(LossMode::Sncse, &cfg.hyper, &forward(p, &batch, 0.0).unwrap()).unwrap().grads.value;
        let initial = loss_of(&params);
        for _ in 0..50 {
            let f = forward(&params, &batch, 0.0).unwrap();
            let l = step_loss(LossMode::Sncse, &cfg.hyper, &f).unwrap();
            let mut g = param_grads(&params, &f, &l.grads).unwrap();
            clip_global_norm(&mut g, 1.0);
            opt.step(params.tensors_mut(), &g).unwrap();
        }
        assert!(loss_of(&params) < initial);
    }

    #[test]
    fn clipping() {
        let mut g = vec![Tensor::vector(vec![3.0, 4.0])];
        assert_eq!(clip_global_norm(&mut g, 1.0), 5.0);
        assert!((global_norm(&g) - 1.0).abs() < 1e-15);
        let mut h = vec![Tensor::vector(vec![0.3, 0.4])];
        clip_global_norm(&mut h, 1.0);
        assert_eq!(h[0].data(), [0.3, 0.4]);
    }

    #[test]
    fn warmup_schedule() {
        let c = RunConfig { warmup_steps: 4, ..RunConfig::default() };
        assert_eq!(c.lr_at(0), c.hyper.lr / 4.0);
        assert_eq!(c.lr_at(3), c.hyper.lr);
        assert_eq!(c.lr_at(100), c.hyper.lr);
        assert_eq!(RunConfig::default().lr_at(0), RunConfig::default().hyper.lr);
    }

    #[test]
    fn sweep_shapes() {
        let (s, n, v, dev) = corpus();
        let data = TrainData { vocab: &v, sentences: &s, negations: Some(&n), dev: &dev };
        let grid = SweepGrid { alphas: vec![0.0, 0.1], betas: vec![0.3, 2.0], lambdas: vec![1e-3] };
        let mut calls = 0;
        let rows = sweep_with(&small(LossMode::Sncse), &grid, &data, |c| {
            calls += 1;
            Ok(c.hyper.alpha + c.hyper.beta)
        })
        .unwrap();
        assert_eq!((rows.len(), calls), (4, 4));
        assert_eq!(rows[0].dev_rho, 2.1);
        assert!(rows.iter().filter(|r| r.beta == 2.0).all(|r| r.label == "upper difference ignored"));
        assert!(rows.iter().filter(|r| r.beta != 2.0).all(|r| r.label.is_empty()));

        let one = SweepGrid { alphas: vec![0.1], betas: vec![0.3], lambdas: vec![1e-3] };
        let cfg = small(LossMode::Sncse);
        let rows = sweep(&cfg, &one, &data).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(Some(rows[0].dev_rho), train(&cfg, &data).unwrap().log.best_dev_rho);
        assert_eq!(SweepGrid::default().cells().len(), 36);
    }
}
