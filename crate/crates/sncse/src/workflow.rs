//! End-to-end workflows shared by the CLI and the acceptance suite.

use std::path::{Path, PathBuf};

use sncse_core::data::{holdout_split, prompt_all, StsPair};
use sncse_core::encoder::{EncoderParams, Vocabulary};
use sncse_core::evaluation::{evaluate, EvalReport};
use sncse_core::trainer::{heldout_delta, initial_params, train_with, Event, LossMode, RunConfig, TrainOutcome};

use crate::checkpoint::{Checkpoint, CheckpointMeta};
use crate::error::{write_file, Error, Result};
use crate::io::{align_negations, load_corpus, load_negations, load_sts, train_log_jsonl, write_vocab, ModeRow};

/// Where a run's inputs live and how they are split.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPaths {
    pub corpus: PathBuf,
    pub negations: Option<PathBuf>,
    pub sts_dir: Option<PathBuf>,
    /// Subtasks used for model selection (all when empty).
    pub dev_subtasks: Vec<String>,
    pub test_subtasks: Vec<String>,
    pub dev_split: String,
    pub test_split: String,
    pub min_freq: usize,
}

impl DataPaths {
    pub fn new(corpus: PathBuf) -> Self {
        Self {
            corpus,
            negations: None,
            sts_dir: None,
            dev_subtasks: Vec::new(),
            test_subtasks: Vec::new(),
            dev_split: "dev".into(),
            test_split: "test".into(),
            min_freq: 2,
        }
    }
}

/// Loaded training inputs.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub vocab: Vocabulary,
    pub sentences: Vec<String>,
    pub negations: Option<Vec<String>>,
    /// Corpus lines dropped because they have no negation.
    pub dropped: usize,
    pub dev: Vec<StsPair>,
    pub test: Vec<StsPair>,
}

impl Prepared {
    pub fn train_data(&self) -> sncse_core::trainer::TrainData<'_> {
        sncse_core::trainer::TrainData {
            vocab: &self.vocab,
            sentences: &self.sentences,
            negations: self.negations.as_deref(),
            dev: &self.dev,
        }
    }
}

/// Loads the corpus, aligns negations and builds the vocabulary from the
/// sentences and their negations.
pub fn prepare(paths: &DataPaths) -> Result<Prepared> {
    let corpus = load_corpus(&paths.corpus)?;
    let (sentences, negations, dropped) = match &paths.negations {
        Some(p) => {
            let pairs = load_negations(p)?;
            let (s, n) = align_negations(&corpus, &pairs)?;
            let dropped = corpus.len() - s.len();
            (s, Some(n), dropped)
        }
        None => (corpus, None, 0),
    };
    let texts = sentences.iter().chain(negations.iter().flatten()).map(String::as_str);
    let vocab = Vocabulary::build(texts, paths.min_freq);
    let (dev, test) = match &paths.sts_dir {
        Some(d) => {
            let coll = load_sts(d)?;
            (coll.split(&paths.dev_split, &paths.dev_subtasks), coll.split(&paths.test_split, &paths.test_subtasks))
        }
        None => (Vec::new(), Vec::new()),
    };
    Ok(Prepared { vocab, sentences, negations, dropped, dev, test })
}

/// Trains and, when `out_dir` is set, writes `train_log.jsonl`,
/// `best.ckpt`, `last.ckpt` and `vocab.txt` there.
pub fn train_run<F>(config: &RunConfig, data: &Prepared, out_dir: Option<&Path>, on_event: F) -> Result<TrainOutcome>
where
    F: FnMut(Event<'_>),
{
    let outcome = train_with(config, &data.train_data(), on_event)?;
    if let Some(dir) = out_dir {
        write_file(&dir.join("train_log.jsonl"), train_log_jsonl(&outcome.log).as_bytes())?;
        best_checkpoint(config, data, &outcome).save(&dir.join("best.ckpt"))?;
        last_checkpoint(config, data, &outcome).save(&dir.join("last.ckpt"))?;
        write_vocab(&dir.join("vocab.txt"), &data.vocab)?;
    }
    Ok(outcome)
}

fn meta(config: &RunConfig, step: usize, dev_rho: Option<f64>) -> CheckpointMeta {
    CheckpointMeta { mode: config.mode.as_str().into(), hyper: config.hyper, step, dev_rho, keep_mlp: config.keep_mlp }
}

/// The model selected on the dev set. Optimizer moments are only kept
/// with the last checkpoint, where they match the weights.
pub fn best_checkpoint(config: &RunConfig, data: &Prepared, outcome: &TrainOutcome) -> Checkpoint {
    let step = outcome.log.best_step.unwrap_or(outcome.log.steps.len());
    Checkpoint {
        params: outcome.best.clone(),
        vocab: data.vocab.clone(),
        optimizer: None,
        meta: meta(config, step, outcome.log.best_dev_rho),
    }
}

pub fn last_checkpoint(config: &RunConfig, data: &Prepared, outcome: &TrainOutcome) -> Checkpoint {
    let step = outcome.log.steps.len();
    let rho = outcome.log.evals.iter().rfind(|e| e.step == step).map(|e| e.dev_rho);
    Checkpoint {
        params: outcome.last.clone(),
        vocab: data.vocab.clone(),
        optimizer: Some(outcome.optimizer.clone()),
        meta: meta(config, step, rho),
    }
}

pub fn evaluate_checkpoint(ckpt: &Checkpoint, pairs: &[StsPair], keep_mlp: bool) -> Result<EvalReport> {
    let opts = sncse_core::encoder::EncodeOptions { training: false, dropout: 0.0, keep_mlp };
    Ok(evaluate(&ckpt.params, &ckpt.vocab, pairs, opts)?)
}

/// Trains each loss mode from the same seed and reports dev (and test)
/// correlation of the selected model.
pub fn compare_modes(base: &RunConfig, data: &Prepared, modes: &[LossMode]) -> Result<Vec<ModeRow>> {
    modes
        .iter()
        .map(|&mode| {
            let cfg = RunConfig { mode, ..base.clone() };
            let out = train_with(&cfg, &data.train_data(), |_| {})?;
            let test_rho = if data.test.is_empty() {
                None
            } else {
                Some(evaluate(&out.best, &data.vocab, &data.test, cfg.eval_options())?.average)
            };
            let nl_bound_held = out.log.steps.iter().all(|s| s.nl.is_none_or(|nl| nl >= s.infonce));
            Ok(ModeRow {
                mode: mode.as_str().into(),
                steps: out.log.steps.len(),
                dev_rho: out.log.best_dev_rho.unwrap_or(f64::NAN),
                test_rho,
                nl_bound_held,
            })
        })
        .collect()
}

/// Held-out gap measurement before and after one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeldoutGap {
    pub initial: f64,
    pub last: f64,
    pub steps: usize,
    pub heldout: usize,
}

/// Holds out `fraction` of the aligned triplets (split by `split_seed`),
/// trains on the rest and measures the mean gap on the held-out part.
pub fn heldout_gap(config: &RunConfig, data: &Prepared, fraction: f64, split_seed: u64) -> Result<HeldoutGap> {
    let negs = data
        .negations
        .as_ref()
        .ok_or_else(|| Error::Config("the held-out gap needs a negation file".into()))?;
    let (train_idx, held_idx) = holdout_split(data.sentences.len(), fraction, split_seed)?;
    let pick = |idx: &[usize], v: &[String]| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
    let train = Prepared {
        sentences: pick(&train_idx, &data.sentences),
        negations: Some(pick(&train_idx, negs)),
        ..data.clone()
    };
    let held = prompt_all(&pick(&held_idx, &data.sentences), Some(&pick(&held_idx, negs)), &data.vocab)?;
    let init: EncoderParams = initial_params(config, &data.vocab)?;
    let initial = heldout_delta(&init, &held)?;
    let out = train_with(config, &train.train_data(), |_| {})?;
    Ok(HeldoutGap { initial, last: heldout_delta(&out.last, &held)?, steps: out.log.steps.len(), heldout: held.len() })
}
