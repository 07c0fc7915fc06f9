//! Spearman-based STS scoring, rank-error analysis and similarity histograms.

mod distribution;
mod report;
mod spearman;

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

pub use distribution::{bin_left, bin_of, Histogram, SimilarityDistribution, BINS, BIN_WIDTH};
pub use report::{
    average_rho, build_report, error_analysis, rank_error, score_subtask, Direction, ErrorAnalysis, ErrorEntry,
    EvalReport, PairScore, ScoredPair, SubtaskReport, CLOSED_FORM_REPORT_GAP,
};
pub use spearman::{average_ranks, spearman, spearman_closed_form};

use crate::data::StsPair;
use crate::encoder::{apply_template, encode, EncodeOptions, EncoderParams, Prompted, PromptedTriplet, TemplateVariant, Vocabulary};
use crate::error::{Error, Result};
use crate::objectives::cosine_similarity;
use crate::rng::SeedStream;

/// Sentences encoded per forward pass. Evaluation-mode embeddings do not
/// depend on how sentences are grouped, so this only trades memory for speed.
pub const EVAL_CHUNK: usize = 64;

/// Encodes prompted sequences without dropout, `chunk` at a time.
pub fn embed_prompted(params: &EncoderParams, seqs: &[Prompted], opts: EncodeOptions, chunk: usize) -> Result<Vec<Vec<f64>>> {
    if opts.training {
        return Err(Error::Contract("embedding for evaluation needs a non-training mode".into()));
    }
    let mut out = Vec::with_capacity(seqs.len());
    for part in seqs.chunks(chunk.max(1)) {
        let e = encode(params, part, &[], opts)?;
        for r in 0..e.rows() {
            out.push(e.row(r).to_vec());
        }
    }
    Ok(out)
}

/// Evaluation-mode embeddings of raw sentences under one template.
pub fn embed_sentences(
    params: &EncoderParams,
    vocab: &Vocabulary,
    sentences: &[&str],
    variant: TemplateVariant,
    opts: EncodeOptions,
) -> Result<Vec<Vec<f64>>> {
    let seqs = sentences.iter().map(|s| apply_template(s, variant, vocab)).collect::<Result<Vec<_>>>()?;
    embed_prompted(params, &seqs, opts, EVAL_CHUNK)
}

/// Cosine similarity, or `None` when either embedding is degenerate.
pub fn pair_cosine(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    match cosine_similarity(a, b) {
        Ok(c) => Ok(Some(c)),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Scores already-computed embeddings of `pairs` (row `i` of each list
/// belongs to pair `i`).
pub fn evaluate_embeddings(pairs: &[StsPair], left: &[Vec<f64>], right: &[Vec<f64>]) -> Result<EvalReport> {
    if left.len() != pairs.len() || right.len() != pairs.len() {
        return Err(Error::Shape {
            op: "evaluate",
            detail: format!("{} pairs, {} / {} embeddings", pairs.len(), left.len(), right.len()),
        });
    }
    let scored = pairs
        .iter()
        .zip(left.iter().zip(right))
        .map(|(p, (a, b))| {
            Ok(ScoredPair {
                subtask: &p.subtask,
                sentence1: &p.sentence1,
                sentence2: &p.sentence2,
                gold: p.score,
                cosine: pair_cosine(a, b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    build_report(&scored)
}

/// Embeds both sides of every pair with the original template and scores
/// each subtask by Spearman correlation.
pub fn evaluate(params: &EncoderParams, vocab: &Vocabulary, pairs: &[StsPair], opts: EncodeOptions) -> Result<EvalReport> {
    let s1: Vec<&str> = pairs.iter().map(|p| p.sentence1.as_str()).collect();
    let s2: Vec<&str> = pairs.iter().map(|p| p.sentence2.as_str()).collect();
    let left = embed_sentences(params, vocab, &s1, TemplateVariant::Original, opts)?;
    let right = embed_sentences(params, vocab, &s2, TemplateVariant::Original, opts)?;
    evaluate_embeddings(pairs, &left, &right)
}

/// Mean cosine gaps over a set of triplets.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeltaSummary {
    /// Mean of `cos(h, h#) - cos(h, h⁺)`.
    pub mean_delta: f64,
    pub mean_cos_positive: f64,
    pub mean_cos_soft_negative: f64,
    pub count: usize,
}

/// Encodes anchor, positive and soft negative of each triplet without
/// dropout and averages the cosine gap.
pub fn mean_delta(params: &EncoderParams, triplets: &[PromptedTriplet], opts: EncodeOptions) -> Result<DeltaSummary> {
    if triplets.is_empty() {
        return Err(Error::Input("no triplets to measure".into()));
    }
    let anchors: Vec<Prompted> = triplets.iter().map(|t| t.original.clone()).collect();
    let positives: Vec<Prompted> = triplets.iter().map(|t| t.positive.clone()).collect();
    let negs = triplets
        .iter()
        .map(|t| t.soft_negative.clone().ok_or_else(|| Error::Input("triplet without a soft negative".into())))
        .collect::<Result<Vec<_>>>()?;
    let h = embed_prompted(params, &anchors, opts, EVAL_CHUNK)?;
    let hp = embed_prompted(params, &positives, opts, EVAL_CHUNK)?;
    let hn = embed_prompted(params, &negs, opts, EVAL_CHUNK)?;
    let mut pos = 0.0;
    let mut soft = 0.0;
    for i in 0..triplets.len() {
        pos += cosine_similarity(&h[i], &hp[i])?;
        soft += cosine_similarity(&h[i], &hn[i])?;
    }
    let n = triplets.len() as f64;
    Ok(DeltaSummary {
        mean_delta: (soft - pos) / n,
        mean_cos_positive: pos / n,
        mean_cos_soft_negative: soft / n,
        count: triplets.len(),
    })
}

/// Raw similarities behind a [`SimilarityDistribution`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimilaritySamples {
    pub indices: Vec<usize>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub soft_negative: Vec<f64>,
}

/// Samples `n` sentences and measures self (positive), random-other
/// (negative) and negation (soft negative) similarities.
pub fn similarity_samples(
    params: &EncoderParams,
    vocab: &Vocabulary,
    sentences: &[&str],
    negations: &[&str],
    n: usize,
    seed: u64,
    opts: EncodeOptions,
) -> Result<SimilaritySamples> {
    if n < 1 {
        return Err(Error::Input("sample size must be at least 1".into()));
    }
    if negations.len() != sentences.len() {
        return Err(Error::Input(format!("{} sentences but {} negations", sentences.len(), negations.len())));
    }
    if n > sentences.len() || sentences.len() < 2 {
        return Err(Error::Input(format!("sample size {} exceeds population {} (at least 2 needed)", n, sentences.len())));
    }
    let mut rng = SeedStream::new(seed).rng("sampling");
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    order.shuffle(&mut rng);
    let indices: Vec<usize> = order[..n].to_vec();
    let partners: Vec<usize> = indices
        .iter()
        .map(|&i| {
            let j = rng.random_range(0..sentences.len() - 1);
            if j >= i {
                j + 1
            } else {
                j
            }
        })
        .collect();

    let chosen: Vec<&str> = indices.iter().map(|&i| sentences[i]).collect();
    let others: Vec<&str> = partners.iter().map(|&j| sentences[j]).collect();
    let negs: Vec<&str> = indices.iter().map(|&i| negations[i]).collect();
    let h = embed_sentences(params, vocab, &chosen, TemplateVariant::Original, opts)?;
    let ho = embed_sentences(params, vocab, &others, TemplateVariant::Original, opts)?;
    let hn = embed_sentences(params, vocab, &negs, TemplateVariant::Original, opts)?;
    let mut out = SimilaritySamples { indices, positive: Vec::new(), negative: Vec::new(), soft_negative: Vec::new() };
    for i in 0..n {
        out.positive.push(cosine_similarity(&h[i], &h[i])?);
        out.negative.push(cosine_similarity(&h[i], &ho[i])?);
        out.soft_negative.push(cosine_similarity(&h[i], &hn[i])?);
    }
    Ok(out)
}

pub fn similarity_distribution(
    params: &EncoderParams,
    vocab: &Vocabulary,
    sentences: &[&str],
    negations: &[&str],
    n: usize,
    seed: u64,
    opts: EncodeOptions,
) -> Result<SimilarityDistribution> {
    let s = similarity_samples(params, vocab, sentences, negations, n, seed, opts)?;
    SimilarityDistribution::from_similarities(&s.positive, &s.negative, &s.soft_negative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{init_params, EncoderConfig};
    use alloc::string::String;
    use alloc::vec;

    fn setup() -> (EncoderParams, Vocabulary, Vec<String>, Vec<String>) {
        let sents: Vec<String> = ["a dog runs", "the cat sleeps", "birds fly high", "she reads a book", "he eats bread"]
            .iter()
            .map(|s| String::from(*s))
            .collect();
        let negs: Vec<String> = sents.iter().map(|s| format!("{} not", s)).collect();
        let vocab = Vocabulary::build(sents.iter().chain(&negs).map(String::as_str), 1);
        let cfg = EncoderConfig { vocab_size: vocab.len(), dim: 16, heads: 2, layers: 1, ffn_dim: 16, max_len: 64 };
        (init_params(5, cfg).unwrap(), vocab, sents, negs)
    }

    #[test]
    fn distribution_is_deterministic_and_complete() {
        let (p, v, s, n) = setup();
        let s: Vec<&str> = s.iter().map(String::as_str).collect();
        let n: Vec<&str> = n.iter().map(String::as_str).collect();
        let a = similarity_distribution(&p, &v, &s, &n, 4, 42, EncodeOptions::eval()).unwrap();
        let b = similarity_distribution(&p, &v, &s, &n, 4, 42, EncodeOptions::eval()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.positive.total(), 4);
        assert_eq!(a.negative.total(), 4);
        assert_eq!(a.soft_negative.total(), 4);
        assert_eq!(a.positive.counts[BINS - 1], 4);
        assert!(similarity_distribution(&p, &v, &s, &n, 0, 42, EncodeOptions::eval()).is_err());
        assert!(similarity_distribution(&p, &v, &s, &n, 6, 42, EncodeOptions::eval()).is_err());
    }

    #[test]
    fn negatives_never_pair_with_self() {
        let (p, v, s, n) = setup();
        let s: Vec<&str> = s.iter().map(String::as_str).collect();
        let n: Vec<&str> = n.iter().map(String::as_str).collect();
        for seed in 0..20 {
            let out = similarity_samples(&p, &v, &s, &n, 5, seed, EncodeOptions::eval()).unwrap();
            assert!(out.negative.iter().all(|&c| c < 1.0 - 1e-9));
        }
    }

    #[test]
    fn evaluate_runs_per_subtask() {
        let (p, v, s, _) = setup();
        let mut pairs = vec![];
        for (k, sub) in ["A", "B"].iter().enumerate() {
            for i in 0..4 {
                pairs.push(StsPair::new(s[i].clone(), s[(i + 1 + k) % 5].clone(), i as f64, (*sub).into(), "test".into()).unwrap());
            }
        }
        let r = evaluate(&p, &v, &pairs, EncodeOptions::eval()).unwrap();
        assert_eq!(r.subtasks.len(), 2);
        assert!(r.subtasks.iter().all(|x| (-1.0..=1.0).contains(&x.rho)));
        assert!((r.average - (r.subtasks[0].rho + r.subtasks[1].rho) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn delta_summary() {
        let (p, v, s, n) = setup();
        let t: Vec<PromptedTriplet> = s.iter().zip(&n).map(|(a, b)| PromptedTriplet::new(a, Some(b), &v).unwrap()).collect();
        let d = mean_delta(&p, &t, EncodeOptions { training: false, dropout: 0.0, keep_mlp: true }).unwrap();
        assert!((d.mean_delta - (d.mean_cos_soft_negative - d.mean_cos_positive)).abs() < 1e-12);
        assert!(embed_prompted(&p, &[t[0].original.clone()], EncodeOptions::train(0.1), 4).is_err());
    }
}
