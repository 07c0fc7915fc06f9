//! STS pairs, corpus text and seeded triplet batching.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::encoder::{PromptedTriplet, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// One scored sentence pair from an STS-style file.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StsPair {
    pub sentence1: String,
    pub sentence2: String,
    /// Gold similarity in `[0, 5]`.
    pub score: f64,
    pub subtask: String,
    pub split: String,
}

impl StsPair {
    pub fn new(sentence1: String, sentence2: String, score: f64, subtask: String, split: String) -> Result<Self> {
        if !(0.0..=5.0).contains(&score) {
            return Err(Error::Data(format!("score {} outside [0, 5]", score)));
        }
        Ok(Self { sentence1, sentence2, score, subtask, split })
    }
}

/// Parses one `score<TAB>sentence1<TAB>sentence2` line. `line_no` is
/// 1-based and only used in error messages.
pub fn parse_sts_line(line: &str, line_no: usize, subtask: &str, split: &str) -> Result<StsPair> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 3 {
        return Err(Error::Data(format!("line {}: expected 3 tab-separated columns, found {}", line_no, cols.len())));
    }
    let score: f64 = cols[0]
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("line {}: score {:?} is not a number", line_no, cols[0])))?;
    StsPair::new(cols[1].into(), cols[2].into(), score, subtask.into(), split.into())
        .map_err(|e| Error::Data(format!("line {}: {}", line_no, e)))
}

/// Parses a whole STS file. Blank lines are skipped.
pub fn parse_sts(text: &str, subtask: &str, split: &str) -> Result<Vec<StsPair>> {
    text.split('\n')
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_sts_line(l, i + 1, subtask, split))
        .collect()
}

/// One sentence per line; blank lines dropped, CRLF treated as LF.
pub fn parse_corpus(text: &str) -> Vec<String> {
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .map(String::from)
        .collect()
}

/// Parses a two-column `original<TAB>negation` file.
pub fn parse_negation_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let Some((a, b)) = line.split_once('\t') else {
            return Err(Error::Data(format!("line {}: expected original<TAB>negation", i + 1)));
        };
        if b.contains('\t') {
            return Err(Error::Data(format!("line {}: more than two columns", i + 1)));
        }
        out.push((a.into(), b.into()));
    }
    Ok(out)
}

/// Prompted triplets in shuffled order with their dropout seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletBatch {
    /// Positions of the batch's examples in the input list.
    pub indices: Vec<usize>,
    pub triplets: Vec<PromptedTriplet>,
    /// Dropout seeds for the anchor and the positive of each example. The
    /// soft negative shares the positive's seed.
    pub seeds: Vec<[u64; 2]>,
    /// Length every sequence of the batch is padded to by the encoder.
    pub padded_len: usize,
}

impl TripletBatch {
    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn has_soft_negatives(&self) -> bool {
        self.triplets.iter().all(|t| t.soft_negative.is_some())
    }
}

/// Applies the prompt templates to every sentence (and its negation, when
/// given). A [`Vocabulary`] always holds the reserved tokens, so a list
/// lacking them is rejected with a config error when it is loaded.
pub fn prompt_all(sentences: &[String], negations: Option<&[String]>, vocab: &Vocabulary) -> Result<Vec<PromptedTriplet>> {
    if let Some(n) = negations {
        if n.len() != sentences.len() {
            return Err(Error::Input(format!("{} sentences but {} negations", sentences.len(), n.len())));
        }
    }
    sentences
        .iter()
        .enumerate()
        .map(|(i, s)| PromptedTriplet::new(s, negations.map(|n| n[i].as_str()), vocab))
        .collect()
}

/// Shuffles prompted triplets with `epoch_seed` and cuts them into batches
/// of `batch_size`; the final batch may be smaller.
pub fn batch_triplets(triplets: &[PromptedTriplet], batch_size: usize, epoch_seed: u64) -> Result<Vec<TripletBatch>> {
    if batch_size == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    let stream = SeedStream::new(epoch_seed);
    let mut order: Vec<usize> = (0..triplets.len()).collect();
    order.shuffle(&mut stream.rng("shuffle"));
    let mut seed_rng = stream.rng("dropout");
    let mut out = Vec::with_capacity(order.len().div_ceil(batch_size));
    for chunk in order.chunks(batch_size) {
        let batch: Vec<PromptedTriplet> = chunk.iter().map(|&i| triplets[i].clone()).collect();
        let seeds = chunk.iter().map(|_| [seed_rng.random::<u64>(), seed_rng.random::<u64>()]).collect();
        let padded_len = batch
            .iter()
            .flat_map(|t| [Some(&t.original), Some(&t.positive), t.soft_negative.as_ref()])
            .flatten()
            .map(|p| p.ids.len())
            .max()
            .unwrap_or(0);
        out.push(TripletBatch { indices: chunk.to_vec(), triplets: batch, seeds, padded_len });
    }
    Ok(out)
}

/// Builds one epoch of triplet batches from raw text.
pub fn make_batches(
    sentences: &[String],
    negations: Option<&[String]>,
    vocab: &Vocabulary,
    batch_size: usize,
    epoch_seed: u64,
) -> Result<Vec<TripletBatch>> {
    let triplets = prompt_all(sentences, negations, vocab)?;
    batch_triplets(&triplets, batch_size, epoch_seed)
}

/// Splits `0..n` into a training part and a held-out part of
/// `round(n * fraction)` items, both in ascending order.
pub fn holdout_split(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Config(format!("held-out fraction {} must be in [0, 1)", fraction)));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut SeedStream::new(seed).rng("holdout"));
    let k = libm::round(n as f64 * fraction) as usize;
    let mut held: Vec<usize> = order[..k].to_vec();
    let mut train: Vec<usize> = order[k..].to_vec();
    held.sort_unstable();
    train.sort_unstable();
    Ok((train, held))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn sentences(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("sentence number {}", i)).collect()
    }

    fn vocab(s: &[String]) -> Vocabulary {
        Vocabulary::build(s.iter().map(String::as_str), 1)
    }

    #[test]
    fn sts_lines() {
        let p = parse_sts_line("4.2\ta b\tc d\r", 1, "STSB", "dev").unwrap();
        assert_eq!((p.score, p.sentence1.as_str(), p.sentence2.as_str()), (4.2, "a b", "c d"));
        let e = parse_sts_line("5.5\ta\tb", 7, "STSB", "dev").unwrap_err();
        assert!(matches!(&e, Error::Data(m) if m.contains("line 7")));
        assert!(parse_sts_line("1.0\ta", 2, "x", "y").is_err());
        assert!(parse_sts_line("x\ta\tb", 2, "x", "y").is_err());
        assert!(parse_sts_line("-0.1\ta\tb", 2, "x", "y").is_err());
        assert!(parse_sts_line("NaN\ta\tb", 2, "x", "y").is_err());
    }

    #[test]
    fn corpus_lines() {
        assert_eq!(parse_corpus("a\n\nb\n"), ["a", "b"]);
        assert_eq!(parse_corpus("a\r\n\r\nb\r\n"), parse_corpus("a\n\nb\n"));
        assert!(parse_corpus("").is_empty());
    }

    #[test]
    fn batch_sizes_keep_partial() {
        let s = sentences(10);
        let b = make_batches(&s, None, &vocab(&s), 4, 1).unwrap();
        let sizes: Vec<usize> = b.iter().map(TripletBatch::len).collect();
        assert_eq!(sizes, [4, 4, 2]);
        let mut seen: Vec<usize> = b.iter().flat_map(|x| x.indices.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_same_batches() {
        let s = sentences(20);
        let v = vocab(&s);
        let a = make_batches(&s, Some(&s), &v, 6, 9).unwrap();
        let b = make_batches(&s, Some(&s), &v, 6, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(TripletBatch::has_soft_negatives));
    }

    #[test]
    fn different_seeds_reorder() {
        let s = sentences(10);
        let v = vocab(&s);
        let first = make_batches(&s, None, &v, 4, 0).unwrap()[0].indices.clone();
        let differing = (1..50u64).filter(|&e| make_batches(&s, None, &v, 4, e).unwrap()[0].indices != first).count();
        assert!(differing >= 48);
    }

    #[test]
    fn vocab_without_reserved_tokens() {
        assert!(matches!(Vocabulary::from_tokens(vec!["x".to_string()]), Err(Error::Config(_))));
    }

    #[test]
    fn misaligned_negations() {
        let s = sentences(3);
        let v = vocab(&s);
        assert!(matches!(make_batches(&s, Some(&s[..2]), &v, 2, 0), Err(Error::Input(_))));
        assert!(make_batches(&s, None, &v, 0, 0).is_err());
    }

    #[test]
    fn holdout_partitions() {
        let (t, h) = holdout_split(100, 0.1, 3).unwrap();
        assert_eq!((t.len(), h.len()), (90, 10));
        let mut all: Vec<usize> = t.iter().chain(&h).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert!(holdout_split(10, 1.0, 0).is_err());
    }

    #[test]
    fn negation_pairs() {
        let p = parse_negation_pairs("a\tnot a\r\n\nb\tnot b\n").unwrap();
        assert_eq!(p.len(), 2);
        assert!(parse_negation_pairs("just one column").is_err());
    }
}
