//! Corpus, STS, negation and vocabulary files, plus the tabular outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sncse_core::data::{parse_corpus, parse_negation_pairs, parse_sts_line, StsPair};
use sncse_core::encoder::Vocabulary;
use sncse_core::evaluation::{ErrorAnalysis, SimilarityDistribution};
use sncse_core::negation::{CorpusNegation, Skip};
use sncse_core::trainer::{EvalRecord, StepRecord, SweepRow, TrainLog};

use crate::error::{read_to_string, write_file, Error, Result};

/// One sentence per line; blank lines dropped.
pub fn load_corpus(path: &Path) -> Result<Vec<String>> {
    Ok(parse_corpus(&read_to_string(path)?))
}

/// All STS pairs under a root directory laid out as
/// `<root>/<subtask>/<split>.tsv`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StsCollection {
    pub pairs: Vec<StsPair>,
    /// Pair count per `(subtask, split)`.
    pub counts: BTreeMap<(String, String), usize>,
}

impl StsCollection {
    pub fn split(&self, split: &str, subtasks: &[String]) -> Vec<StsPair> {
        self.pairs
            .iter()
            .filter(|p| p.split == split && (subtasks.is_empty() || subtasks.contains(&p.subtask)))
            .cloned()
            .collect()
    }

    pub fn subtasks(&self) -> Vec<String> {
        let mut out: Vec<String> = self.counts.keys().map(|(s, _)| s.clone()).collect();
        out.dedup();
        out
    }
}

pub fn load_sts_file(path: &Path, subtask: &str, split: &str) -> Result<Vec<StsPair>> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pair = parse_sts_line(line, i + 1, subtask, split).map_err(|e| located(path, e))?;
        out.push(pair);
    }
    Ok(out)
}

/// Loads every `<subtask>/<split>.tsv` under `root`, in sorted order.
pub fn load_sts(root: &Path) -> Result<StsCollection> {
    let mut coll = StsCollection::default();
    let mut dirs: Vec<_> = std::fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    for dir in dirs {
        let subtask = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let mut files: Vec<_> = std::fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
            .collect();
        files.sort();
        for file in files {
            let split = file.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let pairs = load_sts_file(&file, &subtask, &split)?;
            coll.counts.insert((subtask.clone(), split), pairs.len());
            coll.pairs.extend(pairs);
        }
    }
    Ok(coll)
}

pub fn load_negations(path: &Path) -> Result<Vec<(String, String)>> {
    parse_negation_pairs(&read_to_string(path)?).map_err(|e| located(path, e))
}

/// Moves a core `line N: ...` data error onto the file it came from.
fn located(path: &Path, e: sncse_core::Error) -> Error {
    if let sncse_core::Error::Data(m) = &e {
        if let Some((n, rest)) = m.strip_prefix("line ").and_then(|r| r.split_once(": ")) {
            if let Ok(line) = n.parse() {
                return Error::format(path, line, rest);
            }
        }
    }
    Error::Core(e)
}

/// Pairs each corpus sentence with its negation. Sentences without one
/// (skipped by the negation step) are dropped. Pairs must follow corpus
/// order.
pub fn align_negations(corpus: &[String], pairs: &[(String, String)]) -> Result<(Vec<String>, Vec<String>)> {
    let mut sentences = Vec::with_capacity(pairs.len());
    let mut negations = Vec::with_capacity(pairs.len());
    let mut at = 0;
    for (orig, neg) in pairs {
        match corpus[at..].iter().position(|s| s == orig) {
            Some(k) => {
                at += k + 1;
                sentences.push(orig.clone());
                negations.push(neg.clone());
            }
            None => {
                return Err(Error::Config(format!("negation pair {:?} does not match the corpus (in order)", orig)));
            }
        }
    }
    Ok((sentences, negations))
}

pub fn negations_tsv(neg: &CorpusNegation) -> String {
    let mut out = String::new();
    for p in &neg.pairs {
        let _ = writeln!(out, "{}\t{}", p.original, p.negation);
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SkipReport {
    pub sentences: usize,
    pub negated: usize,
    /// Parses dropped by the reader for lack of a root.
    pub missing_root: usize,
    pub skipped: Vec<SkipEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SkipEntry {
    pub line: usize,
    pub text: String,
    pub reason: String,
}

impl SkipReport {
    pub fn new(neg: &CorpusNegation, missing_root: usize) -> Self {
        let entry = |s: &Skip| SkipEntry { line: s.line, text: s.text.clone(), reason: s.reason.as_str().into() };
        Self {
            sentences: neg.pairs.len() + neg.skips.len(),
            negated: neg.pairs.len(),
            missing_root,
            skipped: neg.skips.iter().map(entry).collect(),
        }
    }
}

/// One token per line; the line number (from 0) is the id.
pub fn write_vocab(path: &Path, vocab: &Vocabulary) -> Result<()> {
    let mut s = vocab.tokens().join("\n");
    s.push('\n');
    write_file(path, s.as_bytes())
}

pub fn load_vocab(path: &Path) -> Result<Vocabulary> {
    let text = read_to_string(path)?;
    let tokens: Vec<String> = text.lines().map(String::from).collect();
    Ok(Vocabulary::from_tokens(tokens)?)
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum LogLine<'a> {
    Step(&'a StepRecord),
    Eval(&'a EvalRecord),
    Summary { steps: usize, best_step: Option<usize>, best_dev_rho: Option<f64> },
}

pub fn step_json(rec: &StepRecord) -> String {
    serde_json::to_string(&LogLine::Step(rec)).expect("plain data serializes")
}

pub fn eval_json(rec: &EvalRecord) -> String {
    serde_json::to_string(&LogLine::Eval(rec)).expect("plain data serializes")
}

/// Line-delimited JSON: step records, eval records at their position in
/// time, then a summary line.
pub fn train_log_jsonl(log: &TrainLog) -> String {
    let mut out = String::new();
    let mut evals = log.evals.iter().peekable();
    for s in &log.steps {
        while let Some(e) = evals.next_if(|e| e.step <= s.step) {
            out.push_str(&eval_json(e));
            out.push('\n');
        }
        out.push_str(&step_json(s));
        out.push('\n');
    }
    for e in evals {
        out.push_str(&eval_json(e));
        out.push('\n');
    }
    let summary = LogLine::Summary { steps: log.steps.len(), best_step: log.best_step, best_dev_rho: log.best_dev_rho };
    out.push_str(&serde_json::to_string(&summary).expect("plain data serializes"));
    out.push('\n');
    out
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{}", x)
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("alpha,beta,lambda,dev_rho,label\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.alpha, r.beta, r.lambda, num(r.dev_rho), r.label);
    }
    out
}

/// Role-of-negation summary: one row per loss mode.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ModeRow {
    pub mode: String,
    pub steps: usize,
    pub dev_rho: f64,
    pub test_rho: Option<f64>,
    /// Whether NL ≥ InfoNCE held on every logged batch.
    pub nl_bound_held: bool,
}

pub fn modes_csv(rows: &[ModeRow]) -> String {
    let mut out = String::from("mode,steps,dev_rho,test_rho,nl_ge_infonce\n");
    for r in rows {
        let test = r.test_rho.map(num).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", r.mode, r.steps, num(r.dev_rho), test, r.nl_bound_held);
    }
    out
}

fn tsv_field(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

/// Columns: subtask, sentence1, sentence2, R_G, R_E, error, direction.
pub fn analysis_tsv(a: &ErrorAnalysis) -> String {
    let mut out = String::from("subtask\tsentence1\tsentence2\tR_G\tR_E\terror\tdirection\n");
    for e in &a.entries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            tsv_field(&e.subtask),
            tsv_field(&e.sentence1),
            tsv_field(&e.sentence2),
            e.rank_gold,
            e.rank_pred,
            e.squared_error,
            e.direction.as_str()
        );
    }
    out
}

/// Columns: bin_left, count_pos, count_neg, count_softneg.
pub fn histogram_csv(d: &SimilarityDistribution) -> String {
    let mut out = String::from("bin_left,count_pos,count_neg,count_softneg\n");
    for (left, p, n, s) in d.rows() {
        let _ = writeln!(out, "{:.2},{},{},{}", left, p, n, s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn align_drops_skipped_sentences() {
        let corpus: Vec<String> = ["a b.", "A red car.", "c d."].iter().map(|s| s.to_string()).collect();
        let pairs = vec![("a b.".to_string(), "not a b.".to_string()), ("c d.".to_string(), "not c d.".to_string())];
        let (s, n) = align_negations(&corpus, &pairs).unwrap();
        assert_eq!(s, vec!["a b.", "c d."]);
        assert_eq!(n.len(), 2);
        let bad = vec![("zzz".to_string(), "x".to_string())];
        assert!(align_negations(&corpus, &bad).is_err());
    }

    #[test]
    fn histogram_has_header_and_all_bins() {
        let d = SimilarityDistribution::from_similarities(&[1.0], &[0.0], &[0.5]).unwrap();
        let csv = histogram_csv(&d);
        assert_eq!(csv.lines().count(), 201);
        assert!(csv.starts_with("bin_left,count_pos,count_neg,count_softneg\n-1.00,0,0,0"));
        assert!(csv.contains("\n0.99,1,0,0\n"));
    }
}
