use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::spearman::{average_ranks, spearman, spearman_closed_form};
use crate::error::{Error, Result};

/// Differences between the tie-corrected and closed-form ρ below this are
/// not reported.
pub const CLOSED_FORM_REPORT_GAP: f64 = 1e-9;

/// One scored pair with its ranks among the pairs of its subtask.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairScore {
    pub sentence1: String,
    pub sentence2: String,
    pub gold: f64,
    pub cosine: f64,
    /// Rank of the gold score (1 = least similar).
    pub rank_gold: f64,
    /// Rank of the predicted cosine.
    pub rank_pred: f64,
    /// `(rank_pred - rank_gold)²`.
    pub squared_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubtaskReport {
    pub subtask: String,
    /// Tie-corrected Spearman ρ.
    pub rho: f64,
    /// The closed-form value, present only when it differs from `rho`.
    pub rho_closed_form: Option<f64>,
    /// Pairs left out because an embedding was degenerate.
    pub excluded: usize,
    pub pairs: Vec<PairScore>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub subtasks: Vec<SubtaskReport>,
    /// Unweighted mean of the per-subtask ρ.
    pub average: f64,
    pub excluded: usize,
}

impl EvalReport {
    pub fn subtask(&self, name: &str) -> Option<&SubtaskReport> {
        self.subtasks.iter().find(|s| s.subtask == name)
    }

    pub fn rho(&self, name: &str) -> Option<f64> {
        self.subtask(name).map(|s| s.rho)
    }
}

/// A pair to score; `cosine` is `None` when an embedding was degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair<'a> {
    pub subtask: &'a str,
    pub sentence1: &'a str,
    pub sentence2: &'a str,
    pub gold: f64,
    pub cosine: Option<f64>,
}

/// Ranks and correlates one subtask's pairs.
pub fn score_subtask(subtask: &str, pairs: &[ScoredPair<'_>]) -> Result<SubtaskReport> {
    let kept: Vec<&ScoredPair<'_>> = pairs.iter().filter(|p| p.cosine.is_some()).collect();
    let gold: Vec<f64> = kept.iter().map(|p| p.gold).collect();
    let pred: Vec<f64> = kept.iter().map(|p| p.cosine.expect("filtered")).collect();
    let rho = spearman(&gold, &pred).map_err(|e| match e {
        Error::UndefinedCorrelation(m) => Error::UndefinedCorrelation(format!("{}: {}", subtask, m)),
        other => other,
    })?;
    let closed = spearman_closed_form(&gold, &pred)?;
    let rg = average_ranks(&gold)?;
    let rp = average_ranks(&pred)?;
    let scored = kept
        .iter()
        .enumerate()
        .map(|(i, p)| PairScore {
            sentence1: p.sentence1.into(),
            sentence2: p.sentence2.into(),
            gold: p.gold,
            cosine: pred[i],
            rank_gold: rg[i],
            rank_pred: rp[i],
            squared_error: (rp[i] - rg[i]) * (rp[i] - rg[i]),
        })
        .collect();
    Ok(SubtaskReport {
        subtask: subtask.into(),
        rho,
        rho_closed_form: ((rho - closed).abs() > CLOSED_FORM_REPORT_GAP).then_some(closed),
        excluded: pairs.len() - kept.len(),
        pairs: scored,
    })
}

/// Groups pairs by subtask (in first-seen order) and scores each group.
pub fn build_report(pairs: &[ScoredPair<'_>]) -> Result<EvalReport> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<ScoredPair<'_>>> = BTreeMap::new();
    for p in pairs {
        if !groups.contains_key(p.subtask) {
            order.push(p.subtask);
        }
        groups.entry(p.subtask).or_default().push(p.clone());
    }
    let subtasks = order.iter().map(|s| score_subtask(s, &groups[s])).collect::<Result<Vec<_>>>()?;
    let rhos: Vec<f64> = subtasks.iter().map(|s| s.rho).collect();
    let average = average_rho(&rhos)?;
    let excluded = subtasks.iter().map(|s| s.excluded).sum();
    Ok(EvalReport { subtasks, average, excluded })
}

/// Unweighted mean of per-subtask correlations.
pub fn average_rho(rhos: &[f64]) -> Result<f64> {
    if rhos.is_empty() {
        return Err(Error::Input("no subtasks to average".into()));
    }
    Ok(rhos.iter().sum::<f64>() / rhos.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    /// Predicted rank above the gold rank.
    Overestimated,
    Underestimated,
}

impl Direction {
    pub fn of(rank_gold: f64, rank_pred: f64) -> Self {
        if rank_pred > rank_gold {
            Direction::Overestimated
        } else {
            Direction::Underestimated
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Overestimated => "overestimated",
            Direction::Underestimated => "underestimated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorEntry {
    pub subtask: String,
    pub sentence1: String,
    pub sentence2: String,
    pub rank_gold: f64,
    pub rank_pred: f64,
    pub squared_error: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorAnalysis {
    pub entries: Vec<ErrorEntry>,
    /// Remarks such as a `k` larger than a subtask.
    pub notes: Vec<String>,
}

/// Squared rank error of one pair.
pub fn rank_error(rank_gold: f64, rank_pred: f64) -> f64 {
    (rank_pred - rank_gold) * (rank_pred - rank_gold)
}

/// The `k` pairs with the largest squared rank error in each subtask,
/// largest first. Ties keep report order.
pub fn error_analysis(report: &EvalReport, k: usize) -> Result<ErrorAnalysis> {
    if k == 0 {
        return Err(Error::Input("k must be at least 1".into()));
    }
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    for sub in &report.subtasks {
        let n = sub.pairs.len();
        if k > n {
            notes.push(format!("{}: k = {} exceeds {} pairs; returning all", sub.subtask, k, n));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| sub.pairs[b].squared_error.total_cmp(&sub.pairs[a].squared_error).then(a.cmp(&b)));
        for &i in idx.iter().take(k) {
            let p = &sub.pairs[i];
            entries.push(ErrorEntry {
                subtask: sub.subtask.clone(),
                sentence1: p.sentence1.clone(),
                sentence2: p.sentence2.clone(),
                rank_gold: p.rank_gold,
                rank_pred: p.rank_pred,
                squared_error: rank_error(p.rank_gold, p.rank_pred),
                direction: Direction::of(p.rank_gold, p.rank_pred),
            });
        }
    }
    Ok(ErrorAnalysis { entries, notes })
}
