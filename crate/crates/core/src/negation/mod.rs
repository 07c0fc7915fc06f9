//! Rule-based explicit negation of English sentences.
//!
//! Rules run over a dependency parse (usually loaded from CoNLL-U by the std
//! crate). The first matching rule wins:
//!
//! 1. an existing `not`/`n't` on the root is removed (polarity flip);
//! 2. `not` goes after the first finite auxiliary or copula;
//! 3. `not` goes after a modal;
//! 4. a finite lexical root gets do/does/did + `not` and is replaced by its lemma.

mod morph;
mod rules;
mod tagger;
mod types;

use alloc::string::String;
use alloc::vec::Vec;

pub use morph::{analyze_verb, is_modal, past_participle, past_tense, present_participle, third_singular, VerbShape};
pub use rules::{negate, NegateOptions};
pub use tagger::{parse as heuristic_parse, split_words};
pub use types::{Features, Mood, NegationResult, NegationRule, Number, ParsedSentence, ParsedToken, Tense, VerbForm};

use crate::error::{Error, Result};

/// Why a sentence produced no negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SkipReason {
    NoFiniteVerb,
    AlreadyNegated,
}

impl SkipReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            SkipReason::NoFiniteVerb => "NoFiniteVerb",
            SkipReason::AlreadyNegated => "AlreadyNegated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Skip {
    /// 1-based position in the input.
    pub line: usize,
    pub text: String,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NegatedPair {
    /// 1-based position in the input.
    pub line: usize,
    pub original: String,
    pub negation: String,
    pub rule: NegationRule,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorpusNegation {
    pub pairs: Vec<NegatedPair>,
    pub skips: Vec<Skip>,
}

/// Negates every parse, keeping input order. `sentences` are the original
/// texts written to the output; `parses` must align with them one to one.
pub fn negate_corpus(sentences: &[String], parses: &[ParsedSentence], opts: &NegateOptions) -> Result<CorpusNegation> {
    if sentences.len() != parses.len() {
        return Err(Error::Input(alloc::format!(
            "{} sentences but {} parses",
            sentences.len(),
            parses.len()
        )));
    }
    let mut out = CorpusNegation::default();
    for (i, (text, parse)) in sentences.iter().zip(parses).enumerate() {
        match negate(parse, opts) {
            Ok(r) => out.pairs.push(NegatedPair { line: i + 1, original: text.clone(), negation: r.text, rule: r.rule }),
            Err(Error::NoFiniteVerb) => out.skips.push(Skip { line: i + 1, text: text.clone(), reason: SkipReason::NoFiniteVerb }),
            Err(Error::AlreadyNegated) => {
                out.skips.push(Skip { line: i + 1, text: text.clone(), reason: SkipReason::AlreadyNegated })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn corpus(raw: &[&str]) -> (Vec<String>, Vec<ParsedSentence>) {
        let s: Vec<String> = raw.iter().map(|r| r.to_string()).collect();
        let p = raw.iter().map(|r| heuristic_parse(r).unwrap()).collect();
        (s, p)
    }

    #[test]
    fn all_negatable() {
        let (s, p) = corpus(&["She runs.", "A man is doing pull-ups.", "Birds can fly."]);
        let out = negate_corpus(&s, &p, &NegateOptions::default()).unwrap();
        assert_eq!(out.pairs.len(), 3);
        assert!(out.skips.is_empty());
        assert_eq!(out.pairs[2].negation, "Birds can not fly.");
    }

    #[test]
    fn fragment_is_reported() {
        let (s, p) = corpus(&["She runs.", "A red car.", "He sleeps."]);
        let out = negate_corpus(&s, &p, &NegateOptions::default()).unwrap();
        assert_eq!(out.pairs.len(), 2);
        assert_eq!(out.skips, [Skip { line: 2, text: "A red car.".into(), reason: SkipReason::NoFiniteVerb }]);
        assert_eq!(out.pairs[1].line, 3);
    }

    #[test]
    fn empty_and_mismatch() {
        let out = negate_corpus(&[], &[], &NegateOptions::default()).unwrap();
        assert!(out.pairs.is_empty() && out.skips.is_empty());
        let (s, p) = corpus(&["She runs."]);
        assert!(matches!(negate_corpus(&s, &p[..0], &NegateOptions::default()), Err(Error::Input(_))));
    }
}
