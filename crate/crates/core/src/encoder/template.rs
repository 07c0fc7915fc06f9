use alloc::string::String;
use alloc::vec::Vec;

use super::vocab::{tokenize, Vocabulary, MASK};
use crate::error::{Error, Result};

/// Longest sequence the encoder accepts, prompt included.
pub const MAX_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateVariant {
    /// `the sentence : " X " means [MASK] .`
    Original,
    /// `the sentence of " X " means [MASK] .`
    Positive,
    /// Same prompt as [`TemplateVariant::Positive`].
    SoftNegative,
}

/// Token ids of one prompted sentence and the index of its `[MASK]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompted {
    pub ids: Vec<usize>,
    pub mask_pos: usize,
}

/// Anchor, positive and soft-negative prompts for one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptedTriplet {
    pub text: String,
    pub negation: Option<String>,
    pub original: Prompted,
    pub positive: Prompted,
    pub soft_negative: Option<Prompted>,
}

impl PromptedTriplet {
    pub fn new(text: &str, negation: Option<&str>, vocab: &Vocabulary) -> Result<Self> {
        Ok(Self {
            text: text.into(),
            negation: negation.map(String::from),
            original: apply_template(text, TemplateVariant::Original, vocab)?,
            positive: apply_template(text, TemplateVariant::Positive, vocab)?,
            soft_negative: negation
                .map(|n| apply_template(n, TemplateVariant::SoftNegative, vocab))
                .transpose()?,
        })
    }
}

/// Wraps `sentence` in its prompt. Sentences too long for [`MAX_LEN`] are
/// truncated so the closing part of the prompt always survives.
pub fn apply_template(sentence: &str, variant: TemplateVariant, vocab: &Vocabulary) -> Result<Prompted> {
    let body = tokenize(sentence);
    if body.is_empty() {
        return Err(Error::Input("cannot prompt an empty sentence".into()));
    }
    let link = match variant {
        TemplateVariant::Original => ":",
        TemplateVariant::Positive | TemplateVariant::SoftNegative => "of",
    };
    let head = ["the", "sentence", link, "\""];
    let tail = ["\"", "means", MASK, "."];
    let room = MAX_LEN - head.len() - tail.len();
    let mut ids = Vec::with_capacity(head.len() + body.len().min(room) + tail.len());
    ids.extend(head.iter().map(|t| vocab.id(t)));
    ids.extend(body.iter().take(room).map(|t| vocab.id(t)));
    let mask_pos = ids.len() + 2;
    ids.extend(tail.iter().map(|t| vocab.id(t)));
    debug_assert_eq!(ids[mask_pos], vocab.mask_id());
    Ok(Prompted { ids, mask_pos })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn vocab() -> Vocabulary {
        Vocabulary::build(["hello world", "hello world"], 1)
    }

    #[test]
    fn original_template() {
        let v = vocab();
        let p = apply_template("hello world", TemplateVariant::Original, &v).unwrap();
        let expected: Vec<usize> = ["the", "sentence", ":", "\"", "hello", "world", "\"", "means", "[MASK]", "."]
            .iter()
            .map(|t| v.id(t))
            .collect();
        assert_eq!(p.ids, expected);
        assert_eq!(p.mask_pos, 8);
    }

    #[test]
    fn positive_template_swaps_one_word() {
        let v = vocab();
        let p = apply_template("Hello World", TemplateVariant::Positive, &v).unwrap();
        let expected: Vec<usize> = ["the", "sentence", "of", "\"", "hello", "world", "\"", "means", "[MASK]", "."]
            .iter()
            .map(|t| v.id(t))
            .collect();
        assert_eq!(p.ids, expected);
        assert_eq!(p.mask_pos, 8);
        let n = apply_template("Hello World", TemplateVariant::SoftNegative, &v).unwrap();
        assert_eq!(n, p);
    }

    #[test]
    fn empty_sentence_is_rejected() {
        let v = vocab();
        for var in [TemplateVariant::Original, TemplateVariant::Positive, TemplateVariant::SoftNegative] {
            assert!(matches!(apply_template("", var, &v), Err(Error::Input(_))));
            assert!(matches!(apply_template("   ", var, &v), Err(Error::Input(_))));
        }
    }

    #[test]
    fn long_sentences_are_truncated_to_max_len() {
        let v = vocab();
        let long = vec!["hello"; 200].join(" ");
        let p = apply_template(&long, TemplateVariant::Original, &v).unwrap();
        assert_eq!(p.ids.len(), MAX_LEN);
        assert_eq!(p.ids[p.mask_pos], v.mask_id());
    }

    #[test]
    fn exactly_one_mask() {
        let v = vocab();
        let t = PromptedTriplet::new("hello world", Some("hello not world"), &v).unwrap();
        for p in [&t.original, &t.positive, t.soft_negative.as_ref().unwrap()] {
            assert_eq!(p.ids.iter().filter(|&&i| i == v.mask_id()).count(), 1);
            assert_eq!(p.ids[p.mask_pos], v.mask_id());
        }
    }
}
