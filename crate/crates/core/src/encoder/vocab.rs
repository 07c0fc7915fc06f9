use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const MASK: &str = "[MASK]";
pub const RESERVED: [&str; 3] = [PAD, UNK, MASK];

/// Every word the prompt templates use; always in the vocabulary.
pub const TEMPLATE_WORDS: [&str; 7] = ["the", "sentence", ":", "\"", "of", "means", "."];

/// Lowercases and splits on whitespace; every non-alphanumeric character
/// becomes its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
            continue;
        }
        if !cur.is_empty() {
            out.push(core::mem::take(&mut cur));
        }
        if !ch.is_whitespace() {
            out.push(ch.to_string());
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Token ↔ id map. Ids 0, 1, 2 are `[PAD]`, `[UNK]`, `[MASK]`; the template
/// words follow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from raw texts, keeping tokens seen at least
    /// `min_freq` times. Ordering is by descending count, then lexically.
    pub fn build<'a, I>(texts: I, min_freq: usize) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for t in texts {
            for tok in tokenize(t) {
                *counts.entry(tok).or_default() += 1;
            }
        }
        let mut ranked: Vec<(String, usize)> =
            counts.into_iter().filter(|(_, c)| *c >= min_freq.max(1)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut tokens: Vec<String> = RESERVED.iter().chain(TEMPLATE_WORDS.iter()).map(|s| s.to_string()).collect();
        for (tok, _) in ranked {
            if !tokens.contains(&tok) {
                tokens.push(tok);
            }
        }
        Self::from_tokens(tokens).expect("reserved tokens are present by construction")
    }

    /// Rebuilds a vocabulary from an id-ordered token list (e.g. a file
    /// with one token per line).
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        for (id, r) in RESERVED.iter().enumerate() {
            if tokens.get(id).map(String::as_str) != Some(*r) {
                return Err(Error::Config(format!("vocabulary must have {} at id {}", r, id)));
            }
        }
        let mut index = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate vocabulary token '{}'", t)));
            }
        }
        for w in TEMPLATE_WORDS {
            if !index.contains_key(w) {
                return Err(Error::Config(format!("vocabulary lacks template word '{}'", w)));
            }
        }
        Ok(Self { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Id of `token`, falling back to `[UNK]`.
    pub fn id(&self, token: &str) -> usize {
        self.get(token).unwrap_or(1)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn pad_id(&self) -> usize {
        0
    }

    pub fn unk_id(&self) -> usize {
        1
    }

    pub fn mask_id(&self) -> usize {
        2
    }
}
