use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Tense {
    Past,
    Pres,
    Fut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Number {
    Sing,
    Plur,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VerbForm {
    Fin,
    Inf,
    Part,
    Ger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Mood {
    Ind,
    Imp,
    Sub,
    Cnd,
}

/// The morphological features the negation rules look at.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Features {
    pub tense: Option<Tense>,
    pub person: Option<u8>,
    pub number: Option<Number>,
    pub verb_form: Option<VerbForm>,
    pub mood: Option<Mood>,
}

impl Features {
    /// Parses a CoNLL-U FEATS column (`Mood=Ind|Tense=Past|...` or `_`).
    /// Unknown features are ignored.
    pub fn parse(s: &str) -> Self {
        let mut f = Features::default();
        if s == "_" {
            return f;
        }
        for kv in s.split('|') {
            let Some((k, v)) = kv.split_once('=') else { continue };
            match k {
                "Tense" => {
                    f.tense = match v {
                        "Past" => Some(Tense::Past),
                        "Pres" => Some(Tense::Pres),
                        "Fut" => Some(Tense::Fut),
                        _ => None,
                    }
                }
                "Person" => f.person = v.parse().ok(),
                "Number" => {
                    f.number = match v {
                        "Sing" => Some(Number::Sing),
                        "Plur" => Some(Number::Plur),
                        _ => None,
                    }
                }
                "VerbForm" => {
                    f.verb_form = match v {
                        "Fin" => Some(VerbForm::Fin),
                        "Inf" => Some(VerbForm::Inf),
                        "Part" => Some(VerbForm::Part),
                        "Ger" => Some(VerbForm::Ger),
                        _ => None,
                    }
                }
                "Mood" => {
                    f.mood = match v {
                        "Ind" => Some(Mood::Ind),
                        "Imp" => Some(Mood::Imp),
                        "Sub" => Some(Mood::Sub),
                        "Cnd" => Some(Mood::Cnd),
                        _ => None,
                    }
                }
                _ => {}
            }
        }
        f
    }

    /// Renders the features back to CoNLL-U order (alphabetical by key).
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if let Some(m) = self.mood {
            parts.push(format!("Mood={:?}", m));
        }
        if let Some(n) = self.number {
            parts.push(format!("Number={:?}", n));
        }
        if let Some(p) = self.person {
            parts.push(format!("Person={}", p));
        }
        if let Some(t) = self.tense {
            parts.push(format!("Tense={:?}", t));
        }
        if let Some(v) = self.verb_form {
            parts.push(format!("VerbForm={:?}", v));
        }
        if parts.is_empty() {
            String::from("_")
        } else {
            parts.join("|")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParsedToken {
    pub form: String,
    pub lemma: String,
    /// Universal POS tag.
    pub upos: String,
    /// Language-specific tag (Penn tags for English), if any.
    pub xpos: Option<String>,
    /// 1-based head index; 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub feats: Features,
    /// Whether a space follows this token in the raw text.
    pub space_after: bool,
}

impl ParsedToken {
    pub fn new(form: &str, lemma: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Self {
            form: form.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            xpos: None,
            head,
            deprel: deprel.into(),
            feats: Features::default(),
            space_after: true,
        }
    }

    pub fn with_feats(mut self, feats: &str) -> Self {
        self.feats = Features::parse(feats);
        self
    }

    pub fn with_xpos(mut self, xpos: &str) -> Self {
        self.xpos = Some(xpos.into());
        self
    }

    pub fn no_space_after(mut self) -> Self {
        self.space_after = false;
        self
    }

    pub fn lower(&self) -> String {
        self.form.to_lowercase()
    }
}

/// Raw text plus its dependency parse.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParsedSentence {
    pub text: String,
    pub tokens: Vec<ParsedToken>,
}

impl ParsedSentence {
    /// Validates the parse: non-empty, heads in range, exactly one root.
    pub fn new(text: String, tokens: Vec<ParsedToken>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Input("parsed sentence has no tokens".into()));
        }
        let n = tokens.len();
        for (i, t) in tokens.iter().enumerate() {
            if t.head > n {
                return Err(Error::Data(format!("token {} has head {} beyond {} tokens", i + 1, t.head, n)));
            }
        }
        let roots = tokens.iter().filter(|t| t.head == 0 || t.deprel == "root").count();
        if roots != 1 || !tokens.iter().any(|t| t.head == 0 && t.deprel == "root") {
            return Err(Error::Data(format!("expected exactly one root, found {}", roots)));
        }
        Ok(Self { text, tokens })
    }

    /// 0-based index of the root token.
    pub fn root(&self) -> usize {
        self.tokens.iter().position(|t| t.head == 0).expect("validated at construction")
    }

    /// 0-based indices of the dependents of token `i` (0-based).
    pub fn children(&self, i: usize) -> Vec<usize> {
        self.tokens.iter().enumerate().filter(|(_, t)| t.head == i + 1).map(|(j, _)| j).collect()
    }

    /// Joins the surface forms, honoring each token's `space_after`.
    pub fn surface(&self) -> String {
        detokenize(&self.tokens)
    }
}

pub(crate) fn detokenize(tokens: &[ParsedToken]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        out.push_str(&t.form);
        if t.space_after && i + 1 < tokens.len() {
            out.push(' ');
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NegationRule {
    /// R1: drop an existing `not`/`n't` (undoing do-support when present).
    RemoveNegator,
    /// R2: `not` after the first auxiliary or finite copula.
    Auxiliary,
    /// R3: `not` after a modal.
    Modal,
    /// R4: do/does/did + `not` before the bare lexical verb.
    DoSupport,
}

impl NegationRule {
    pub fn id(&self) -> &'static str {
        match self {
            NegationRule::RemoveNegator => "R1",
            NegationRule::Auxiliary => "R2",
            NegationRule::Modal => "R3",
            NegationRule::DoSupport => "R4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NegationResult {
    pub text: String,
    pub rule: NegationRule,
    /// 0-based token position of the inserted or removed negator, in the
    /// output token sequence for insertions and the input one for removals.
    pub position: usize,
    pub tokens: Vec<ParsedToken>,
}
