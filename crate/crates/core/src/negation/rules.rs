//! Rule-based negation over a dependency parse.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::morph::{analyze_verb, is_modal, past_tense, third_singular, VerbShape};
use super::types::{detokenize, Features, Number, NegationResult, NegationRule, ParsedSentence, ParsedToken, Tense, VerbForm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NegateOptions {
    /// Report already-negated sentences as [`Error::AlreadyNegated`]
    /// instead of removing their negator.
    pub skip_negated: bool,
}

/// Token list editing that keeps 1-based heads consistent.
struct Editor {
    tokens: Vec<ParsedToken>,
}

impl Editor {
    /// Removes token `idx`; its dependents reattach to its head.
    fn remove(&mut self, idx: usize) -> ParsedToken {
        let removed = self.tokens.remove(idx);
        let own = idx + 1;
        for t in &mut self.tokens {
            if t.head == own {
                t.head = removed.head;
            }
        }
        for t in &mut self.tokens {
            if t.head > own {
                t.head -= 1;
            }
        }
        removed
    }

    /// Inserts `tok` at `pos`; `head_old` is the 0-based index of its head
    /// before the insertion.
    fn insert(&mut self, pos: usize, mut tok: ParsedToken, head_old: usize) {
        for t in &mut self.tokens {
            if t.head > pos {
                t.head += 1;
            }
        }
        tok.head = if head_old >= pos { head_old + 2 } else { head_old + 1 };
        self.tokens.insert(pos, tok);
    }
}

fn is_negator(t: &ParsedToken) -> bool {
    matches!(t.lower().as_str(), "not" | "n't")
}

/// Single-token negated auxiliaries ("isn't", "cannot") and their positive form.
fn fused_negation(form: &str) -> Option<String> {
    let lower = form.to_lowercase();
    if lower == "cannot" {
        return Some(keep_case(form, "can"));
    }
    let stem = lower.strip_suffix("n't").or_else(|| lower.strip_suffix("n’t"))?;
    let positive = match stem {
        "ca" => "can",
        "wo" => "will",
        "sha" => "shall",
        "" => return None,
        s => s,
    };
    Some(keep_case(form, positive))
}

/// Positive form of the host of a split `n't` clitic.
fn contraction_host(form: &str) -> String {
    match form.to_lowercase().as_str() {
        "ca" => keep_case(form, "can"),
        "wo" => keep_case(form, "will"),
        "sha" => keep_case(form, "shall"),
        _ => form.to_string(),
    }
}

fn keep_case(original: &str, word: &str) -> String {
    if original.chars().next().is_some_and(char::is_uppercase) {
        capitalize(word)
    } else {
        word.to_string()
    }
}

fn capitalize(word: &str) -> String {
    let mut c = word.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn decapitalize(word: &str) -> String {
    let mut c = word.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

/// Keeps sentence-initial capitalization when the first token changes.
fn fix_initial_case(original_first: &ParsedToken, tokens: &mut [ParsedToken], first_changed: bool) {
    if !first_changed || tokens.is_empty() || !starts_upper(&original_first.form) {
        return;
    }
    let keep_upper = |t: &ParsedToken| {
        t.form == "I" || t.upos == "PROPN" || (t.form.len() > 1 && t.form.chars().all(|c| !c.is_lowercase()))
    };
    tokens[0].form = capitalize(&tokens[0].form);
    for t in tokens.iter_mut().skip(1) {
        if t.form.eq_ignore_ascii_case(&original_first.form) || t.lemma == original_first.lemma {
            if !keep_upper(original_first) && starts_upper(&t.form) {
                t.form = decapitalize(&t.form);
            }
            break;
        }
    }
}

fn lemma_of(t: &ParsedToken) -> String {
    if !t.lemma.is_empty() && t.lemma != "_" {
        return t.lemma.to_lowercase();
    }
    analyze_verb(&t.form).map(|(l, _)| l).unwrap_or_else(|| t.lower())
}

fn is_finite(t: &ParsedToken) -> bool {
    match t.feats.verb_form {
        Some(VerbForm::Fin) => true,
        Some(_) => false,
        None => match t.xpos.as_deref() {
            Some("VBZ" | "VBP" | "VBD" | "MD") => true,
            Some("VB" | "VBG" | "VBN" | "TO") => false,
            _ => {
                let lower = t.lower();
                super::morph::finite_aux_lemma(&lower).is_some()
                    || matches!(
                        analyze_verb(&lower).map(|(_, s)| s),
                        Some(VerbShape::Base | VerbShape::ThirdSingular | VerbShape::Past | VerbShape::PastOrParticiple)
                    )
            }
        },
    }
}

/// Whether the subject of `root` is third person singular, judged from the parse.
fn subject_third_singular(s: &ParsedSentence, root: usize) -> bool {
    let Some(subj) = s
        .children(root)
        .into_iter()
        .find(|&k| s.tokens[k].deprel == "nsubj" || s.tokens[k].deprel == "nsubj:pass")
    else {
        return false;
    };
    let t = &s.tokens[subj];
    if s.children(subj).iter().any(|&k| s.tokens[k].deprel == "conj") {
        return false;
    }
    match t.lower().as_str() {
        "he" | "she" | "it" | "this" | "that" | "someone" | "somebody" | "everyone" | "everybody" | "nobody" | "one" => {
            return true
        }
        "i" | "you" | "we" | "they" | "these" | "those" => return false,
        _ => {}
    }
    if let Some(n) = t.feats.number {
        return n == Number::Sing;
    }
    match t.xpos.as_deref() {
        Some("NN" | "NNP") => true,
        Some("NNS" | "NNPS") => false,
        _ => t.upos == "PROPN" || !t.lower().ends_with('s'),
    }
}

fn make_token(form: &str, lemma: &str, upos: &str, deprel: &str, feats: &str, xpos: &str) -> ParsedToken {
    ParsedToken::new(form, lemma, upos, 0, deprel).with_feats(feats).with_xpos(xpos)
}

/// Negates one parsed sentence with the four ordered rules.
///
/// Returns [`Error::NoFiniteVerb`] when no rule applies.
pub fn negate(s: &ParsedSentence, opts: &NegateOptions) -> Result<NegationResult> {
    let root = s.root();
    let kids = s.children(root);

    // R1: an existing negator
    let split_neg = kids.iter().copied().find(|&k| is_negator(&s.tokens[k]));
    let fused_neg = if split_neg.is_none() {
        kids.iter().copied().chain(core::iter::once(root)).find(|&k| fused_negation(&s.tokens[k].form).is_some())
    } else {
        None
    };
    if split_neg.is_some() || fused_neg.is_some() {
        if opts.skip_negated {
            return Err(Error::AlreadyNegated);
        }
        return Ok(remove_negator(s, root, split_neg, fused_neg));
    }

    // R2 / R3: first finite auxiliary or copula
    let mut hosts: Vec<usize> = kids
        .iter()
        .copied()
        .filter(|&k| {
            let d = s.tokens[k].deprel.as_str();
            (d == "aux" || d == "aux:pass" || d == "cop") && s.tokens[k].upos != "PART"
        })
        .collect();
    let root_tok = &s.tokens[root];
    if root_tok.upos == "AUX" || lemma_of(root_tok) == "be" {
        hosts.push(root);
    }
    hosts.sort_unstable();
    if let Some(&host) = hosts.iter().find(|&&h| is_finite(&s.tokens[h])) {
        let h = &s.tokens[host];
        let rule = if is_modal(&lemma_of(h)) || h.xpos.as_deref() == Some("MD") {
            NegationRule::Modal
        } else {
            NegationRule::Auxiliary
        };
        let mut ed = Editor { tokens: s.tokens.clone() };
        let mut not = make_token("not", "not", "PART", "advmod", "_", "RB");
        not.space_after = ed.tokens[host].space_after;
        ed.tokens[host].space_after = true;
        ed.insert(host + 1, not, root);
        let text = detokenize(&ed.tokens);
        return Ok(NegationResult { text, rule, position: host + 1, tokens: ed.tokens });
    }

    // R4: do-support for a finite lexical verb
    if root_tok.upos == "VERB" && is_finite(root_tok) {
        let lemma = lemma_of(root_tok);
        let shape = analyze_verb(&root_tok.form).map(|(_, sh)| sh);
        let f = &root_tok.feats;
        let xpos = root_tok.xpos.as_deref();
        let imperative = f.mood == Some(super::types::Mood::Imp);
        let past = !imperative
            && (f.tense == Some(Tense::Past)
                || xpos == Some("VBD")
                || (f.tense.is_none() && xpos.is_none() && matches!(shape, Some(VerbShape::Past | VerbShape::PastOrParticiple))));
        let third = !imperative
            && !past
            && ((f.person == Some(3) && f.number == Some(Number::Sing))
                || xpos == Some("VBZ")
                || (f.person.is_none() && xpos.is_none() && shape == Some(VerbShape::ThirdSingular))
                || (f.person.is_none() && xpos.is_none() && shape.is_none() && subject_third_singular(s, root)));
        let (do_form, do_feats, do_xpos) = if past {
            ("did", "Mood=Ind|Tense=Past|VerbForm=Fin", "VBD")
        } else if third {
            ("does", "Mood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin", "VBZ")
        } else if imperative {
            ("do", "Mood=Imp|VerbForm=Fin", "VB")
        } else {
            ("do", "Mood=Ind|Tense=Pres|VerbForm=Fin", "VBP")
        };
        let mut ed = Editor { tokens: s.tokens.clone() };
        let verb = &mut ed.tokens[root];
        verb.form = if root == 0 { lemma.clone() } else { keep_case(&verb.form, &lemma) };
        verb.lemma = lemma.clone();
        verb.feats = Features { verb_form: Some(VerbForm::Inf), ..Features::default() };
        verb.xpos = Some("VB".into());
        ed.insert(root, make_token(do_form, "do", "AUX", "aux", do_feats, do_xpos), root);
        ed.insert(root + 1, make_token("not", "not", "PART", "advmod", "_", "RB"), root + 1);
        fix_initial_case(&s.tokens[0], &mut ed.tokens, root == 0);
        let text = detokenize(&ed.tokens);
        return Ok(NegationResult { text, rule: NegationRule::DoSupport, position: root + 1, tokens: ed.tokens });
    }

    Err(Error::NoFiniteVerb)
}

fn remove_negator(s: &ParsedSentence, root: usize, split_neg: Option<usize>, fused_neg: Option<usize>) -> NegationResult {
    let mut ed = Editor { tokens: s.tokens.clone() };
    let position;
    let mut first_changed = false;
    let host_idx;
    if let Some(neg) = split_neg {
        position = neg;
        let removed = ed.remove(neg);
        host_idx = neg.checked_sub(1);
        if let Some(prev) = host_idx {
            let prev_tok = &mut ed.tokens[prev];
            if removed.lower() == "n't" || removed.form == "n’t" {
                prev_tok.form = contraction_host(&prev_tok.form);
            }
            prev_tok.space_after = removed.space_after;
        }
        first_changed = neg == 0;
    } else {
        let k = fused_neg.expect("caller checked");
        position = k;
        let tok = &mut ed.tokens[k];
        tok.form = fused_negation(&tok.form).expect("caller checked");
        host_idx = Some(k);
    }

    // undo do-support: "did not become" -> "became"
    let root_now = ed.tokens.iter().position(|t| t.head == 0).unwrap_or(root);
    if let Some(h) = host_idx {
        let aux = &ed.tokens[h];
        let is_do_aux = aux.head == root_now + 1 && aux.deprel == "aux" && lemma_of(aux) == "do";
        let root_tok = &ed.tokens[root_now];
        let bare = root_tok.upos == "VERB"
            && (root_tok.feats.verb_form == Some(VerbForm::Inf)
                || root_tok.xpos.as_deref() == Some("VB")
                || root_tok.lower() == lemma_of(root_tok));
        if is_do_aux && bare && h < root_now {
            let aux_lower = aux.lower();
            let lemma = lemma_of(root_tok);
            let (form, feats, xpos) = match aux_lower.as_str() {
                "did" => (past_tense(&lemma), "Mood=Ind|Tense=Past|VerbForm=Fin", "VBD"),
                "does" => (third_singular(&lemma), "Mood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin", "VBZ"),
                _ if aux.feats.mood == Some(super::types::Mood::Imp) || h == 0 && aux_lower == "do" => {
                    (lemma.clone(), "Mood=Imp|VerbForm=Fin", "VB")
                }
                _ => (lemma.clone(), "Mood=Ind|Tense=Pres|VerbForm=Fin", "VBP"),
            };
            let aux_space = ed.tokens[h].space_after;
            let aux_first = h == 0;
            let original_first = ed.tokens[0].clone();
            let rt = &mut ed.tokens[root_now];
            rt.form = form;
            rt.feats = Features::parse(feats);
            rt.xpos = Some(xpos.into());
            ed.remove(h);
            if h > 0 {
                ed.tokens[h - 1].space_after = ed.tokens[h - 1].space_after && aux_space;
            }
            if aux_first {
                fix_initial_case(&original_first, &mut ed.tokens, true);
            }
        }
    }
    if first_changed {
        fix_initial_case(&s.tokens[0], &mut ed.tokens, true);
    }
    let text = detokenize(&ed.tokens);
    NegationResult { text, rule: NegationRule::RemoveNegator, position, tokens: ed.tokens }
}
