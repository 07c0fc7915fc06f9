//! A small lexicon-and-suffix tagger producing shallow dependency parses.
//!
//! Good enough for short declarative sentences and imperatives; real corpora
//! should come with parses from a proper parser.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::morph::{analyze_verb, finite_aux_lemma, is_modal, VerbShape};
use super::types::{Features, ParsedSentence, ParsedToken};
use crate::error::{Error, Result};

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his", "its", "our", "their", "some", "every",
    "each", "no", "any", "many", "several", "two", "three", "another",
];
const PRONOUNS: &[(&str, u8, bool)] = &[
    ("i", 1, true),
    ("you", 2, false),
    ("he", 3, true),
    ("she", 3, true),
    ("it", 3, true),
    ("we", 1, false),
    ("they", 3, false),
    ("me", 1, true),
    ("him", 3, true),
    ("her", 3, true),
    ("us", 1, false),
    ("them", 3, false),
    ("someone", 3, true),
    ("everyone", 3, true),
    ("nobody", 3, true),
    ("something", 3, true),
    ("everything", 3, true),
    ("there", 3, true),
];
const ADPOSITIONS: &[&str] = &[
    "in", "on", "at", "with", "to", "from", "for", "of", "by", "under", "over", "into", "near", "behind", "across",
    "through", "about", "after", "before", "around", "up", "down", "out", "off", "onto", "along", "inside", "outside",
];
const CONJUNCTIONS: &[&str] = &["and", "or", "but"];
const ADVERBS: &[&str] = &[
    "very", "always", "often", "never", "already", "still", "just", "really", "now", "today", "yesterday", "tomorrow",
    "here", "again", "well", "too", "also", "soon", "home", "together", "fast", "hard",
];
const ADJECTIVES: &[&str] = &[
    "good", "bad", "happy", "sad", "red", "blue", "green", "black", "white", "big", "small", "old", "young", "new",
    "tall", "short", "hot", "cold", "tired", "hungry", "busy", "ready", "late", "early", "quiet", "loud", "famous",
    "fast", "slow", "long", "beautiful", "empty", "full", "open", "wet", "dry", "angry", "nice",
];

/// Splits raw text into word tokens with `space_after` flags. Contractions
/// are split the way treebanks do ("isn't" -> "is" "n't", "can't" -> "ca" "n't").
pub fn split_words(raw: &str) -> Vec<(String, bool)> {
    let mut out: Vec<(String, bool)> = Vec::new();
    for chunk in raw.split_whitespace() {
        let start = out.len();
        let chars: Vec<char> = chunk.chars().collect();
        let mut lo = 0;
        let mut hi = chars.len();
        let mut lead = Vec::new();
        while lo < hi && is_edge_punct(chars[lo]) {
            lead.push(chars[lo].to_string());
            lo += 1;
        }
        let mut trail = Vec::new();
        while hi > lo && is_edge_punct(chars[hi - 1]) {
            trail.push(chars[hi - 1].to_string());
            hi -= 1;
        }
        trail.reverse();
        for p in lead {
            out.push((p, false));
        }
        if lo < hi {
            let word: String = chars[lo..hi].iter().collect();
            for w in split_contraction(&word) {
                out.push((w, false));
            }
        }
        for p in trail {
            out.push((p, false));
        }
        if out.len() > start {
            let last = out.len() - 1;
            out[last].1 = true;
        }
    }
    if let Some(last) = out.last_mut() {
        last.1 = false;
    }
    out
}

fn is_edge_punct(c: char) -> bool {
    matches!(c, '.' | ',' | '!' | '?' | ';' | ':' | '"' | '(' | ')' | '[' | ']' | '“' | '”')
}

fn split_contraction(word: &str) -> Vec<String> {
    let lower = word.to_lowercase();
    if lower == "cannot" {
        return alloc::vec![word[..3].to_string(), word[3..].to_string()];
    }
    if lower.len() > 3 && lower.ends_with("n't") {
        let cut = word.len() - 3;
        return alloc::vec![word[..cut].to_string(), word[cut..].to_string()];
    }
    for suffix in ["'s", "'re", "'m", "'ll", "'ve", "'d"] {
        if lower.len() > suffix.len() && lower.ends_with(suffix) {
            let cut = word.len() - suffix.len();
            return alloc::vec![word[..cut].to_string(), word[cut..].to_string()];
        }
    }
    alloc::vec![word.to_string()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Punct,
    Neg,
    Det,
    Pron,
    Adp,
    Cconj,
    Adv,
    Adj,
    Num,
    /// be/have/do or a modal, in any form
    AuxLike,
    Verb,
    Propn,
    Noun,
}

fn aux_lemma(lower: &str) -> Option<&'static str> {
    match lower {
        "be" | "been" | "being" => Some("be"),
        "having" => Some("have"),
        "done" | "doing" => None,
        _ => finite_aux_lemma(lower),
    }
}

fn classify(form: &str, initial: bool) -> Class {
    let lower = form.to_lowercase();
    let w = lower.as_str();
    if form.chars().all(|c| !c.is_alphanumeric()) {
        return Class::Punct;
    }
    if w == "not" || w == "n't" {
        return Class::Neg;
    }
    if form.chars().all(|c| c.is_ascii_digit()) {
        return Class::Num;
    }
    if aux_lemma(w).is_some() {
        return Class::AuxLike;
    }
    if DETERMINERS.contains(&w) {
        return Class::Det;
    }
    if PRONOUNS.iter().any(|(p, _, _)| *p == w) {
        return Class::Pron;
    }
    if ADPOSITIONS.contains(&w) {
        return Class::Adp;
    }
    if CONJUNCTIONS.contains(&w) {
        return Class::Cconj;
    }
    if ADJECTIVES.contains(&w) {
        return Class::Adj;
    }
    if ADVERBS.contains(&w) || (w.len() > 4 && w.ends_with("ly")) {
        return Class::Adv;
    }
    if analyze_verb(w).is_some() {
        return Class::Verb;
    }
    if !initial && form.chars().next().is_some_and(char::is_uppercase) {
        return Class::Propn;
    }
    if ["ful", "ous", "ive", "able"].iter().any(|s| w.len() > 5 && w.ends_with(s)) {
        return Class::Adj;
    }
    if initial && form.chars().next().is_some_and(char::is_uppercase) && !w.ends_with('s') {
        // capitalized sentence-initial word outside the lexicon: treat as a name
        return Class::Propn;
    }
    Class::Noun
}

fn upos(c: Class) -> &'static str {
    match c {
        Class::Punct => "PUNCT",
        Class::Neg => "PART",
        Class::Det => "DET",
        Class::Pron => "PRON",
        Class::Adp => "ADP",
        Class::Cconj => "CCONJ",
        Class::Adv => "ADV",
        Class::Adj => "ADJ",
        Class::Num => "NUM",
        Class::AuxLike => "AUX",
        Class::Verb => "VERB",
        Class::Propn => "PROPN",
        Class::Noun => "NOUN",
    }
}

fn is_nominal(c: Class) -> bool {
    matches!(c, Class::Noun | Class::Propn | Class::Pron | Class::Num)
}

/// Whether `aux` licenses `shape` as the next verb in its chain.
fn licenses(aux: &str, shape: VerbShape) -> bool {
    let lemma = aux_lemma(aux).unwrap_or("");
    match lemma {
        "be" if aux == "being" => matches!(shape, VerbShape::Participle | VerbShape::PastOrParticiple),
        "be" => matches!(shape, VerbShape::Gerund | VerbShape::Participle | VerbShape::PastOrParticiple),
        "have" => matches!(shape, VerbShape::Participle | VerbShape::PastOrParticiple),
        _ => shape == VerbShape::Base || (aux == "'d" && shape == VerbShape::PastOrParticiple),
    }
}

/// Subject person and singularity for the noun phrase ending at `head`.
fn subject_agreement(forms: &[String], classes: &[Class], span: core::ops::Range<usize>, head: usize) -> (u8, bool) {
    let has_conj = span.clone().any(|i| classes[i] == Class::Cconj);
    let lower = forms[head].to_lowercase();
    if let Some((_, person, sing)) = PRONOUNS.iter().find(|(p, _, _)| *p == lower) {
        return (*person, *sing && !has_conj);
    }
    let plural_det = span.clone().any(|i| matches!(forms[i].to_lowercase().as_str(), "these" | "those" | "many" | "several" | "two" | "three"));
    let sing = !has_conj
        && !plural_det
        && (classes[head] == Class::Propn || !lower.ends_with('s') || lower.ends_with("ss"));
    (3, sing)
}

/// Tags and parses one raw sentence.
pub fn parse(raw: &str) -> Result<ParsedSentence> {
    let words = split_words(raw);
    if words.is_empty() {
        return Err(Error::Input("empty sentence".into()));
    }
    let forms: Vec<String> = words.iter().map(|(w, _)| w.clone()).collect();
    let lowers: Vec<String> = forms.iter().map(|f| f.to_lowercase()).collect();
    let n = forms.len();
    let first_word = forms.iter().position(|f| f.chars().any(char::is_alphanumeric)).unwrap_or(0);
    let mut classes: Vec<Class> = forms.iter().enumerate().map(|(i, f)| classify(f, i == first_word)).collect();

    // a verb right after a determiner, adposition or adjective is a noun
    for i in 0..n {
        if classes[i] == Class::Verb && i > 0 && matches!(classes[i - 1], Class::Det | Class::Adp | Class::Adj) {
            classes[i] = Class::Noun;
        }
    }
    // a sentence-initial verb with a nominal right after and a verb later is a noun ("Dogs bark")
    let ends_clause = |c: Class| matches!(c, Class::Punct | Class::Cconj);

    // find the start of the verb group
    let mut v0 = None;
    for i in 0..n {
        match classes[i] {
            Class::AuxLike => {
                v0 = Some(i);
                break;
            }
            Class::Verb => {
                let ok = i == first_word || is_nominal(classes[i - 1]) || classes[i - 1] == Class::Adv;
                if ok {
                    v0 = Some(i);
                    break;
                }
                classes[i] = Class::Noun;
            }
            _ => {}
        }
    }

    let mut heads = alloc::vec![0usize; n];
    let mut deprels: Vec<String> = alloc::vec![String::from("dep"); n];
    let mut feats: Vec<Features> = alloc::vec![Features::default(); n];
    let mut lemmas: Vec<String> = lowers.clone();
    let mut root;
    let mut aux_chain: Vec<usize> = Vec::new();
    let mut cop = None;

    match v0 {
        None => {
            // fragment: the last nominal heads everything
            root = (0..n).rev().find(|&i| is_nominal(classes[i])).unwrap_or(first_word);
        }
        Some(v) if classes[v] == Class::Verb => {
            root = v;
        }
        Some(v) => {
            // scan the auxiliary chain for a licensed main verb
            let question = v == first_word;
            let mut main = None;
            let mut last_aux = v;
            aux_chain.push(v);
            let mut j = v + 1;
            while j < n && !ends_clause(classes[j]) && classes[j] != Class::Adp {
                match classes[j] {
                    Class::AuxLike if licenses(&lowers[last_aux], VerbShape::Base) || lowers[j].starts_with("be") => {
                        if aux_lemma(&lowers[j]) == Some("be") || aux_lemma(&lowers[j]) == Some("have") {
                            aux_chain.push(j);
                            last_aux = j;
                        } else {
                            break;
                        }
                    }
                    Class::Verb | Class::Noun | Class::Adj => {
                        if let Some((_, shape)) = analyze_verb(&lowers[j]) {
                            if licenses(&lowers[last_aux], shape) {
                                main = Some(j);
                            }
                        } else if let Some((_, shape)) = doing_done(&lowers[j]) {
                            if licenses(&lowers[last_aux], shape) {
                                main = Some(j);
                            }
                        }
                        break;
                    }
                    Class::Neg | Class::Adv => {}
                    c if question && (is_nominal(c) || c == Class::Det) => {}
                    _ => break,
                }
                j += 1;
            }
            if let Some(m) = main {
                classes[m] = Class::Verb;
                root = m;
            } else {
                aux_chain.clear();
                let lemma = aux_lemma(&lowers[v]).unwrap_or("");
                if lemma == "be" {
                    // copula: the predicate heads the clause
                    let pred = (v + 1..n)
                        .take_while(|&k| !ends_clause(classes[k]) || classes[k] == Class::Cconj)
                        .find(|&k| matches!(classes[k], Class::Adj | Class::Noun | Class::Propn | Class::Num | Class::Pron | Class::Adp));
                    match pred {
                        Some(p) if classes[p] == Class::Adp => {
                            cop = Some(v);
                            root = p;
                            // prepositional predicate: head on the object
                            if let Some(obj) = (p + 1..n).take_while(|&k| !ends_clause(classes[k])).filter(|&k| is_nominal(classes[k])).last() {
                                root = obj;
                            }
                        }
                        Some(p) => {
                            cop = Some(v);
                            root = (p..n)
                                .take_while(|&k| !ends_clause(classes[k]) && classes[k] != Class::Adp)
                                .filter(|&k| matches!(classes[k], Class::Adj | Class::Noun | Class::Propn | Class::Num | Class::Pron))
                                .last()
                                .unwrap_or(p);
                        }
                        None => root = v,
                    }
                } else if is_modal(lemma) {
                    root = v;
                } else {
                    // lexical have / do
                    classes[v] = Class::Verb;
                    root = v;
                }
            }
        }
    }

    let root_class = classes[root];
    // subject: the nominal closest to the left of the verb group
    let group_start = aux_chain.first().copied().or(cop).unwrap_or(root);
    let subject = if root_class == Class::Verb || root_class == Class::AuxLike || cop.is_some() {
        (first_word..group_start).rev().find(|&i| is_nominal(classes[i])).or_else(|| {
            // inverted question: subject after the first auxiliary
            if group_start == first_word {
                (group_start + 1..root).find(|&i| is_nominal(classes[i]))
            } else {
                None
            }
        })
    } else {
        None
    };

    for i in 0..n {
        if i == root {
            deprels[i] = "root".into();
            heads[i] = 0;
            continue;
        }
        heads[i] = root + 1;
        deprels[i] = match classes[i] {
            Class::Punct => "punct",
            Class::Neg => "advmod",
            Class::Det => "det",
            Class::Adv => "advmod",
            Class::Adj => "amod",
            Class::Cconj => "cc",
            Class::Adp => "case",
            _ => "dep",
        }
        .into();
    }
    for &a in &aux_chain {
        heads[a] = root + 1;
        let passive = aux_lemma(&lowers[a]) == Some("be")
            && matches!(analyze_verb(&lowers[root]).map(|(_, s)| s), Some(VerbShape::Participle | VerbShape::PastOrParticiple));
        deprels[a] = if passive { "aux:pass" } else { "aux" }.into();
        lemmas[a] = aux_lemma(&lowers[a]).unwrap_or("").to_string();
    }
    if let Some(c) = cop {
        deprels[c] = "cop".into();
        lemmas[c] = "be".into();
    }
    if let Some(s) = subject {
        deprels[s] = "nsubj".into();
        // conjuncts and modifiers inside the subject span attach to its head
        let span_start = (0..s).rev().take_while(|&k| !matches!(classes[k], Class::Punct)).last().unwrap_or(s);
        for k in span_start..s {
            heads[k] = s + 1;
            if is_nominal(classes[k]) {
                deprels[k] = "conj".into();
            }
        }
        // the first conjunct carries the relation in treebank style
        if let Some(first) = (span_start..s).find(|&k| is_nominal(classes[k])) {
            if (first..s).any(|k| classes[k] == Class::Cconj) {
                for k in span_start..=s {
                    if k != first {
                        heads[k] = first + 1;
                    }
                }
                heads[first] = root + 1;
                deprels[first] = "nsubj".into();
                deprels[s] = "conj".into();
            }
        }
    }

    // morphology of the verbs
    let (person, singular) = match subject {
        Some(s) => {
            let span_start = (0..s).rev().take_while(|&k| !matches!(classes[k], Class::Punct)).last().unwrap_or(s);
            subject_agreement(&forms, &classes, span_start..s + 1, s)
        }
        None => (3, true),
    };
    let finite_feats = |past: bool| {
        let mut f = Features { verb_form: Some(super::types::VerbForm::Fin), mood: Some(super::types::Mood::Ind), ..Features::default() };
        if past {
            f.tense = Some(super::types::Tense::Past);
        } else {
            f.tense = Some(super::types::Tense::Pres);
            f.person = Some(person);
            f.number = Some(if singular { super::types::Number::Sing } else { super::types::Number::Plur });
        }
        f
    };
    for i in 0..n {
        match classes[i] {
            Class::AuxLike => {
                let w = lowers[i].as_str();
                lemmas[i] = aux_lemma(w).unwrap_or(w).to_string();
                feats[i] = match w {
                    "be" => Features { verb_form: Some(super::types::VerbForm::Inf), ..Features::default() },
                    "been" => Features { verb_form: Some(super::types::VerbForm::Part), tense: Some(super::types::Tense::Past), ..Features::default() },
                    "being" | "having" => Features { verb_form: Some(super::types::VerbForm::Ger), ..Features::default() },
                    "have" if aux_chain.first().is_some_and(|&f| f < i) => Features { verb_form: Some(super::types::VerbForm::Inf), ..Features::default() },
                    "was" | "were" | "had" | "did" | "could" | "would" | "might" | "should" => finite_feats(true),
                    _ => finite_feats(false),
                };
                if is_modal(&lemmas[i]) {
                    feats[i] = Features { verb_form: Some(super::types::VerbForm::Fin), ..Features::default() };
                }
            }
            Class::Verb => {
                let (lemma, shape) = analyze_verb(&lowers[i]).or_else(|| doing_done(&lowers[i])).unwrap_or((lowers[i].clone(), VerbShape::Base));
                lemmas[i] = lemma;
                let has_aux = i == root && !aux_chain.is_empty();
                feats[i] = if has_aux {
                    match shape {
                        VerbShape::Gerund => Features { verb_form: Some(super::types::VerbForm::Part), tense: Some(super::types::Tense::Pres), ..Features::default() },
                        VerbShape::Base => Features { verb_form: Some(super::types::VerbForm::Inf), ..Features::default() },
                        _ => Features { verb_form: Some(super::types::VerbForm::Part), tense: Some(super::types::Tense::Past), ..Features::default() },
                    }
                } else {
                    match shape {
                        VerbShape::Base if subject.is_none() && i == first_word => {
                            Features { verb_form: Some(super::types::VerbForm::Fin), mood: Some(super::types::Mood::Imp), ..Features::default() }
                        }
                        VerbShape::Base | VerbShape::ThirdSingular => finite_feats(false),
                        VerbShape::Past | VerbShape::PastOrParticiple => finite_feats(true),
                        VerbShape::Participle => Features { verb_form: Some(super::types::VerbForm::Part), tense: Some(super::types::Tense::Past), ..Features::default() },
                        VerbShape::Gerund => Features { verb_form: Some(super::types::VerbForm::Ger), ..Features::default() },
                    }
                };
                if i == root && shape == VerbShape::ThirdSingular {
                    feats[i].person = Some(3);
                    feats[i].number = Some(super::types::Number::Sing);
                }
            }
            _ => {}
        }
    }
    if let Some(s) = subject {
        if classes[s] == Class::Pron && !singular {
            feats[s].number = Some(super::types::Number::Plur);
        }
    }

    let tokens: Vec<ParsedToken> = (0..n)
        .map(|i| {
            let mut t = ParsedToken::new(&forms[i], &lemmas[i], upos(classes[i]), heads[i], &deprels[i]);
            t.feats = feats[i].clone();
            t.space_after = words[i].1;
            if classes[i] == Class::Neg {
                t.lemma = "not".into();
            }
            if matches!(classes[i], Class::Propn) {
                t.lemma = forms[i].clone();
            }
            t
        })
        .collect();
    ParsedSentence::new(raw.to_string(), tokens).map_err(|e| Error::Data(format!("tagger produced an invalid parse for {raw:?}: {e}")))
}

/// "doing"/"done" are excluded from the auxiliary table but are verbs.
fn doing_done(w: &str) -> Option<(String, VerbShape)> {
    match w {
        "doing" => Some(("do".into(), VerbShape::Gerund)),
        "done" => Some(("do".into(), VerbShape::Participle)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::negation::rules::{negate, NegateOptions};

    fn neg(raw: &str) -> Result<String> {
        let p = parse(raw)?;
        negate(&p, &NegateOptions::default()).map(|r| r.text)
    }

    #[test]
    fn splits_contractions_and_punctuation() {
        let w = split_words("He isn't here, I can't go.");
        let forms: Vec<&str> = w.iter().map(|(f, _)| f.as_str()).collect();
        assert_eq!(forms, ["He", "is", "n't", "here", ",", "I", "ca", "n't", "go", "."]);
        assert!(!w[1].1 && w[2].1 && !w[3].1 && w[4].1);
    }

    #[test]
    fn reference_examples() {
        assert_eq!(neg("Tom and Jerry became good friends").unwrap(), "Tom and Jerry did not become good friends");
        assert_eq!(neg("A man is doing pull-ups").unwrap(), "A man is not doing pull-ups");
        assert_eq!(neg("She runs").unwrap(), "She does not run");
        assert!(matches!(neg("A red car."), Err(Error::NoFiniteVerb)));
    }

    #[test]
    fn round_trips() {
        for raw in ["He isn't happy.", "They don't like fish.", "She doesn't run.", "I can't swim.", "We won't go."] {
            assert!(neg(raw).is_ok(), "{raw}");
        }
        assert_eq!(neg("She doesn't run.").unwrap(), "She runs.");
        assert_eq!(neg("We won't go.").unwrap(), "We will go.");
        assert_eq!(neg("He isn't happy.").unwrap(), "He is happy.");
    }
}
