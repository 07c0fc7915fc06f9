//! English verb morphology: irregular forms, regular inflection and
//! closed-class word lists.

use alloc::string::String;

/// `(base, past, past participle)` for common irregular verbs.
pub const IRREGULAR: &[(&str, &str, &str)] = &[
    ("arise", "arose", "arisen"),
    ("awake", "awoke", "awoken"),
    ("be", "was", "been"),
    ("bear", "bore", "borne"),
    ("beat", "beat", "beaten"),
    ("become", "became", "become"),
    ("begin", "began", "begun"),
    ("bend", "bent", "bent"),
    ("bet", "bet", "bet"),
    ("bind", "bound", "bound"),
    ("bite", "bit", "bitten"),
    ("bleed", "bled", "bled"),
    ("blow", "blew", "blown"),
    ("break", "broke", "broken"),
    ("breed", "bred", "bred"),
    ("bring", "brought", "brought"),
    ("build", "built", "built"),
    ("burn", "burnt", "burnt"),
    ("buy", "bought", "bought"),
    ("catch", "caught", "caught"),
    ("choose", "chose", "chosen"),
    ("cling", "clung", "clung"),
    ("come", "came", "come"),
    ("cost", "cost", "cost"),
    ("creep", "crept", "crept"),
    ("cut", "cut", "cut"),
    ("deal", "dealt", "dealt"),
    ("dig", "dug", "dug"),
    ("do", "did", "done"),
    ("draw", "drew", "drawn"),
    ("dream", "dreamt", "dreamt"),
    ("drink", "drank", "drunk"),
    ("drive", "drove", "driven"),
    ("eat", "ate", "eaten"),
    ("fall", "fell", "fallen"),
    ("feed", "fed", "fed"),
    ("feel", "felt", "felt"),
    ("fight", "fought", "fought"),
    ("find", "found", "found"),
    ("flee", "fled", "fled"),
    ("fly", "flew", "flown"),
    ("forbid", "forbade", "forbidden"),
    ("forget", "forgot", "forgotten"),
    ("forgive", "forgave", "forgiven"),
    ("freeze", "froze", "frozen"),
    ("get", "got", "gotten"),
    ("give", "gave", "given"),
    ("go", "went", "gone"),
    ("grind", "ground", "ground"),
    ("grow", "grew", "grown"),
    ("hang", "hung", "hung"),
    ("have", "had", "had"),
    ("hear", "heard", "heard"),
    ("hide", "hid", "hidden"),
    ("hit", "hit", "hit"),
    ("hold", "held", "held"),
    ("hurt", "hurt", "hurt"),
    ("keep", "kept", "kept"),
    ("kneel", "knelt", "knelt"),
    ("know", "knew", "known"),
    ("lay", "laid", "laid"),
    ("lead", "led", "led"),
    ("leave", "left", "left"),
    ("lend", "lent", "lent"),
    ("let", "let", "let"),
    ("lie", "lay", "lain"),
    ("light", "lit", "lit"),
    ("lose", "lost", "lost"),
    ("make", "made", "made"),
    ("mean", "meant", "meant"),
    ("meet", "met", "met"),
    ("pay", "paid", "paid"),
    ("put", "put", "put"),
    ("quit", "quit", "quit"),
    ("read", "read", "read"),
    ("ride", "rode", "ridden"),
    ("ring", "rang", "rung"),
    ("rise", "rose", "risen"),
    ("run", "ran", "run"),
    ("say", "said", "said"),
    ("see", "saw", "seen"),
    ("seek", "sought", "sought"),
    ("sell", "sold", "sold"),
    ("send", "sent", "sent"),
    ("set", "set", "set"),
    ("shake", "shook", "shaken"),
    ("shine", "shone", "shone"),
    ("shoot", "shot", "shot"),
    ("show", "showed", "shown"),
    ("shut", "shut", "shut"),
    ("sing", "sang", "sung"),
    ("sink", "sank", "sunk"),
    ("sit", "sat", "sat"),
    ("sleep", "slept", "slept"),
    ("slide", "slid", "slid"),
    ("speak", "spoke", "spoken"),
    ("spend", "spent", "spent"),
    ("spin", "spun", "spun"),
    ("split", "split", "split"),
    ("spread", "spread", "spread"),
    ("spring", "sprang", "sprung"),
    ("stand", "stood", "stood"),
    ("steal", "stole", "stolen"),
    ("stick", "stuck", "stuck"),
    ("sting", "stung", "stung"),
    ("strike", "struck", "struck"),
    ("swear", "swore", "sworn"),
    ("sweep", "swept", "swept"),
    ("swim", "swam", "swum"),
    ("swing", "swung", "swung"),
    ("take", "took", "taken"),
    ("teach", "taught", "taught"),
    ("tear", "tore", "torn"),
    ("tell", "told", "told"),
    ("think", "thought", "thought"),
    ("throw", "threw", "thrown"),
    ("understand", "understood", "understood"),
    ("wake", "woke", "woken"),
    ("wear", "wore", "worn"),
    ("weep", "wept", "wept"),
    ("win", "won", "won"),
    ("wind", "wound", "wound"),
    ("write", "wrote", "written"),
];

/// Regular verbs the heuristic tagger recognizes in any inflection.
pub const REGULAR_VERBS: &[&str] = &[
    "accept", "add", "admire", "agree", "allow", "answer", "appear", "arrive", "ask", "attack", "bake",
    "believe", "belong", "boil", "borrow", "call", "carry", "change", "chase", "check", "cheer", "chop",
    "clean", "climb", "close", "collect", "cook", "count", "cover", "crawl", "cross", "cry", "dance",
    "decide", "deliver", "depend", "describe", "destroy", "develop", "die", "discover", "dress", "drop",
    "earn", "enjoy", "enter", "exercise", "explain", "fail", "fill", "finish", "fix", "float", "follow",
    "gather", "greet", "guess", "hand", "happen", "hate", "help", "hope", "hug", "hunt", "hurry",
    "improve", "invite", "join", "jump", "kick", "kill", "kiss", "knock", "land", "laugh", "learn",
    "lift", "like", "listen", "live", "look", "love", "manage", "marry", "matter", "measure", "melt",
    "miss", "move", "need", "open", "order", "own", "paint", "park", "pass", "peel", "pick", "place",
    "plan", "plant", "play", "point", "pour", "prefer", "prepare", "press", "promise", "protect", "pull",
    "push", "rain", "reach", "remember", "repair", "reply", "rest", "return", "roll", "rush", "save",
    "serve", "shout", "sign", "slice", "smile", "smoke", "snow", "solve", "start", "stay", "stir",
    "stop", "study", "succeed", "suggest", "surf", "talk", "taste", "thank", "touch", "train", "travel",
    "try", "turn", "type", "use", "visit", "vote", "wait", "walk", "want", "wash", "watch", "water",
    "wave", "welcome", "wish", "work", "worry", "yell",
];

pub const MODALS: &[&str] = &["can", "could", "may", "might", "must", "shall", "should", "will", "would"];

/// Finite forms of the primary auxiliaries and modals, with their lemma.
pub const FINITE_AUX: &[(&str, &str)] = &[
    ("am", "be"),
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("'m", "be"),
    ("'s", "be"),
    ("'re", "be"),
    ("has", "have"),
    ("have", "have"),
    ("had", "have"),
    ("'ve", "have"),
    ("'d", "would"),
    ("does", "do"),
    ("do", "do"),
    ("did", "do"),
    ("can", "can"),
    ("ca", "can"),
    ("could", "could"),
    ("may", "may"),
    ("might", "might"),
    ("must", "must"),
    ("shall", "shall"),
    ("sha", "shall"),
    ("should", "should"),
    ("will", "will"),
    ("wo", "will"),
    ("'ll", "will"),
    ("would", "would"),
];

pub fn is_modal(lemma: &str) -> bool {
    MODALS.contains(&lemma)
}

pub fn finite_aux_lemma(form: &str) -> Option<&'static str> {
    let lower = form.to_lowercase();
    FINITE_AUX.iter().find(|(f, _)| *f == lower).map(|(_, l)| *l)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Whether a regular verb doubles its final consonant before -ed/-ing
/// (one syllable ending consonant-vowel-consonant).
fn doubles_final(base: &str) -> bool {
    let c: alloc::vec::Vec<char> = base.chars().collect();
    let n = c.len();
    if n < 3 {
        return false;
    }
    let vowels = c.iter().filter(|&&ch| is_vowel(ch)).count();
    vowels == 1
        && !is_vowel(c[n - 1])
        && !matches!(c[n - 1], 'w' | 'x' | 'y')
        && is_vowel(c[n - 2])
        && !is_vowel(c[n - 3])
}

pub fn past_tense(base: &str) -> String {
    if let Some((_, past, _)) = IRREGULAR.iter().find(|(b, _, _)| *b == base) {
        return (*past).into();
    }
    let mut s = String::from(base);
    if base.ends_with('e') {
        s.push('d');
    } else if base.ends_with('y') && base.len() > 1 && !base[..base.len() - 1].ends_with(is_vowel) {
        s.pop();
        s.push_str("ied");
    } else if doubles_final(base) {
        s.push(base.chars().last().expect("non-empty"));
        s.push_str("ed");
    } else {
        s.push_str("ed");
    }
    s
}

pub fn third_singular(base: &str) -> String {
    match base {
        "be" => return "is".into(),
        "have" => return "has".into(),
        "do" => return "does".into(),
        "go" => return "goes".into(),
        _ => {}
    }
    let mut s = String::from(base);
    if ["s", "x", "z", "ch", "sh", "o"].iter().any(|e| base.ends_with(e)) {
        s.push_str("es");
    } else if base.ends_with('y') && base.len() > 1 && !base[..base.len() - 1].ends_with(is_vowel) {
        s.pop();
        s.push_str("ies");
    } else {
        s.push('s');
    }
    s
}

pub fn present_participle(base: &str) -> String {
    let mut s = String::from(base);
    if base.ends_with("ie") {
        s.truncate(s.len() - 2);
        s.push_str("ying");
    } else if base.ends_with('e') && !base.ends_with("ee") && base != "be" {
        s.pop();
        s.push_str("ing");
    } else if doubles_final(base) {
        s.push(base.chars().last().expect("non-empty"));
        s.push_str("ing");
    } else {
        s.push_str("ing");
    }
    s
}

pub fn past_participle(base: &str) -> String {
    if let Some((_, _, pp)) = IRREGULAR.iter().find(|(b, _, _)| *b == base) {
        return (*pp).into();
    }
    past_tense(base)
}

fn known_base(base: &str) -> bool {
    REGULAR_VERBS.contains(&base) || IRREGULAR.iter().any(|(b, _, _)| *b == base)
}

/// What a known verb form is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerbShape {
    Base,
    ThirdSingular,
    Past,
    /// Past tense and participle share the form ("made", "walked").
    PastOrParticiple,
    Participle,
    Gerund,
}

/// Finds the lemma and shape of a verb form from the built-in lexicon.
pub fn analyze_verb(form: &str) -> Option<(String, VerbShape)> {
    let lower = form.to_lowercase();
    let w = lower.as_str();
    if matches!(w, "is" | "am" | "are" | "was" | "were" | "be" | "been" | "being") {
        return None;
    }
    let mut candidates: alloc::vec::Vec<(String, VerbShape)> = alloc::vec::Vec::new();
    for (base, past, pp) in IRREGULAR {
        if *base == w {
            candidates.push(((*base).into(), VerbShape::Base));
        }
        if *past == w && *pp == w {
            candidates.push(((*base).into(), VerbShape::PastOrParticiple));
        } else if *past == w {
            candidates.push(((*base).into(), VerbShape::Past));
        } else if *pp == w {
            candidates.push(((*base).into(), VerbShape::Participle));
        }
    }
    if let Some(first) = candidates.into_iter().next() {
        return Some(first);
    }
    let all = REGULAR_VERBS.iter().chain(IRREGULAR.iter().map(|(b, _, _)| b));
    for base in all {
        if *base == w {
            return Some(((*base).into(), VerbShape::Base));
        }
        if third_singular(base) == w {
            return Some(((*base).into(), VerbShape::ThirdSingular));
        }
        if present_participle(base) == w {
            return Some(((*base).into(), VerbShape::Gerund));
        }
        if !IRREGULAR.iter().any(|(b, _, _)| b == base) && past_tense(base) == w {
            return Some(((*base).into(), VerbShape::PastOrParticiple));
        }
    }
    // unknown words with verbal suffixes
    if w.len() > 4 && w.ends_with("ed") && !known_base(w) {
        let stem = &w[..w.len() - 2];
        return Some((stem.into(), VerbShape::PastOrParticiple));
    }
    None
}
