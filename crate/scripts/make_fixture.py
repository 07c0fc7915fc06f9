#!/usr/bin/env python3
"""Generate the bundled desk-scale fixture.

Writes into data/fixture/:
  corpus.txt        one sentence per line
  corpus.conllu     gold dependency parses of corpus.txt
  sts/toy/dev.tsv   score<TAB>sentence1<TAB>sentence2, scores from fixed rules
  sts/toy/test.tsv

negations.tsv and skips.json are produced afterwards by the CLI:
  sncse negate --conllu data/fixture/corpus.conllu \
      --out data/fixture/negations.tsv --report data/fixture/skips.json
"""

import argparse
import random
from pathlib import Path

# lemma, 3sg, past, past participle, present participle
VERBS = {
    "play": ("plays", "played", "played", "playing"),
    "eat": ("eats", "ate", "eaten", "eating"),
    "read": ("reads", "read", "read", "reading"),
    "watch": ("watches", "watched", "watched", "watching"),
    "write": ("writes", "wrote", "written", "writing"),
    "drive": ("drives", "drove", "driven", "driving"),
    "cook": ("cooks", "cooked", "cooked", "cooking"),
    "paint": ("paints", "painted", "painted", "painting"),
    "ride": ("rides", "rode", "ridden", "riding"),
    "build": ("builds", "built", "built", "building"),
    "carry": ("carries", "carried", "carried", "carrying"),
    "open": ("opens", "opened", "opened", "opening"),
    "clean": ("cleans", "cleaned", "cleaned", "cleaning"),
    "buy": ("buys", "bought", "bought", "buying"),
    "purchase": ("purchases", "purchased", "purchased", "purchasing"),
    "sell": ("sells", "sold", "sold", "selling"),
    "find": ("finds", "found", "found", "finding"),
    "wash": ("washes", "washed", "washed", "washing"),
    "throw": ("throws", "threw", "thrown", "throwing"),
    "catch": ("catches", "caught", "caught", "catching"),
    "run": ("runs", "ran", "run", "running"),
    "sleep": ("sleeps", "slept", "slept", "sleeping"),
    "swim": ("swims", "swam", "swum", "swimming"),
    "sing": ("sings", "sang", "sung", "singing"),
    "dance": ("dances", "danced", "danced", "dancing"),
    "walk": ("walks", "walked", "walked", "walking"),
    "laugh": ("laughs", "laughed", "laughed", "laughing"),
    "sit": ("sits", "sat", "sat", "sitting"),
}

# verb -> objects it takes; a synonym verb shares its objects
TRANSITIVE = {
    "play": ["guitar", "piano", "game", "flute"],
    "eat": ["apple", "sandwich", "soup", "cake"],
    "read": ["book", "letter", "newspaper", "story"],
    "watch": ["movie", "game", "show", "bird"],
    "write": ["letter", "song", "story", "poem"],
    "drive": ["car", "truck", "bus", "automobile"],
    "cook": ["meal", "soup", "dinner", "egg"],
    "paint": ["picture", "wall", "fence", "house"],
    "ride": ["bike", "horse", "bus", "bicycle"],
    "build": ["house", "wall", "fence", "boat"],
    "carry": ["box", "bag", "basket", "chair"],
    "open": ["door", "window", "box", "letter"],
    "clean": ["room", "kitchen", "car", "window"],
    "buy": ["car", "book", "cake", "bike"],
    "sell": ["car", "house", "book", "bike"],
    "find": ["key", "ball", "bag", "coin"],
    "wash": ["car", "dog", "dish", "shirt"],
    "throw": ["ball", "stone", "stick", "frisbee"],
    "catch": ["ball", "fish", "frisbee", "bus"],
}
INTRANSITIVE = ["run", "sleep", "swim", "sing", "dance", "walk", "laugh", "sit"]
VERB_SYNONYMS = {"buy": "purchase"}
TRANSITIVE["purchase"] = TRANSITIVE["buy"]

PLURALS = {"man": "men", "woman": "women", "child": "children", "person": "people", "fish": "fish", "box": "boxes", "bus": "buses", "dish": "dishes", "glass": "glasses"}
NOUN_SYNONYMS = {"man": "guy", "kid": "child", "car": "automobile", "bike": "bicycle", "picture": "painting", "woman": "lady"}
SUBJECT_NOUNS = ["man", "woman", "kid", "child", "dog", "cat", "girl", "boy", "student", "teacher", "chef", "farmer", "guy", "lady", "player", "musician"]
ANIMATE_CAN_DO_ANYTHING = {"man", "woman", "kid", "child", "girl", "boy", "student", "teacher", "chef", "farmer", "guy", "lady", "player", "musician"}
ANIMAL_VERBS = {"run", "sleep", "swim", "walk", "sit", "eat", "catch", "find"}
PRONOUNS = {"he": ("Sing", 3), "she": ("Sing", 3), "they": ("Plur", 3), "we": ("Plur", 1), "I": ("Sing", 1)}
ADJECTIVES = ["happy", "tired", "hungry", "busy", "angry", "quiet", "young", "tall", "sad", "ready", "late", "calm"]
ADJ_SYNONYMS = {"happy": "glad", "angry": "mad", "sad": "unhappy"}
ADJECTIVES += ["glad", "mad", "unhappy"]
NOUN_ADJECTIVES = ["red", "old", "small", "big", "new", "little", "young", "white", "black"]
PLACES = [("in", "park"), ("in", "kitchen"), ("on", "street"), ("at", "school"), ("near", "lake"), ("in", "garden"), ("on", "beach"), ("at", "home")]
MODALS = ["can", "will", "should", "must", "could", "would", "might"]


def plural(n):
    if n in PLURALS:
        return PLURALS[n]
    if n.endswith(("s", "x", "ch", "sh")):
        return n + "es"
    if n.endswith("y") and n[-2] not in "aeiou":
        return n[:-1] + "ies"
    return n + "s"


class Builder:
    """Collects tokens with symbolic heads and renders text and CoNLL-U."""

    def __init__(self):
        self.toks = []

    def add(self, form, lemma, upos, xpos, feats, head, deprel):
        self.toks.append(dict(form=form, lemma=lemma, upos=upos, xpos=xpos, feats=feats, head=head, deprel=deprel, space=True))
        return len(self.toks) - 1

    def np(self, noun, number, head, deprel, det="the", adj=None):
        """Adds a determiner + optional adjective + noun; returns the noun index."""
        start = len(self.toks)
        form = noun if number == "Sing" else plural(noun)
        if det is not None:
            d = "a" if det == "a" and number == "Sing" else ("the" if det == "a" else det)
            if d == "a" and (adj or form)[0] in "aeiou":
                d = "an"
            self.add(d, "a" if d in ("a", "an") else d, "DET", "DT",
                     "Definite=Ind|PronType=Art" if d in ("a", "an") else "Definite=Def|PronType=Art", None, "det")
        if adj is not None:
            self.add(adj, adj, "ADJ", "JJ", "Degree=Pos", None, "amod")
        n = self.add(form, noun, "NOUN", "NN" if number == "Sing" else "NNS", "Number=" + number, head, deprel)
        for i in range(start, n):
            self.toks[i]["head"] = n
        return n

    def finish(self, root):
        self.toks[-1]["space"] = False
        self.add(".", ".", "PUNCT", ".", "_", root, "punct")
        self.toks[-1]["space"] = False
        first = self.toks[0]
        if first["form"] != "I":
            first["form"] = first["form"][0].upper() + first["form"][1:]
        text = "".join(t["form"] + (" " if t["space"] else "") for t in self.toks).strip()
        rows = []
        for i, t in enumerate(self.toks):
            head = 0 if t["head"] == "root" else t["head"] + 1
            misc = "_" if t["space"] else "SpaceAfter=No"
            rows.append("\t".join([str(i + 1), t["form"], t["lemma"], t["upos"], t["xpos"], t["feats"] or "_", str(head), t["deprel"], "_", misc]))
        return text, rows


def subject(b, rng, pron_ok=True, verb=None):
    """Returns (head index, number, person, meaning tuple)."""
    if pron_ok and rng.random() < 0.2:
        p = rng.choice(sorted(PRONOUNS))
        number, person = PRONOUNS[p]
        feats = "Case=Nom|Number={}|Person={}|PronType=Prs".format(number, person)
        i = b.add(p, p if p == "I" else p.lower(), "PRON", "PRP", feats, None, "nsubj")
        return i, number, person, ("pron", p)
    choices = SUBJECT_NOUNS if verb is None or verb in ANIMAL_VERBS else sorted(ANIMATE_CAN_DO_ANYTHING)
    noun = rng.choice(choices)
    number = "Sing" if rng.random() < 0.7 else "Plur"
    adj = rng.choice(NOUN_ADJECTIVES) if rng.random() < 0.25 else None
    det = "a" if number == "Sing" and rng.random() < 0.5 else ("the" if rng.random() < 0.6 else None)
    if det is None and number == "Sing":
        det = "the"
    i = b.np(noun, number, None, "nsubj", det=det, adj=adj)
    return i, number, 3, ("np", noun, number)


def set_head(b, i, head):
    b.toks[i]["head"] = head


def finite_feats(number, person, tense):
    if tense == "Past":
        return "Mood=Ind|Tense=Past|VerbForm=Fin"
    if number == "Sing" and person == 3:
        return "Mood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin"
    return "Mood=Ind|Tense=Pres|VerbForm=Fin"


def finite_form(lemma, number, person, tense):
    forms = VERBS[lemma]
    if tense == "Past":
        return forms[1], "VBD"
    if number == "Sing" and person == 3:
        return forms[0], "VBZ"
    return lemma, "VBP"


def be_form(number, person, tense):
    if tense == "Past":
        return ("was" if number == "Sing" and person != 2 else "were"), "VBD"
    if number == "Sing" and person == 1:
        return "am", "VBP"
    if number == "Sing" and person == 3:
        return "is", "VBZ"
    return "are", "VBP"


def have_form(number, person, tense):
    if tense == "Past":
        return "had", "VBD"
    if number == "Sing" and person == 3:
        return "has", "VBZ"
    return "have", "VBP"


def obj_and_place(b, rng, verb, root, meaning):
    if verb in TRANSITIVE:
        obj = rng.choice(TRANSITIVE[verb])
        number = "Sing" if rng.random() < 0.75 else "Plur"
        adj = rng.choice(NOUN_ADJECTIVES) if rng.random() < 0.2 else None
        b.np(obj, number, root, "obj", det="a" if rng.random() < 0.5 else "the", adj=adj)
        meaning["obj"] = obj
    if rng.random() < 0.35 or verb not in TRANSITIVE and rng.random() < 0.7:
        prep, place = rng.choice(PLACES)
        c = b.add(prep, prep, "ADP", "IN", "_", None, "case")
        if place == "home":
            n = b.add("home", "home", "NOUN", "NN", "Number=Sing", root, "obl")
        else:
            n = b.np(place, "Sing", root, "obl", det="the")
        set_head(b, c, n)
        meaning["place"] = place


def simple(rng, tense=None, verb=None):
    b = Builder()
    verb = verb or rng.choice(sorted(VERBS))
    s, number, person, subj = subject(b, rng, verb=verb)
    tense = tense or rng.choice(["Past", "Pres"])
    form, xpos = finite_form(verb, number, person, tense)
    root = b.add(form, verb, "VERB", xpos, finite_feats(number, person, tense), "root", "root")
    set_head(b, s, root)
    meaning = dict(kind="event", subj=subj, verb=verb, tense=tense, neg=False)
    obj_and_place(b, rng, verb, root, meaning)
    return b, root, meaning


def progressive(rng):
    b = Builder()
    verb = rng.choice(sorted(VERBS))
    s, number, person, subj = subject(b, rng, verb=verb)
    tense = rng.choice(["Past", "Pres"])
    aux, xpos = be_form(number, person, tense)
    a = b.add(aux, "be", "AUX", xpos, finite_feats(number, person, tense), None, "aux")
    root = b.add(VERBS[verb][3], verb, "VERB", "VBG", "Tense=Pres|VerbForm=Part", "root", "root")
    set_head(b, s, root)
    set_head(b, a, root)
    meaning = dict(kind="event", subj=subj, verb=verb, tense=tense, neg=False)
    obj_and_place(b, rng, verb, root, meaning)
    return b, root, meaning


def perfect(rng):
    b = Builder()
    verb = rng.choice(sorted(VERBS))
    s, number, person, subj = subject(b, rng, verb=verb)
    tense = rng.choice(["Past", "Pres"])
    aux, xpos = have_form(number, person, tense)
    a = b.add(aux, "have", "AUX", xpos, finite_feats(number, person, tense), None, "aux")
    root = b.add(VERBS[verb][2], verb, "VERB", "VBN", "Tense=Past|VerbForm=Part", "root", "root")
    set_head(b, s, root)
    set_head(b, a, root)
    meaning = dict(kind="event", subj=subj, verb=verb, tense=tense, neg=False)
    obj_and_place(b, rng, verb, root, meaning)
    return b, root, meaning


def copula(rng, adj=None):
    b = Builder()
    s, number, person, subj = subject(b, rng)
    tense = rng.choice(["Past", "Pres"])
    cop, xpos = be_form(number, person, tense)
    c = b.add(cop, "be", "AUX", xpos, finite_feats(number, person, tense), None, "cop")
    adj = adj or rng.choice(ADJECTIVES)
    root = b.add(adj, adj, "ADJ", "JJ", "Degree=Pos", "root", "root")
    set_head(b, s, root)
    set_head(b, c, root)
    return b, root, dict(kind="state", subj=subj, adj=adj, tense=tense, neg=False)


def modal(rng):
    b = Builder()
    verb = rng.choice(sorted(VERBS))
    s, number, person, subj = subject(b, rng, verb=verb)
    m = rng.choice(MODALS)
    a = b.add(m, m, "AUX", "MD", "VerbForm=Fin", None, "aux")
    root = b.add(verb, verb, "VERB", "VB", "VerbForm=Inf", "root", "root")
    set_head(b, s, root)
    set_head(b, a, root)
    meaning = dict(kind="event", subj=subj, verb=verb, tense=m, neg=False)
    obj_and_place(b, rng, verb, root, meaning)
    return b, root, meaning


def passive(rng):
    b = Builder()
    verb = rng.choice(sorted(TRANSITIVE))
    obj = rng.choice(TRANSITIVE[verb])
    number = "Sing" if rng.random() < 0.75 else "Plur"
    s = b.np(obj, number, None, "nsubj:pass", det="the")
    tense = rng.choice(["Past", "Pres"])
    aux, xpos = be_form(number, 3, tense)
    a = b.add(aux, "be", "AUX", xpos, finite_feats(number, 3, tense), None, "aux:pass")
    root = b.add(VERBS[verb][2], verb, "VERB", "VBN", "Tense=Past|VerbForm=Part|Voice=Pass", "root", "root")
    set_head(b, s, root)
    set_head(b, a, root)
    by = b.add("by", "by", "ADP", "IN", "_", None, "case")
    agent = rng.choice(sorted(ANIMATE_CAN_DO_ANYTHING))
    agent_number = "Sing" if rng.random() < 0.7 else "Plur"
    n = b.np(agent, agent_number, root, "obl:agent", det="the")
    set_head(b, by, n)
    return b, root, dict(kind="event", subj=("np", agent, agent_number), verb=verb, obj=obj, tense=tense, neg=False)


def negated(rng):
    """A sentence that already carries "not" on its root."""
    b = Builder()
    if rng.random() < 0.5:
        verb = rng.choice(sorted(VERBS))
        s, number, person, subj = subject(b, rng, verb=verb)
        tense = rng.choice(["Past", "Pres"])
        if tense == "Past":
            do, xpos = "did", "VBD"
        elif number == "Sing" and person == 3:
            do, xpos = "does", "VBZ"
        else:
            do, xpos = "do", "VBP"
        a = b.add(do, "do", "AUX", xpos, finite_feats(number, person, tense), None, "aux")
        n = b.add("not", "not", "PART", "RB", "Polarity=Neg", None, "advmod")
        root = b.add(verb, verb, "VERB", "VB", "VerbForm=Inf", "root", "root")
        for i in (s, a, n):
            set_head(b, i, root)
        meaning = dict(kind="event", subj=subj, verb=verb, tense=tense, neg=True)
        obj_and_place(b, rng, verb, root, meaning)
        return b, root, meaning
    s, number, person, subj = subject(b, rng)
    tense = rng.choice(["Past", "Pres"])
    cop, xpos = be_form(number, person, tense)
    c = b.add(cop, "be", "AUX", xpos, finite_feats(number, person, tense), None, "cop")
    n = b.add("not", "not", "PART", "RB", "Polarity=Neg", None, "advmod")
    adj = rng.choice(ADJECTIVES)
    root = b.add(adj, adj, "ADJ", "JJ", "Degree=Pos", "root", "root")
    for i in (s, c, n):
        set_head(b, i, root)
    return b, root, dict(kind="state", subj=subj, adj=adj, tense=tense, neg=True)


def fragment(rng):
    b = Builder()
    noun = rng.choice(SUBJECT_NOUNS + ["car", "house", "boat", "book"])
    adj = rng.choice(NOUN_ADJECTIVES)
    root = b.np(noun, "Sing", "root", "root", det="a", adj=adj)
    if rng.random() < 0.5:
        prep, place = rng.choice(PLACES[:-1])
        c = b.add(prep, prep, "ADP", "IN", "_", None, "case")
        n = b.np(place, "Sing", root, "nmod", det="the")
        set_head(b, c, n)
    return b, root, dict(kind="fragment")


MIX = [(simple, 760), (progressive, 260), (perfect, 220), (copula, 260), (modal, 260), (passive, 170), (negated, 50), (fragment, 20)]


def corpus(rng):
    seen = set()
    out = []
    for make, count in MIX:
        made = 0
        attempts = 0
        while made < count and attempts < count * 50:
            attempts += 1
            b, root, _ = make(rng)
            text, rows = b.finish(root)
            if text in seen:
                continue
            seen.add(text)
            out.append((text, rows))
            made += 1
    rng.shuffle(out)
    return out


# --- STS-style pairs -------------------------------------------------------

def render(make, rng):
    b, root, meaning = make(rng)
    text, _ = b.finish(root)
    return text, meaning


def swap_words(text, table):
    words = text[:-1].split(" ")
    out = []
    changed = False
    for w in words:
        low = w.lower()
        if not changed and low in table:
            rep = table[low]
            out.append(rep[0].upper() + rep[1:] if w[0].isupper() else rep)
            changed = True
        else:
            out.append(w)
    return " ".join(out) + ".", changed


SYNONYMS = {}
for table in (NOUN_SYNONYMS, ADJ_SYNONYMS):
    for a, b in table.items():
        SYNONYMS[a] = b
        SYNONYMS[b] = a
for a, b in VERB_SYNONYMS.items():
    for fa, fb in zip((a,) + VERBS[a], (b,) + VERBS[b]):
        SYNONYMS[fa] = fb
        SYNONYMS[fb] = fa
for a, b in NOUN_SYNONYMS.items():
    SYNONYMS[plural(a)] = plural(b)
    SYNONYMS[plural(b)] = plural(a)


def negate_text(text):
    """Surface negation used only for pair construction."""
    words = text[:-1].split(" ")
    for i, w in enumerate(words):
        if w.lower() in ("is", "are", "was", "were", "am", "has", "have", "had") or w.lower() in MODALS:
            return " ".join(words[: i + 1] + ["not"] + words[i + 1:]) + "."
    return None


def pair(rng):
    """Returns (score, s1, s2) drawn from one of several relation kinds."""
    kind = rng.choices(["para", "neg", "tense", "same_sv", "same_v", "same_s", "unrelated"], weights=[3, 2, 2, 2, 2, 2, 3])[0]
    if kind == "para":
        for _ in range(100):
            t, _m = render(rng.choice([simple, progressive, copula, modal]), rng)
            t2, changed = swap_words(t, SYNONYMS)
            if changed:
                return round(rng.uniform(4.4, 5.0), 1), t, t2
    if kind == "neg":
        for _ in range(100):
            t, _m = render(rng.choice([progressive, copula, modal, perfect]), rng)
            t2 = negate_text(t)
            if t2:
                return round(rng.uniform(1.6, 2.6), 1), t, t2
    if kind == "tense":
        verb = rng.choice(sorted(TRANSITIVE))
        state = rng.getstate()
        t1, _ = render(lambda r: simple(r, tense="Past", verb=verb), rng)
        rng.setstate(state)
        t2, _ = render(lambda r: simple(r, tense="Pres", verb=verb), rng)
        if t1 != t2:
            return round(rng.uniform(3.8, 4.4), 1), t1, t2
    if kind == "same_sv":
        verb = rng.choice(sorted(TRANSITIVE))
        state = rng.getstate()
        t1, m1 = render(lambda r: simple(r, tense="Past", verb=verb), rng)
        rng.setstate(state)
        b, root, _ = simple(rng, tense="Past", verb=verb)
        t2, _ = b.finish(root)
        if t1 != t2:
            return round(rng.uniform(2.8, 3.4), 1), t1, t2
    if kind == "same_v":
        verb = rng.choice(sorted(VERBS))
        t1, _ = render(lambda r: simple(r, verb=verb), rng)
        t2, _ = render(lambda r: simple(r, verb=verb), rng)
        if t1 != t2:
            return round(rng.uniform(1.6, 2.4), 1), t1, t2
    if kind == "same_s":
        t1, m1 = render(copula, rng)
        t2, m2 = render(copula, rng)
        if t1 != t2:
            same = m1["subj"] == m2["subj"]
            return round(rng.uniform(1.8, 2.6) if same else rng.uniform(0.8, 1.4), 1), t1, t2
    t1, _ = render(rng.choice([simple, copula, modal, passive]), rng)
    t2, _ = render(rng.choice([simple, copula, modal, passive]), rng)
    return round(rng.uniform(0.0, 0.8), 1), t1, t2


def sts(rng, n):
    rows = []
    seen = set()
    while len(rows) < n:
        score, a, b = pair(rng)
        if a == b or (a, b) in seen:
            continue
        seen.add((a, b))
        rows.append("{:.1f}\t{}\t{}".format(score, a, b))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "fixture"))
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    out = Path(args.out)
    (out / "sts" / "toy").mkdir(parents=True, exist_ok=True)

    rng = random.Random(args.seed)
    sents = corpus(rng)
    with open(out / "corpus.txt", "w") as f:
        for text, _ in sents:
            f.write(text + "\n")
    with open(out / "corpus.conllu", "w") as f:
        for i, (text, rows) in enumerate(sents):
            f.write("# sent_id = {}\n# text = {}\n".format(i + 1, text))
            f.write("\n".join(rows) + "\n\n")
    for split, seed in (("dev", args.seed + 1), ("test", args.seed + 2)):
        rows = sts(random.Random(seed), 100)
        with open(out / "sts" / "toy" / (split + ".tsv"), "w") as f:
            f.write("\n".join(rows) + "\n")
    print("{} sentences written to {}".format(len(sents), out))


if __name__ == "__main__":
    main()
