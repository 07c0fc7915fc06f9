use sncse_core::negation::{heuristic_parse, negate, NegateOptions};
use sncse_core::Error;

const GOLDEN: &str = include_str!("data/negation_golden.tsv");

#[test]
fn golden_corpus() {
    let mut failures = Vec::new();
    let mut count = 0;
    for line in GOLDEN.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 3, "bad golden row: {line}");
        count += 1;
        let parse = heuristic_parse(cols[0]).unwrap();
        let got = negate(&parse, &NegateOptions::default());
        let ok = match (cols[1].strip_prefix("SKIP:"), &got) {
            (Some("NoFiniteVerb"), Err(Error::NoFiniteVerb)) => true,
            (None, Ok(r)) => r.text == cols[1] && r.rule.id() == cols[2],
            _ => false,
        };
        if !ok {
            failures.push(format!("{:?} -> {:?}, expected {:?} ({})", cols[0], got.map(|r| (r.text, r.rule.id())), cols[1], cols[2]));
        }
    }
    assert_eq!(count, 50);
    assert!(failures.is_empty(), "{} golden failures:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn insertion_rules_round_trip() {
    for line in GOLDEN.lines().filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 || !matches!(cols[2], "R2" | "R3" | "R4") {
            continue;
        }
        let first = negate(&heuristic_parse(cols[0]).unwrap(), &NegateOptions::default()).unwrap();
        let n_in = heuristic_parse(cols[0]).unwrap().tokens.len();
        let extra = if cols[2] == "R4" { 2 } else { 1 };
        assert_eq!(first.tokens.len(), n_in + extra, "{}", cols[0]);
        let count_not = |s: &str| s.matches(" not ").count() + s.matches("n't").count() + usize::from(s.starts_with("not ") || s.starts_with("Not "));
        assert_eq!(count_not(&first.text), count_not(cols[0]) + 1, "{}", first.text);
        let reparsed = sncse_core::negation::ParsedSentence::new(first.text.clone(), first.tokens.clone()).unwrap();
        let back = negate(&reparsed, &NegateOptions::default()).unwrap();
        assert_eq!(back.text, cols[0], "round trip of {}", first.text);
    }
}

#[test]
fn deterministic() {
    for line in GOLDEN.lines().filter(|l| !l.starts_with('#')) {
        let input = line.split('\t').next().unwrap();
        let a = heuristic_parse(input).unwrap();
        let b = heuristic_parse(input).unwrap();
        assert_eq!(a, b);
        let o = NegateOptions::default();
        assert_eq!(negate(&a, &o).ok(), negate(&b, &o).ok());
    }
}
