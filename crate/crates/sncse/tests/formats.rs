use std::path::{Path, PathBuf};

use sncse::checkpoint::Checkpoint;
use sncse::conllu::{load_conllu, parse_conllu};
use sncse::io::{load_corpus, load_negations, load_sts};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixture")
}

#[test]
fn fixture_parses_match_the_corpus() {
    let doc = load_conllu(&fixture().join("corpus.conllu")).unwrap();
    let corpus = load_corpus(&fixture().join("corpus.txt")).unwrap();
    assert_eq!(doc.missing_root, 0);
    let texts: Vec<&str> = doc.sentences.iter().map(|s| s.text.as_str()).collect();
    assert_eq!(texts, corpus.iter().map(String::as_str).collect::<Vec<_>>());
}

#[test]
fn conllu_errors_name_file_and_line() {
    let text = "# text = A dog runs.\n1\tA\ta\tDET\tDT\t_\t2\tdet\t_\t_\n2\tdog\tdog\tNOUN\tNN\n";
    let e = parse_conllu(text, Path::new("bad.conllu")).unwrap_err().to_string();
    assert!(e.contains("bad.conllu") && e.contains('3'), "{e}");
}

#[test]
fn sts_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("demo");
    std::fs::create_dir(&sub).unwrap();
    std::fs::write(sub.join("test.tsv"), "3.0\ta\tb\n5.5\tc\td\n").unwrap();
    let e = load_sts(dir.path()).unwrap_err().to_string();
    assert!(e.contains("test.tsv") && e.contains(":2"), "{e}");
    std::fs::write(sub.join("test.tsv"), "3.0\ta\n").unwrap();
    assert!(load_sts(dir.path()).is_err());
    std::fs::write(sub.join("test.tsv"), "3.0\ta\tb\r\n0\tc\td\r\n").unwrap();
    assert_eq!(load_sts(dir.path()).unwrap().pairs.len(), 2);
}

#[test]
fn corpus_line_endings_do_not_matter() {
    let dir = tempfile::tempdir().unwrap();
    let (lf, crlf) = (dir.path().join("lf.txt"), dir.path().join("crlf.txt"));
    std::fs::write(&lf, "one two.\n\nthree four.\n").unwrap();
    std::fs::write(&crlf, "one two.\r\n\r\nthree four.\r\n").unwrap();
    assert_eq!(load_corpus(&lf).unwrap(), load_corpus(&crlf).unwrap());
    assert_eq!(load_corpus(&lf).unwrap().len(), 2);
}

#[test]
fn negation_pairs_need_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("neg.tsv");
    std::fs::write(&f, "a\tnot a\nb\n").unwrap();
    let e = load_negations(&f).unwrap_err().to_string();
    assert!(e.contains("neg.tsv") && e.contains(":2"), "{e}");
}

#[test]
fn checkpoint_files_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.ckpt");
    std::fs::write(&f, b"SNCSECKP\x01\x00\x00\x00garbage").unwrap();
    assert!(Checkpoint::load(&f).is_err());
    assert!(Checkpoint::load(&dir.path().join("missing.ckpt")).is_err());
}
