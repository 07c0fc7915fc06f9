//! CoNLL-U reader.
//!
//! Ten tab-separated columns per token row, blank lines between sentences,
//! `#` comment lines. A `# text = ...` comment supplies the raw sentence;
//! without one the text is rebuilt from the forms and `SpaceAfter=No`.
//! Multiword ranges (`3-4`) and empty nodes (`5.1`) are skipped in favor of
//! the regular tokens.

use std::path::Path;

use sncse_core::negation::{Features, ParsedSentence, ParsedToken};

use crate::error::{read_to_string, Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConlluDocument {
    pub sentences: Vec<ParsedSentence>,
    /// 1-based line of the first row of each sentence.
    pub lines: Vec<usize>,
    /// Sentences dropped because no token is attached to the root.
    pub missing_root: usize,
}

pub fn load_conllu(path: &Path) -> Result<ConlluDocument> {
    parse_conllu(&read_to_string(path)?, path)
}

/// Parses CoNLL-U text; `path` only labels errors.
pub fn parse_conllu(text: &str, path: &Path) -> Result<ConlluDocument> {
    let mut doc = ConlluDocument::default();
    let mut block = Block::default();
    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            block.finish(&mut doc, path)?;
            continue;
        }
        if block.start == 0 {
            block.start = line_no;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(t) = comment.trim_start().strip_prefix("text") {
                if let Some(v) = t.trim_start().strip_prefix('=') {
                    block.text = Some(v.trim().to_string());
                }
            }
            continue;
        }
        block.row(line, line_no, path)?;
    }
    block.finish(&mut doc, path)?;
    Ok(doc)
}

#[derive(Default)]
struct Block {
    start: usize,
    text: Option<String>,
    tokens: Vec<ParsedToken>,
}

impl Block {
    fn row(&mut self, line: &str, line_no: usize, path: &Path) -> Result<()> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::format(path, line_no, format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            return Ok(());
        }
        let id: usize = id
            .parse()
            .map_err(|_| Error::format(path, line_no, format!("token id {:?} is not an integer", id)))?;
        if id != self.tokens.len() + 1 {
            return Err(Error::format(path, line_no, format!("token id {} out of sequence", id)));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| Error::format(path, line_no, format!("head {:?} is not an integer", cols[6])))?;
        let feats = if cols[5] == "_" { Features::default() } else { Features::parse(cols[5]) };
        let space_after = !cols[9].split('|').any(|m| m == "SpaceAfter=No");
        self.tokens.push(ParsedToken {
            form: cols[1].to_string(),
            lemma: if cols[2] == "_" { cols[1].to_lowercase() } else { cols[2].to_string() },
            upos: cols[3].to_string(),
            xpos: (cols[4] != "_").then(|| cols[4].to_string()),
            head,
            deprel: cols[7].to_string(),
            feats,
            space_after,
        });
        Ok(())
    }

    fn finish(&mut self, doc: &mut ConlluDocument, path: &Path) -> Result<()> {
        let block = std::mem::take(self);
        if block.tokens.is_empty() {
            return Ok(());
        }
        if !block.tokens.iter().any(|t| t.head == 0) {
            doc.missing_root += 1;
            return Ok(());
        }
        let text = match block.text {
            Some(t) => t,
            None => surface(&block.tokens),
        };
        let s = ParsedSentence::new(text, block.tokens).map_err(|e| Error::format(path, block.start, e.to_string()))?;
        doc.sentences.push(s);
        doc.lines.push(block.start);
        Ok(())
    }
}

fn surface(tokens: &[ParsedToken]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        out.push_str(&t.form);
        if t.space_after && i + 1 < tokens.len() {
            out.push(' ');
        }
    }
    out
}

/// Renders sentences back to CoNLL-U (used for fixtures and tests).
pub fn write_conllu(sentences: &[ParsedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str("# text = ");
        out.push_str(&s.text);
        out.push('\n');
        for (i, t) in s.tokens.iter().enumerate() {
            let feats = t.feats.render();
            let cols = [
                (i + 1).to_string(),
                t.form.clone(),
                t.lemma.clone(),
                t.upos.clone(),
                t.xpos.clone().unwrap_or_else(|| "_".into()),
                feats,
                t.head.to_string(),
                t.deprel.clone(),
                "_".into(),
                if t.space_after { "_".into() } else { "SpaceAfter=No".into() },
            ];
            out.push_str(&cols.join("\t"));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "# text = She runs.\n1\tShe\tshe\tPRON\tPRP\tCase=Nom|Number=Sing|Person=3\t2\tnsubj\t_\t_\n2\truns\trun\tVERB\tVBZ\tMood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin\t0\troot\t_\tSpaceAfter=No\n3\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_\n\n1\tDogs\tdog\tNOUN\tNNS\tNumber=Plur\t2\tnsubj\t_\t_\n2\tbark\tbark\tVERB\tVBP\t_\t0\troot\t_\t_\n";

    #[test]
    fn two_sentences() {
        let doc = parse_conllu(TWO, Path::new("t")).unwrap();
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[0].text, "She runs.");
        assert_eq!(doc.sentences[1].text, "Dogs bark");
        assert_eq!(doc.lines, vec![1, 6]);
    }

    #[test]
    fn empty_file() {
        assert!(parse_conllu("", Path::new("t")).unwrap().sentences.is_empty());
    }

    #[test]
    fn multiword_ranges_are_skipped() {
        let text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n1\tdo\tdo\tAUX\tVBP\t_\t3\taux\t_\t_\n2\tn't\tnot\tPART\tRB\t_\t3\tadvmod\t_\t_\n3\tgo\tgo\tVERB\tVB\t_\t0\troot\t_\t_\n";
        let doc = parse_conllu(text, Path::new("t")).unwrap();
        assert_eq!(doc.sentences[0].tokens.len(), 3);
    }

    #[test]
    fn nine_columns_names_the_line() {
        let text = "# text = x\n1\tx\tx\tX\t_\t_\t0\troot\t_\n";
        let err = parse_conllu(text, Path::new("f.conllu")).unwrap_err().to_string();
        assert!(err.contains("f.conllu:2"), "{}", err);
        assert!(err.contains("found 9"), "{}", err);
    }

    #[test]
    fn rootless_sentence_is_counted() {
        let text = "1\ta\ta\tDET\t_\t_\t2\tdet\t_\t_\n2\tb\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n\n1\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n";
        let doc = parse_conllu(text, Path::new("t")).unwrap();
        assert_eq!(doc.missing_root, 1);
        assert_eq!(doc.sentences.len(), 1);
    }

    #[test]
    fn round_trip() {
        let doc = parse_conllu(TWO, Path::new("t")).unwrap();
        let again = parse_conllu(&write_conllu(&doc.sentences), Path::new("t")).unwrap();
        assert_eq!(again.sentences, doc.sentences);
    }
}
