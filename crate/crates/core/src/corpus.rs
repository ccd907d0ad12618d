//! Column-format annotated corpora.
//!
//! One token per line with whitespace-separated columns `surface POS chunk [NE]`,
//! sentences separated by blank lines. Input accepts runs of tabs or spaces and
//! LF or CRLF line endings; output always uses a single tab and LF.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// The outside label of the BIO scheme.
pub const OUTSIDE: &str = "O";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub pos: String,
    pub chunk: String,
    pub ne: Option<String>,
}

impl Token {
    pub fn new(
        surface: impl Into<String>,
        pos: impl Into<String>,
        chunk: impl Into<String>,
        ne: Option<String>,
    ) -> Result<Self> {
        let token = Token {
            surface: surface.into(),
            pos: pos.into(),
            chunk: chunk.into(),
            ne,
        };
        if token.surface.is_empty() || token.surface.chars().any(char::is_whitespace) {
            return Err(Error::InvalidInput(format!(
                "token surface {:?} is empty or contains whitespace",
                token.surface
            )));
        }
        for field in [&token.pos, &token.chunk] {
            if field.is_empty() || field.chars().any(char::is_whitespace) {
                return Err(Error::InvalidInput(format!(
                    "tag {field:?} is empty or contains whitespace"
                )));
            }
        }
        if let Some(ne) = &token.ne {
            if !is_bio_label(ne) {
                return Err(Error::InvalidInput(format!(
                    "label {ne:?} is neither O nor B-<TYPE>/I-<TYPE>"
                )));
            }
        }
        Ok(token)
    }
}

/// Returns true for `O`, `B-X` and `I-X` with a nonempty, whitespace-free `X`.
pub fn is_bio_label(label: &str) -> bool {
    label == OUTSIDE || split_label(label).is_some()
}

/// Splits `B-PER` into `('B', "PER")`. Returns `None` for `O` and malformed labels.
pub fn split_label(label: &str) -> Option<(char, &str)> {
    let (prefix, etype) = label.split_once('-')?;
    let marker = match prefix {
        "B" => 'B',
        "I" => 'I',
        _ => return None,
    };
    if etype.is_empty() || etype.chars().any(char::is_whitespace) {
        return None;
    }
    Some((marker, etype))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    /// Builds a sentence. Fails on an empty token list or when only some tokens carry a label.
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidInput("sentence has no tokens".into()));
        }
        let labeled = tokens[0].ne.is_some();
        if tokens.iter().any(|t| t.ne.is_some() != labeled) {
            return Err(Error::InvalidInput(
                "sentence mixes labeled and unlabeled tokens".into(),
            ));
        }
        Ok(Sentence { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.tokens[0].ne.is_some()
    }

    /// NE labels, `None` for an unlabeled sentence.
    pub fn labels(&self) -> Option<Vec<&str>> {
        self.tokens.iter().map(|t| t.ne.as_deref()).collect()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    labels: BTreeSet<String>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        let labels = sentences
            .iter()
            .flat_map(|s| s.tokens.iter())
            .filter_map(|t| t.ne.clone())
            .collect();
        Corpus { sentences, labels }
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    /// The distinct NE labels observed, in sorted order.
    pub fn labels(&self) -> &BTreeSet<String> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// True when every sentence carries labels. An empty corpus counts as unlabeled.
    pub fn is_labeled(&self) -> bool {
        !self.sentences.is_empty() && self.sentences.iter().all(Sentence::is_labeled)
    }

    /// Drops the NE column from every token.
    pub fn strip_labels(&self) -> Corpus {
        let sentences = self
            .sentences
            .iter()
            .map(|s| Sentence {
                tokens: s
                    .tokens
                    .iter()
                    .map(|t| Token {
                        ne: None,
                        ..t.clone()
                    })
                    .collect(),
            })
            .collect();
        Corpus::new(sentences)
    }

    /// Replaces the NE column with `labels`, one label sequence per sentence.
    pub fn with_labels<S: AsRef<str>>(&self, labels: &[Vec<S>]) -> Result<Corpus> {
        if labels.len() != self.sentences.len() {
            return Err(Error::InvalidInput(format!(
                "{} label sequences for {} sentences",
                labels.len(),
                self.sentences.len()
            )));
        }
        let mut sentences = Vec::with_capacity(labels.len());
        for (i, (sentence, seq)) in self.sentences.iter().zip(labels).enumerate() {
            if seq.len() != sentence.len() {
                return Err(Error::ShapeMismatch {
                    sentence: i,
                    message: format!("{} labels for {} tokens", seq.len(), sentence.len()),
                });
            }
            let tokens = sentence
                .tokens
                .iter()
                .zip(seq)
                .map(|(t, l)| {
                    Token::new(
                        t.surface.clone(),
                        t.pos.clone(),
                        t.chunk.clone(),
                        Some(l.as_ref().to_string()),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            sentences.push(Sentence { tokens });
        }
        Ok(Corpus::new(sentences))
    }

    /// Applies `f` to every surface form, e.g. for Unicode normalization.
    pub fn map_surfaces(&self, mut f: impl FnMut(&str) -> String) -> Result<Corpus> {
        let mut sentences = Vec::with_capacity(self.sentences.len());
        for s in &self.sentences {
            let tokens = s
                .tokens
                .iter()
                .map(|t| Token::new(f(&t.surface), t.pos.clone(), t.chunk.clone(), t.ne.clone()))
                .collect::<Result<Vec<_>>>()?;
            sentences.push(Sentence { tokens });
        }
        Ok(Corpus::new(sentences))
    }

    pub fn stats(&self) -> CorpusStats {
        corpus_stats(self)
    }
}

/// Reads a column file. `labeled` selects the 4-column (labeled) or 3-column layout.
pub fn parse_column_file(path: impl AsRef<Path>, labeled: bool) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        Error::io(path, io::Error::new(io::ErrorKind::InvalidData, e.utf8_error()))
    })?;
    parse_column_str(&text, labeled)
}

pub fn parse_column_str(text: &str, labeled: bool) -> Result<Corpus> {
    let expected = if labeled { 4 } else { 3 };
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut start_line = 0;

    let flush = |current: &mut Vec<Token>, start_line: usize, out: &mut Vec<Sentence>| -> Result<()> {
        if current.is_empty() {
            return Ok(());
        }
        let sentence = Sentence::new(std::mem::take(current)).map_err(|e| Error::Parse {
            line: start_line,
            message: e.to_string(),
        })?;
        out.push(sentence);
        Ok(())
    };

    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let columns: Vec<&str> = line
            .split([' ', '\t'])
            .filter(|c| !c.is_empty())
            .collect();
        if columns.is_empty() {
            flush(&mut current, start_line, &mut sentences)?;
            continue;
        }
        if columns.len() != expected {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {expected} columns, found {}", columns.len()),
            });
        }
        if current.is_empty() {
            start_line = line_no;
        }
        let ne = labeled.then(|| columns[3].to_string());
        let token = Token::new(columns[0], columns[1], columns[2], ne).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        current.push(token);
    }
    flush(&mut current, start_line, &mut sentences)?;
    Ok(Corpus::new(sentences))
}

pub fn write_column_file(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_columns(corpus, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_columns<W: Write>(corpus: &Corpus, out: &mut W) -> io::Result<()> {
    for sentence in &corpus.sentences {
        for t in &sentence.tokens {
            write!(out, "{}\t{}\t{}", t.surface, t.pos, t.chunk)?;
            if let Some(ne) = &t.ne {
                write!(out, "\t{ne}")?;
            }
            out.write_all(b"\n")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_column_string(corpus: &Corpus) -> String {
    let mut buf = Vec::new();
    write_columns(corpus, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("corpus text is UTF-8")
}

/// An `I-X` label whose predecessor is neither `B-X` nor `I-X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioViolation {
    pub sentence: usize,
    pub position: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BioCheck {
    /// The input corpus, or its repaired copy when repair was requested.
    pub corpus: Corpus,
    /// Violations found in the input (and rewritten, when repairing).
    pub violations: Vec<BioViolation>,
}

/// Checks the BIO chain of every labeled sentence. With `repair`, each stray `I-X`
/// is rewritten to `B-X`.
pub fn validate_bio(corpus: &Corpus, repair: bool) -> Result<BioCheck> {
    if !corpus.is_empty() && !corpus.is_labeled() {
        return Err(Error::InvalidInput(
            "BIO validation needs a labeled corpus".into(),
        ));
    }
    let mut violations = Vec::new();
    let mut sentences = Vec::with_capacity(corpus.len());
    for (si, sentence) in corpus.sentences.iter().enumerate() {
        let mut tokens = sentence.tokens.clone();
        let mut prev: Option<String> = None;
        for (ti, token) in tokens.iter_mut().enumerate() {
            let label = token.ne.clone().expect("labeled corpus");
            let mut fixed = label.clone();
            if let Some(('I', etype)) = split_label(&label) {
                let chained = prev
                    .as_deref()
                    .and_then(split_label)
                    .is_some_and(|(_, p)| p == etype);
                if !chained {
                    violations.push(BioViolation {
                        sentence: si,
                        position: ti,
                        label: label.clone(),
                    });
                    if repair {
                        fixed = format!("B-{etype}");
                        token.ne = Some(fixed.clone());
                    }
                }
            }
            prev = Some(fixed);
        }
        sentences.push(Sentence { tokens });
    }
    let corpus = if repair {
        Corpus::new(sentences)
    } else {
        corpus.clone()
    };
    Ok(BioCheck { corpus, violations })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub sentences: usize,
    pub tokens: usize,
    pub histogram: BTreeMap<String, usize>,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut histogram = BTreeMap::new();
    for token in corpus.sentences.iter().flat_map(|s| s.tokens.iter()) {
        if let Some(ne) = &token.ne {
            *histogram.entry(ne.clone()).or_insert(0) += 1;
        }
    }
    CorpusStats {
        sentences: corpus.len(),
        tokens: corpus.num_tokens(),
        histogram,
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentences: {}", self.sentences)?;
        writeln!(f, "tokens: {}", self.tokens)?;
        for (label, count) in &self.histogram {
            writeln!(f, "label {label}: {count}")?;
        }
        Ok(())
    }
}
