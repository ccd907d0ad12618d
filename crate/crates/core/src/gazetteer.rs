//! Name lists and span matching.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::corpus::Sentence;
use crate::error::{Error, Result};

/// Per-token gazetteer flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GazFlag {
    B,
    I,
    O,
}

impl fmt::Display for GazFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GazFlag::B => "B",
            GazFlag::I => "I",
            GazFlag::O => "O",
        })
    }
}

/// How gazetteer membership is turned into token flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GazetteerMode {
    /// Longest leftmost multi-token span match.
    #[default]
    Span,
    /// A token is flagged `B` when it is itself a single-token entry.
    Token,
}

impl FromStr for GazetteerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "span" => Ok(GazetteerMode::Span),
            "token" => Ok(GazetteerMode::Token),
            other => Err(Error::Config(format!(
                "gazetteer mode must be span or token, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for GazetteerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GazetteerMode::Span => "span",
            GazetteerMode::Token => "token",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct TrieNode {
    children: HashMap<String, usize>,
    terminal: bool,
}

/// A named list of multi-token entries, indexed by a token-keyed prefix tree.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    name: String,
    fold_case: bool,
    entries: BTreeSet<Vec<String>>,
    nodes: Vec<TrieNode>,
}

impl PartialEq for Gazetteer {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.fold_case == other.fold_case && self.entries == other.entries
    }
}

impl Gazetteer {
    /// Builds a gazetteer from raw lines. Blank lines are skipped, names are split on
    /// whitespace and duplicates (after optional lowercasing) merge.
    pub fn from_lines<I, S>(name: impl Into<String>, lines: I, fold_case: bool) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == ':') {
            return Err(Error::Config(format!(
                "gazetteer name {name:?} must be nonempty without whitespace or ':'"
            )));
        }
        let mut gaz = Gazetteer {
            name,
            fold_case,
            entries: BTreeSet::new(),
            nodes: vec![TrieNode::default()],
        };
        for line in lines {
            let entry: Vec<String> = line
                .as_ref()
                .split_whitespace()
                .map(|t| fold(t, fold_case))
                .collect();
            if !entry.is_empty() {
                gaz.insert(entry);
            }
        }
        Ok(gaz)
    }

    fn insert(&mut self, entry: Vec<String>) {
        if self.entries.contains(&entry) {
            return;
        }
        let mut node = 0;
        for token in &entry {
            node = match self.nodes[node].children.get(token) {
                Some(&next) => next,
                None => {
                    let next = self.nodes.len();
                    self.nodes.push(TrieNode::default());
                    self.nodes[node].children.insert(token.clone(), next);
                    next
                }
            };
        }
        self.nodes[node].terminal = true;
        self.entries.insert(entry);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fold_case(&self) -> bool {
        self.fold_case
    }

    pub fn entries(&self) -> &BTreeSet<Vec<String>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Length of the longest entry that starts at `tokens[0]`, if any.
    fn longest_prefix_match(&self, tokens: &[String]) -> Option<usize> {
        let mut node = 0;
        let mut best = None;
        for (i, token) in tokens.iter().enumerate() {
            match self.nodes[node].children.get(token) {
                Some(&next) => node = next,
                None => break,
            }
            if self.nodes[node].terminal {
                best = Some(i + 1);
            }
        }
        best
    }

    fn contains_single(&self, token: &str) -> bool {
        self.nodes[0]
            .children
            .get(token)
            .is_some_and(|&n| self.nodes[n].terminal)
    }
}

fn fold(token: &str, fold_case: bool) -> String {
    if fold_case {
        token.to_lowercase()
    } else {
        token.to_string()
    }
}

/// Loads a one-name-per-line UTF-8 list.
pub fn load_gazetteer(path: impl AsRef<Path>, name: &str, fold_case: bool) -> Result<Gazetteer> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Gazetteer::from_lines(name, text.lines(), fold_case)
}

/// Greedy left-to-right longest match; matched spans are flagged `B I I ...`.
pub fn match_spans(gaz: &Gazetteer, sentence: &Sentence, fold_case: bool) -> Vec<GazFlag> {
    let tokens: Vec<String> = sentence.surfaces().map(|s| fold(s, fold_case)).collect();
    let mut flags = vec![GazFlag::O; tokens.len()];
    let mut i = 0;
    while i < tokens.len() {
        match gaz.longest_prefix_match(&tokens[i..]) {
            Some(len) => {
                flags[i] = GazFlag::B;
                for flag in &mut flags[i + 1..i + len] {
                    *flag = GazFlag::I;
                }
                i += len;
            }
            None => i += 1,
        }
    }
    flags
}

/// Flags each token that is on its own a single-token entry.
pub fn match_tokens(gaz: &Gazetteer, sentence: &Sentence, fold_case: bool) -> Vec<GazFlag> {
    sentence
        .surfaces()
        .map(|s| {
            if gaz.contains_single(&fold(s, fold_case)) {
                GazFlag::B
            } else {
                GazFlag::O
            }
        })
        .collect()
}

/// Dispatches on `mode`, using the gazetteer's own case-folding setting.
pub fn flags_for(gaz: &Gazetteer, sentence: &Sentence, mode: GazetteerMode) -> Vec<GazFlag> {
    match mode {
        GazetteerMode::Span => match_spans(gaz, sentence, gaz.fold_case),
        GazetteerMode::Token => match_tokens(gaz, sentence, gaz.fold_case),
    }
}
