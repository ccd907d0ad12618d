//! Per-token sparse feature extraction.
//!
//! Feature ids are plain strings namespaced by family:
//!
//! | family     | ids                                   |
//! |------------|---------------------------------------|
//! | context    | `w[-1]=x`, `w[0]=x`, `w[+1]=x`        |
//! | affix      | `pre3=..`, `suf5=..`                  |
//! | pos        | `pos[-1]=..` .. `pos[+1]=..`          |
//! | chunk      | `chunk[-1]=..` .. `chunk[+1]=..`      |
//! | boundary   | `first`, `penult`, `last`             |
//! | digit      | `digit`                               |
//! | position   | `posn` (real valued, in `[0, 1]`)     |
//! | verb       | `verb=<surface>`, `verb:none`         |
//! | gazetteer  | `gaz:<name>:B`, `gaz:<name>:I`        |
//! | capital    | `cap`                                 |
//!
//! Out-of-range context positions use the sentinels `BOS` and `EOS`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use unicode_properties::{GeneralCategory, UnicodeGeneralCategory};

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::gazetteer::{self, GazFlag, Gazetteer, GazetteerMode};

pub const BOS: &str = "BOS";
pub const EOS: &str = "EOS";
pub const POSITION_FEATURE: &str = "posn";
pub const PROPER_NOUN_TAG: &str = "NNP";
pub const MAX_CONTEXT_WINDOW: usize = 4;

pub const DEFAULT_VERB_TAGS: [&str; 8] = ["VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "VM", "VAUX"];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub context_window: usize,
    pub affix_min: usize,
    pub affix_max: usize,
    pub affix_nnp_only: bool,
    pub use_pos: bool,
    pub use_chunk: bool,
    /// Sentence-initial and penultimate-token indicators.
    pub use_boundary: bool,
    /// Sentence-final indicator, the alternative reading of the boundary feature.
    pub use_last: bool,
    pub use_digit: bool,
    pub use_position: bool,
    pub use_verb: bool,
    pub verb_tags: BTreeSet<String>,
    pub use_capital: bool,
    pub gazetteers: Vec<String>,
    pub gazetteer_mode: GazetteerMode,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            context_window: 1,
            affix_min: 3,
            affix_max: 5,
            affix_nnp_only: false,
            use_pos: true,
            use_chunk: true,
            use_boundary: true,
            use_last: false,
            use_digit: true,
            use_position: true,
            use_verb: true,
            verb_tags: DEFAULT_VERB_TAGS.iter().map(|s| s.to_string()).collect(),
            use_capital: false,
            gazetteers: Vec::new(),
            gazetteer_mode: GazetteerMode::Span,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {value:?}")))
}

fn parse_list(value: &str) -> impl Iterator<Item = String> + '_ {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

impl FeatureConfig {
    /// A configuration with every toggle off and no context words beyond the current one.
    pub fn minimal() -> Self {
        FeatureConfig {
            context_window: 0,
            affix_nnp_only: false,
            use_pos: false,
            use_chunk: false,
            use_boundary: false,
            use_last: false,
            use_digit: false,
            use_position: false,
            use_verb: false,
            use_capital: false,
            gazetteers: Vec::new(),
            ..FeatureConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.affix_min == 0 || self.affix_min > self.affix_max {
            return Err(Error::Config(format!(
                "affix lengths must satisfy 0 < affix_min <= affix_max, got {}..{}",
                self.affix_min, self.affix_max
            )));
        }
        if self.context_window > MAX_CONTEXT_WINDOW {
            return Err(Error::Config(format!(
                "context_window {} exceeds {MAX_CONTEXT_WINDOW}",
                self.context_window
            )));
        }
        Ok(())
    }

    /// Sets one field from its `key=value` text form. Returns `Ok(false)` for a key
    /// this type does not own.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        match key {
            "context_window" => self.context_window = parse_usize(key, value)?,
            "affix_min" => self.affix_min = parse_usize(key, value)?,
            "affix_max" => self.affix_max = parse_usize(key, value)?,
            "affix_nnp_only" => self.affix_nnp_only = parse_bool(key, value)?,
            "use_pos" => self.use_pos = parse_bool(key, value)?,
            "use_chunk" => self.use_chunk = parse_bool(key, value)?,
            "use_boundary" => self.use_boundary = parse_bool(key, value)?,
            "use_last" => self.use_last = parse_bool(key, value)?,
            "use_digit" => self.use_digit = parse_bool(key, value)?,
            "use_position" => self.use_position = parse_bool(key, value)?,
            "use_verb" => self.use_verb = parse_bool(key, value)?,
            "verb_tags" => self.verb_tags = parse_list(value).collect(),
            "use_capital" => self.use_capital = parse_bool(key, value)?,
            "gazetteers" => self.gazetteers = parse_list(value).collect(),
            "gazetteer_mode" => self.gazetteer_mode = value.parse()?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Canonical `key=value` form, one pair per line, readable by [`FeatureConfig::set`].
    pub fn to_kv_string(&self) -> String {
        let join = |items: &mut dyn Iterator<Item = &String>| {
            items.map(String::as_str).collect::<Vec<_>>().join(",")
        };
        let mut out = String::new();
        let pairs: [(&str, String); 15] = [
            ("context_window", self.context_window.to_string()),
            ("affix_min", self.affix_min.to_string()),
            ("affix_max", self.affix_max.to_string()),
            ("affix_nnp_only", self.affix_nnp_only.to_string()),
            ("use_pos", self.use_pos.to_string()),
            ("use_chunk", self.use_chunk.to_string()),
            ("use_boundary", self.use_boundary.to_string()),
            ("use_last", self.use_last.to_string()),
            ("use_digit", self.use_digit.to_string()),
            ("use_position", self.use_position.to_string()),
            ("use_verb", self.use_verb.to_string()),
            ("verb_tags", join(&mut self.verb_tags.iter())),
            ("use_capital", self.use_capital.to_string()),
            ("gazetteers", join(&mut self.gazetteers.iter())),
            ("gazetteer_mode", self.gazetteer_mode.to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = FeatureConfig::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("not a key=value line: {line:?}")))?;
            if !cfg.set(k.trim(), v.trim())? {
                return Err(Error::Config(format!("unknown key {:?}", k.trim())));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Sparse features of one token position, sorted by feature id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    entries: Vec<(String, f64)>,
}

impl FeatureVector {
    /// Sorts by id. Panics on a duplicate id.
    pub fn new(mut entries: Vec<(String, f64)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        assert!(
            entries.windows(2).all(|w| w[0].0 != w[1].0),
            "duplicate feature id in vector"
        );
        FeatureVector { entries }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.entries
            .binary_search_by(|(k, _)| k.as_str().cmp(id))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffixKind {
    Prefix,
    Suffix,
}

/// Prefixes and suffixes of `min_len..=min(max_len, len)` code points.
pub fn affixes(word: &str, min_len: usize, max_len: usize) -> Vec<(AffixKind, String)> {
    let chars: Vec<char> = word.chars().collect();
    let upper = max_len.min(chars.len());
    let mut out = Vec::new();
    for k in min_len..=upper {
        out.push((AffixKind::Prefix, chars[..k].iter().collect()));
        out.push((AffixKind::Suffix, chars[chars.len() - k..].iter().collect()));
    }
    out
}

/// True iff some code point is a Unicode decimal digit (category Nd).
pub fn has_digit(word: &str) -> bool {
    word.chars()
        .any(|c| c.general_category() == GeneralCategory::DecimalNumber)
}

/// True iff the first code point is uppercase. Fails on an empty word.
pub fn is_capitalized(word: &str) -> Result<bool> {
    word.chars()
        .next()
        .map(char::is_uppercase)
        .ok_or_else(|| Error::InvalidInput("capitalization of an empty word".into()))
}

/// `index / (len - 1)`, or 0 for a one-token sentence.
pub fn position_value(index: usize, sentence_len: usize) -> f64 {
    debug_assert!(index < sentence_len);
    if sentence_len > 1 {
        index as f64 / (sentence_len - 1) as f64
    } else {
        0.0
    }
}

/// Surface of the closest token whose POS is a verb tag, the token itself included.
/// On equal distance the right-hand verb wins.
pub fn nearest_verb<'a>(
    sentence: &'a Sentence,
    index: usize,
    verb_tags: &BTreeSet<String>,
) -> Option<&'a str> {
    let tokens = sentence.tokens();
    let is_verb = |i: usize| verb_tags.contains(&tokens[i].pos);
    for d in 0..tokens.len() {
        if index + d < tokens.len() && is_verb(index + d) {
            return Some(&tokens[index + d].surface);
        }
        if d <= index && is_verb(index - d) {
            return Some(&tokens[index - d].surface);
        }
    }
    None
}

fn offset_label(offset: isize) -> String {
    if offset > 0 {
        format!("+{offset}")
    } else {
        offset.to_string()
    }
}

/// Gazetteer flags for one sentence, keyed by gazetteer name.
pub type GazetteerMatches<'a> = [(&'a str, Vec<GazFlag>)];

/// Builds the feature vector of token `index`. `matches` holds one flag array per
/// gazetteer; only gazetteers listed in `cfg.gazetteers` contribute.
pub fn extract_features(
    sentence: &Sentence,
    index: usize,
    cfg: &FeatureConfig,
    matches: &GazetteerMatches<'_>,
) -> FeatureVector {
    let tokens = sentence.tokens();
    let n = tokens.len();
    let token = &tokens[index];
    let mut out: Vec<(String, f64)> = Vec::with_capacity(24);
    let mut bin = |id: String| out.push((id, 1.0));

    let at = |offset: isize| -> Option<usize> {
        let j = index as isize + offset;
        (0..n as isize).contains(&j).then_some(j as usize)
    };
    let sentinel = |offset: isize| if offset < 0 { BOS } else { EOS };

    let w = cfg.context_window as isize;
    for offset in -w..=w {
        let value = at(offset).map_or(sentinel(offset), |j| tokens[j].surface.as_str());
        bin(format!("w[{}]={value}", offset_label(offset)));
    }

    if !cfg.affix_nnp_only || token.pos == PROPER_NOUN_TAG {
        for (kind, affix) in affixes(&token.surface, cfg.affix_min, cfg.affix_max) {
            let len = affix.chars().count();
            let tag = match kind {
                AffixKind::Prefix => "pre",
                AffixKind::Suffix => "suf",
            };
            bin(format!("{tag}{len}={affix}"));
        }
    }

    for offset in -1isize..=1 {
        let o = offset_label(offset);
        if cfg.use_pos {
            let v = at(offset).map_or(sentinel(offset), |j| tokens[j].pos.as_str());
            bin(format!("pos[{o}]={v}"));
        }
        if cfg.use_chunk {
            let v = at(offset).map_or(sentinel(offset), |j| tokens[j].chunk.as_str());
            bin(format!("chunk[{o}]={v}"));
        }
    }

    if cfg.use_boundary {
        if index == 0 {
            bin("first".into());
        }
        if n >= 2 && index == n - 2 {
            bin("penult".into());
        }
    }
    if cfg.use_last && index == n - 1 {
        bin("last".into());
    }

    if cfg.use_digit && has_digit(&token.surface) {
        bin("digit".into());
    }

    if cfg.use_verb {
        match nearest_verb(sentence, index, &cfg.verb_tags) {
            Some(v) => bin(format!("verb={v}")),
            None => bin("verb:none".into()),
        }
    }

    for (name, flags) in matches {
        if !cfg.gazetteers.iter().any(|g| g == name) {
            continue;
        }
        match flags[index] {
            GazFlag::O => {}
            flag => bin(format!("gaz:{name}:{flag}")),
        }
    }

    if cfg.use_capital && is_capitalized(&token.surface).unwrap_or(false) {
        bin("cap".into());
    }

    if cfg.use_position {
        out.push((POSITION_FEATURE.into(), position_value(index, n)));
    }

    FeatureVector::new(out)
}

/// Computes gazetteer flags for the gazetteers named in `cfg` and extracts every position.
pub fn sentence_features(
    sentence: &Sentence,
    cfg: &FeatureConfig,
    gazetteers: &[Gazetteer],
) -> Vec<FeatureVector> {
    let matches: Vec<(&str, Vec<GazFlag>)> = gazetteers
        .iter()
        .filter(|g| cfg.gazetteers.iter().any(|n| n == g.name()))
        .map(|g| (g.name(), gazetteer::flags_for(g, sentence, cfg.gazetteer_mode)))
        .collect();
    (0..sentence.len())
        .map(|i| extract_features(sentence, i, cfg, &matches))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;
    use proptest::prelude::*;

    fn sent(rows: &[(&str, &str)]) -> Sentence {
        Sentence::new(
            rows.iter()
                .map(|(w, p)| Token::new(*w, *p, "B-NP", None).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn affix_set(word: &str) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut pre = BTreeSet::new();
        let mut suf = BTreeSet::new();
        for (k, a) in affixes(word, 3, 5) {
            match k {
                AffixKind::Prefix => pre.insert(a),
                AffixKind::Suffix => suf.insert(a),
            };
        }
        (pre, suf)
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn affix_examples() {
        assert_eq!(
            affix_set("Kolkata"),
            (set(&["Kol", "Kolk", "Kolka"]), set(&["ata", "kata", "lkata"]))
        );
        assert!(affixes("ab", 3, 5).is_empty());
        // Three code points, nine bytes.
        assert_eq!(affix_set("अमर"), (set(&["अमर"]), set(&["अमर"])));
    }

    #[test]
    fn digits() {
        assert!(has_digit("abc123"));
        assert!(!has_digit("abc"));
        assert!(has_digit("১২৩"));
        assert!(has_digit("१९४७"));
        // Roman numeral is a letter number, not a decimal digit.
        assert!(!has_digit("Ⅻ"));
    }

    #[test]
    fn capitalization() {
        assert!(is_capitalized("India").unwrap());
        assert!(!is_capitalized("india").unwrap());
        assert!(!is_capitalized("iPhone").unwrap());
        assert!(!is_capitalized("ভারত").unwrap());
        assert!(is_capitalized("").is_err());
    }

    #[test]
    fn positions() {
        assert_eq!(position_value(0, 5), 0.0);
        assert_eq!(position_value(4, 5), 1.0);
        assert_eq!(position_value(0, 1), 0.0);
        assert_eq!(position_value(2, 4), 2.0 / 3.0);
    }

    #[test]
    fn verbs() {
        let tags = FeatureConfig::default().verb_tags;
        let s = sent(&[("Ram", "NNP"), ("went", "VB"), ("home", "NN")]);
        assert_eq!(nearest_verb(&s, 0, &tags), Some("went"));
        assert_eq!(nearest_verb(&s, 1, &tags), Some("went"));
        let s = sent(&[("a", "NN"), ("b", "NN"), ("c", "NN")]);
        assert!((0..3).all(|i| nearest_verb(&s, i, &tags).is_none()));
        let s = sent(&[("left", "VB"), ("x", "NN"), ("right", "VB")]);
        assert_eq!(nearest_verb(&s, 1, &tags), Some("right"));
        assert_eq!(nearest_verb(&s, 0, &tags), Some("left"));
    }

    #[test]
    fn single_token_context_only() {
        let s = sent(&[("Kolkata", "NNP")]);
        let cfg = FeatureConfig {
            context_window: 1,
            affix_min: 10,
            affix_max: 10,
            ..FeatureConfig::minimal()
        };
        let v = extract_features(&s, 0, &cfg, &[]);
        assert_eq!(
            v.entries(),
            &[
                ("w[+1]=EOS".to_string(), 1.0),
                ("w[-1]=BOS".to_string(), 1.0),
                ("w[0]=Kolkata".to_string(), 1.0),
            ]
        );
    }

    #[test]
    fn digit_and_position_features() {
        let s = sent(&[("a", "NN"), ("b", "NN"), ("42", "CD"), ("c", "NN")]);
        let cfg = FeatureConfig {
            use_digit: true,
            use_position: true,
            ..FeatureConfig::minimal()
        };
        let v = extract_features(&s, 2, &cfg, &[]);
        assert_eq!(v.get("digit"), Some(1.0));
        assert_eq!(v.get("posn"), Some(2.0 / 3.0));
    }

    #[test]
    fn boundary_indicators() {
        let s = sent(&[("a", "NN"), ("b", "NN"), ("c", "SYM")]);
        let cfg = FeatureConfig {
            use_boundary: true,
            use_last: true,
            ..FeatureConfig::minimal()
        };
        let f = |i| extract_features(&s, i, &cfg, &[]);
        assert_eq!(f(0).get("first"), Some(1.0));
        assert_eq!(f(1).get("penult"), Some(1.0));
        assert_eq!(f(2).get("last"), Some(1.0));
        assert_eq!(f(2).get("penult"), None);
        let one = sent(&[("a", "NN")]);
        let v = extract_features(&one, 0, &cfg, &[]);
        assert_eq!(v.get("penult"), None);
        assert_eq!(v.get("first"), Some(1.0));
    }

    #[test]
    fn nnp_only_affixes() {
        let s = sent(&[("Kolkata", "NNP"), ("city", "NN"), ("nagar", "NNPC")]);
        let cfg = FeatureConfig {
            affix_nnp_only: true,
            ..FeatureConfig::minimal()
        };
        assert_eq!(extract_features(&s, 0, &cfg, &[]).get("suf3=ata"), Some(1.0));
        assert!(!extract_features(&s, 1, &cfg, &[]).ids().any(|id| id.starts_with("suf")));
        assert!(!extract_features(&s, 2, &cfg, &[]).ids().any(|id| id.starts_with("pre")));
    }

    #[test]
    fn gazetteer_features_follow_config() {
        let s = sent(&[("Rabindranath", "NNP"), ("Tagore", "NNP"), ("wrote", "VB")]);
        let g = Gazetteer::from_lines("person", ["Rabindranath Tagore"], false).unwrap();
        let mut cfg = FeatureConfig::minimal();
        let vecs = sentence_features(&s, &cfg, std::slice::from_ref(&g));
        assert!(vecs.iter().all(|v| !v.ids().any(|id| id.starts_with("gaz:"))));
        cfg.gazetteers = vec!["person".into()];
        let vecs = sentence_features(&s, &cfg, &[g]);
        assert_eq!(vecs[0].get("gaz:person:B"), Some(1.0));
        assert_eq!(vecs[1].get("gaz:person:I"), Some(1.0));
        assert!(!vecs[2].ids().any(|id| id.starts_with("gaz:")));
    }

    #[test]
    fn kv_round_trip() {
        let cfg = FeatureConfig {
            context_window: 2,
            use_capital: true,
            gazetteers: vec!["person".into(), "location".into()],
            gazetteer_mode: GazetteerMode::Token,
            ..FeatureConfig::default()
        };
        assert_eq!(FeatureConfig::from_kv_str(&cfg.to_kv_string()).unwrap(), cfg);
        assert!(FeatureConfig::from_kv_str("contxt_window=1").is_err());
        assert!(FeatureConfig::from_kv_str("affix_min=0").is_err());
        assert!(FeatureConfig::from_kv_str("context_window=5").is_err());
        assert!(FeatureConfig::from_kv_str("use_pos=maybe").is_err());
    }

    const FAMILIES: [&str; 9] = [
        "affix", "pos", "chunk", "boundary", "digit", "position", "verb", "gazetteer", "capital",
    ];

    fn family_of(id: &str) -> &'static str {
        if id.starts_with("w[") {
            "context"
        } else if id.starts_with("pre") || id.starts_with("suf") {
            "affix"
        } else if id.starts_with("pos[") {
            "pos"
        } else if id.starts_with("chunk[") {
            "chunk"
        } else if matches!(id, "first" | "penult" | "last") {
            "boundary"
        } else if id == "digit" {
            "digit"
        } else if id == "posn" {
            "position"
        } else if id.starts_with("verb") {
            "verb"
        } else if id.starts_with("gaz:") {
            "gazetteer"
        } else if id == "cap" {
            "capital"
        } else {
            panic!("unclassified feature id {id}")
        }
    }

    fn disable(cfg: &mut FeatureConfig, family: &str) {
        match family {
            // An unreachable minimum length switches affixes off.
            "affix" => {
                cfg.affix_min = 50;
                cfg.affix_max = 50;
            }
            "pos" => cfg.use_pos = false,
            "chunk" => cfg.use_chunk = false,
            "boundary" => {
                cfg.use_boundary = false;
                cfg.use_last = false;
            }
            "digit" => cfg.use_digit = false,
            "position" => cfg.use_position = false,
            "verb" => cfg.use_verb = false,
            "gazetteer" => cfg.gazetteers.clear(),
            "capital" => cfg.use_capital = false,
            _ => unreachable!(),
        }
    }

    fn word() -> impl Strategy<Value = String> {
        prop_oneof![
            "[A-Za-z0-9]{1,8}",
            Just("Kolkata".to_string()),
            Just("১২৩".to_string()),
            Just("অমর".to_string()),
        ]
    }

    fn arb_sentence() -> impl Strategy<Value = Sentence> {
        prop::collection::vec(
            (word(), prop::sample::select(vec!["NN", "NNP", "VB", "VM", "JJ"])),
            1..8,
        )
        .prop_map(|rows| {
            Sentence::new(
                rows.into_iter()
                    .map(|(w, p)| Token::new(w, p, "B-NP", None).unwrap())
                    .collect(),
            )
            .unwrap()
        })
    }

    fn full_config(window: usize) -> FeatureConfig {
        FeatureConfig {
            context_window: window,
            use_last: true,
            use_capital: true,
            gazetteers: vec!["g".into()],
            ..FeatureConfig::default()
        }
    }

    proptest! {
        #[test]
        fn toggles_remove_exactly_their_family(s in arb_sentence(), window in 0usize..=4) {
            let g = Gazetteer::from_lines("g", ["Kolkata", "অমর Kolkata"], false).unwrap();
            let gaz = std::slice::from_ref(&g);
            let cfg = full_config(window);
            let full = sentence_features(&s, &cfg, gaz);
            for family in FAMILIES {
                let mut off = cfg.clone();
                disable(&mut off, family);
                let reduced = sentence_features(&s, &off, gaz);
                for (a, b) in full.iter().zip(&reduced) {
                    let a: BTreeSet<&str> = a.ids().collect();
                    let b: BTreeSet<&str> = b.ids().collect();
                    prop_assert!(b.is_subset(&a));
                    for id in a.difference(&b) {
                        prop_assert_eq!(family_of(id), family);
                    }
                    for id in &a {
                        if family_of(id) == family {
                            prop_assert!(!b.contains(id));
                        }
                    }
                }
            }
        }

        #[test]
        fn vectors_are_canonical(s in arb_sentence(), window in 0usize..=4) {
            let cfg = full_config(window);
            for i in 0..s.len() {
                let v = extract_features(&s, i, &cfg, &[]);
                prop_assert_eq!(&v, &extract_features(&s, i, &cfg, &[]));
                let ids: Vec<&str> = v.ids().collect();
                prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
                let context = ids.iter().filter(|id| id.starts_with("w[")).count();
                prop_assert_eq!(context, 2 * window + 1);
                for (id, value) in v.entries() {
                    if id == POSITION_FEATURE {
                        prop_assert!((0.0..=1.0).contains(value));
                    } else {
                        prop_assert_eq!(*value, 1.0);
                    }
                }
            }
        }
    }
}
