//! Exact-match entity-level scoring.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::corpus::{split_label, Corpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntitySpan {
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    pub etype: String,
}

impl EntitySpan {
    pub fn new(start: usize, end: usize, etype: impl Into<String>) -> Self {
        let etype = etype.into();
        assert!(start < end && !etype.is_empty(), "invalid span {start}..{end} {etype:?}");
        EntitySpan { start, end, etype }
    }
}

/// Spans of maximal `B-X I-X*` runs. A stray `I-X` opens a new span.
pub fn extract_entities<S: AsRef<str>>(labels: &[S]) -> BTreeSet<EntitySpan> {
    let mut spans = BTreeSet::new();
    let mut open: Option<(usize, &str)> = None;
    for (i, label) in labels.iter().enumerate() {
        let parsed = split_label(label.as_ref());
        let continues = matches!(
            (parsed, open),
            (Some(('I', t)), Some((_, cur))) if t == cur
        );
        if continues {
            continue;
        }
        if let Some((start, etype)) = open.take() {
            spans.insert(EntitySpan::new(start, i, etype));
        }
        if let Some((_, etype)) = parsed {
            open = Some((i, etype));
        }
    }
    if let Some((start, etype)) = open {
        spans.insert(EntitySpan::new(start, labels.len(), etype));
    }
    spans
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Counts and derived scores for one entity type, or for all types combined.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub gold: usize,
    pub pred: usize,
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(gold: usize, pred: usize, correct: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(correct, pred);
        let recall = ratio(correct, gold);
        Prf {
            gold,
            pred,
            correct,
            precision,
            recall,
            f1: f_measure(precision, recall),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub per_type: BTreeMap<String, Prf>,
    /// Micro-average over all types.
    pub overall: Prf,
}

/// Scores `pred` against `gold`; both must hold the same sentences and tokens.
pub fn score(gold: &Corpus, pred: &Corpus) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        let first = gold.len().min(pred.len());
        return Err(Error::ShapeMismatch {
            sentence: first,
            message: format!("gold has {} sentences, prediction {}", gold.len(), pred.len()),
        });
    }
    let mut counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for (i, (g, p)) in gold.sentences().iter().zip(pred.sentences()).enumerate() {
        if g.len() != p.len() {
            return Err(Error::ShapeMismatch {
                sentence: i,
                message: format!("gold has {} tokens, prediction {}", g.len(), p.len()),
            });
        }
        if let Some(j) = g.surfaces().zip(p.surfaces()).position(|(a, b)| a != b) {
            return Err(Error::ShapeMismatch {
                sentence: i,
                message: format!("surfaces differ at token {j}"),
            });
        }
        let (Some(gl), Some(pl)) = (g.labels(), p.labels()) else {
            return Err(Error::ShapeMismatch {
                sentence: i,
                message: "sentence is unlabeled".into(),
            });
        };
        let gs = extract_entities(&gl);
        let ps = extract_entities(&pl);
        for s in &gs {
            counts.entry(s.etype.clone()).or_default().0 += 1;
        }
        for s in &ps {
            let c = counts.entry(s.etype.clone()).or_default();
            c.1 += 1;
            if gs.contains(s) {
                c.2 += 1;
            }
        }
    }
    let per_type: BTreeMap<String, Prf> = counts
        .into_iter()
        .map(|(t, (g, p, c))| (t, Prf::from_counts(g, p, c)))
        .collect();
    let (g, p, c) = per_type
        .values()
        .fold((0, 0, 0), |acc, x| (acc.0 + x.gold, acc.1 + x.pred, acc.2 + x.correct));
    Ok(EvalReport {
        per_type,
        overall: Prf::from_counts(g, p, c),
    })
}

impl EvalReport {
    /// Fixed-width table: one row per type and an `overall` row, 4 decimals.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<12} {:>6} {:>6} {:>8} {:>10} {:>10} {:>10}\n",
            "Type", "Gold", "Pred", "Correct", "Precision", "Recall", "F-Measure"
        );
        let row = |name: &str, m: &Prf| {
            format!(
                "{:<12} {:>6} {:>6} {:>8} {:>10.4} {:>10.4} {:>10.4}\n",
                name, m.gold, m.pred, m.correct, m.precision, m.recall, m.f1
            )
        };
        for (t, m) in &self.per_type {
            out.push_str(&row(t, m));
        }
        out.push_str(&row("overall", &self.overall));
        out
    }

    /// One `key=value` record per type plus the overall record.
    pub fn records(&self) -> String {
        let rec = |name: &str, m: &Prf| {
            format!(
                "type={} gold={} pred={} correct={} precision={:.4} recall={:.4} f1={:.4}\n",
                name, m.gold, m.pred, m.correct, m.precision, m.recall, m.f1
            )
        };
        let mut out: String = self.per_type.iter().map(|(t, m)| rec(t, m)).collect();
        out.push_str(&rec("overall", &self.overall));
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.table())
    }
}
