// Index loops mirror the recurrences.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

use super::IndexedVector;

/// Log-potentials of one sequence: per-position node scores, start scores, and a
/// position-independent transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    num_labels: usize,
    len: usize,
    node: Vec<f64>,
    start: Vec<f64>,
    trans: Vec<f64>,
}

/// Posterior marginals from forward-backward.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    num_labels: usize,
    node: Vec<f64>,
    edge: Vec<f64>,
}

impl Marginals {
    /// `P(y_t = label)`.
    pub fn node(&self, t: usize, label: usize) -> f64 {
        self.node[t * self.num_labels + label]
    }

    pub fn node_row(&self, t: usize) -> &[f64] {
        &self.node[t * self.num_labels..(t + 1) * self.num_labels]
    }

    /// `P(y_t = prev, y_{t+1} = next)` for `t` in `0..len - 1`.
    pub fn edge(&self, t: usize, prev: usize, next: usize) -> f64 {
        let l = self.num_labels;
        self.edge[t * l * l + prev * l + next]
    }
}

pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub(crate) fn from_weights(weights: &[f64], num_labels: usize, seq: &[IndexedVector]) -> Lattice {
    let l = num_labels;
    let unigram_len = weights.len() - (l + 1) * l;
    let mut node = vec![0.0; seq.len() * l];
    for (t, items) in seq.iter().enumerate() {
        let row = &mut node[t * l..(t + 1) * l];
        for &(f, v) in items {
            let w = &weights[f * l..(f + 1) * l];
            for (r, wy) in row.iter_mut().zip(w) {
                *r += wy * v;
            }
        }
    }
    let trans = weights[unigram_len..unigram_len + l * l].to_vec();
    let start = weights[unigram_len + l * l..].to_vec();
    Lattice {
        num_labels: l,
        len: seq.len(),
        node,
        start,
        trans,
    }
}

impl Lattice {
    /// `node_rows[t][y]`, `start[y]` and `trans[prev][next]`; all values must be finite.
    pub fn new(node_rows: &[Vec<f64>], start: &[f64], trans: &[Vec<f64>]) -> Result<Self> {
        let l = start.len();
        if l == 0 || node_rows.is_empty() {
            return Err(Error::InvalidInput("lattice needs at least one position and label".into()));
        }
        if node_rows.iter().any(|r| r.len() != l)
            || trans.len() != l
            || trans.iter().any(|r| r.len() != l)
        {
            return Err(Error::InvalidInput("lattice rows disagree on the label count".into()));
        }
        let node: Vec<f64> = node_rows.concat();
        let trans: Vec<f64> = trans.concat();
        if node.iter().chain(start).chain(&trans).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("lattice scores must be finite".into()));
        }
        Ok(Lattice {
            num_labels: l,
            len: node_rows.len(),
            node,
            start: start.to_vec(),
            trans,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn node(&self, t: usize, label: usize) -> f64 {
        self.node[t * self.num_labels + label]
    }

    pub fn start(&self, label: usize) -> f64 {
        self.start[label]
    }

    pub fn transition(&self, prev: usize, next: usize) -> f64 {
        self.trans[prev * self.num_labels + next]
    }

    /// Unnormalized log score of one label sequence.
    pub fn path_score(&self, path: &[usize]) -> f64 {
        assert_eq!(path.len(), self.len, "path length must match lattice length");
        let mut score = self.start(path[0]) + self.node(0, path[0]);
        for t in 1..self.len {
            score += self.transition(path[t - 1], path[t]) + self.node(t, path[t]);
        }
        score
    }

    fn forward(&self) -> Vec<f64> {
        let l = self.num_labels;
        let mut alpha = vec![0.0; self.len * l];
        for y in 0..l {
            alpha[y] = self.start[y] + self.node[y];
        }
        for t in 1..self.len {
            let (prev, cur) = alpha.split_at_mut(t * l);
            let prev = &prev[(t - 1) * l..];
            for y in 0..l {
                let incoming = (0..l).map(|a| prev[a] + self.trans[a * l + y]);
                cur[y] = log_sum_exp(incoming) + self.node[t * l + y];
            }
        }
        alpha
    }

    fn backward(&self) -> Vec<f64> {
        let l = self.num_labels;
        let mut beta = vec![0.0; self.len * l];
        for t in (0..self.len.saturating_sub(1)).rev() {
            let (cur, next) = beta.split_at_mut((t + 1) * l);
            let next = &next[..l];
            for y in 0..l {
                let outgoing =
                    (0..l).map(|b| self.trans[y * l + b] + self.node[(t + 1) * l + b] + next[b]);
                cur[t * l + y] = log_sum_exp(outgoing);
            }
        }
        beta
    }

    /// `log Σ_y exp(path_score(y))`, via the forward recursion in log space.
    pub fn log_partition(&self) -> f64 {
        let l = self.num_labels;
        let alpha = self.forward();
        log_sum_exp(alpha[(self.len - 1) * l..].iter().copied())
    }

    /// Forward-backward. Returns the log-partition alongside the marginals.
    pub fn marginals(&self) -> (f64, Marginals) {
        let l = self.num_labels;
        let alpha = self.forward();
        let beta = self.backward();
        let log_z = log_sum_exp(alpha[(self.len - 1) * l..].iter().copied());

        let node = alpha
            .iter()
            .zip(&beta)
            .map(|(a, b)| (a + b - log_z).exp())
            .collect();

        let mut edge = vec![0.0; self.len.saturating_sub(1) * l * l];
        for t in 0..self.len.saturating_sub(1) {
            for a in 0..l {
                for b in 0..l {
                    edge[t * l * l + a * l + b] = (alpha[t * l + a]
                        + self.trans[a * l + b]
                        + self.node[(t + 1) * l + b]
                        + beta[(t + 1) * l + b]
                        - log_z)
                        .exp();
                }
            }
        }
        (
            log_z,
            Marginals {
                num_labels: l,
                node,
                edge,
            },
        )
    }

    /// Max-score path. Ties go to the lowest label index at every decision.
    pub fn viterbi(&self) -> (Vec<usize>, f64) {
        let l = self.num_labels;
        let mut delta: Vec<f64> = (0..l).map(|y| self.start[y] + self.node[y]).collect();
        let mut back = vec![0usize; self.len * l];
        let mut next = vec![0.0; l];
        for t in 1..self.len {
            for y in 0..l {
                let mut best = 0;
                let mut best_score = delta[0] + self.trans[y];
                for a in 1..l {
                    let s = delta[a] + self.trans[a * l + y];
                    if s > best_score {
                        best = a;
                        best_score = s;
                    }
                }
                back[t * l + y] = best;
                next[y] = best_score + self.node[t * l + y];
            }
            std::mem::swap(&mut delta, &mut next);
        }
        let mut last = 0;
        for y in 1..l {
            if delta[y] > delta[last] {
                last = y;
            }
        }
        let score = delta[last];
        let mut path = vec![last; self.len];
        for t in (1..self.len).rev() {
            path[t - 1] = back[t * l + path[t]];
        }
        (path, score)
    }
}
