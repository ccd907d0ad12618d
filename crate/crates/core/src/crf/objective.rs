use crate::error::{Error, Result};

use super::lattice::{self, Lattice};
use super::{num_params, IndexedVector, Model};

/// One training sequence: indexed features per position and gold label ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<IndexedVector>,
    pub gold: Vec<usize>,
}

impl Instance {
    pub(crate) fn check(&self, num_features: usize, num_labels: usize) -> Result<()> {
        if self.features.is_empty() || self.features.len() != self.gold.len() {
            return Err(Error::InvalidInput(format!(
                "instance has {} positions and {} gold labels",
                self.features.len(),
                self.gold.len()
            )));
        }
        if let Some(&id) = self.gold.iter().find(|&&y| y >= num_labels) {
            return Err(Error::LabelOutOfRange { id, num_labels });
        }
        if let Some(&(f, _)) = self.features.iter().flatten().find(|(f, _)| *f >= num_features) {
            return Err(Error::InvalidInput(format!("feature index {f} out of range")));
        }
        Ok(())
    }
}

/// Negative log-likelihood of one instance; adds its gradient into `grad`.
pub(crate) fn accumulate(
    weights: &[f64],
    num_labels: usize,
    inst: &Instance,
    grad: &mut [f64],
) -> f64 {
    let l = num_labels;
    let lat: Lattice = lattice::from_weights(weights, l, &inst.features);
    let (log_z, m) = lat.marginals();
    let nll = log_z - lat.path_score(&inst.gold);

    let unigram_len = weights.len() - (l + 1) * l;
    let (g_uni, g_rest) = grad.split_at_mut(unigram_len);
    let (g_trans, g_start) = g_rest.split_at_mut(l * l);

    for (t, items) in inst.features.iter().enumerate() {
        let probs = m.node_row(t);
        let gold = inst.gold[t];
        for &(f, v) in items {
            let row = &mut g_uni[f * l..(f + 1) * l];
            for (g, p) in row.iter_mut().zip(probs) {
                *g += p * v;
            }
            row[gold] -= v;
        }
    }
    for (g, p) in g_start.iter_mut().zip(m.node_row(0)) {
        *g += p;
    }
    g_start[inst.gold[0]] -= 1.0;
    for t in 0..inst.gold.len() - 1 {
        for a in 0..l {
            for b in 0..l {
                g_trans[a * l + b] += m.edge(t, a, b);
            }
        }
        g_trans[inst.gold[t] * l + inst.gold[t + 1]] -= 1.0;
    }
    nll
}

/// Adds `||w||² / (2σ²)` and its gradient `w / σ²`.
pub(crate) fn add_penalty(weights: &[f64], sigma: f64, grad: &mut [f64]) -> f64 {
    let inv_var = 1.0 / (sigma * sigma);
    let mut sq = 0.0;
    for (g, w) in grad.iter_mut().zip(weights) {
        *g += w * inv_var;
        sq += w * w;
    }
    0.5 * sq * inv_var
}

/// Penalized negative log-likelihood of `batch` and its gradient over all parameters,
/// laid out like [`Model::weights`].
pub fn nll_and_gradient(model: &Model, batch: &[Instance]) -> Result<(f64, Vec<f64>)> {
    let l = model.num_labels();
    let n = num_params(model.features().len(), l);
    for inst in batch {
        inst.check(model.features().len(), l)?;
    }
    let mut grad = vec![0.0; n];
    let mut value = 0.0;
    for inst in batch {
        value += accumulate(model.weights(), l, inst, &mut grad);
    }
    value += add_penalty(model.weights(), model.l2_sigma(), &mut grad);
    Ok((value, grad))
}
