//! Linear-chain CRF with first-order label transitions.
//!
//! Parameters live in one flat vector: the unigram block `(feature, label)` row-major,
//! followed by the transition block of `labels + 1` rows. The last transition row holds
//! the weights of the virtual start state.

mod io;
mod lattice;
pub mod lbfgs;
mod objective;
mod train;

use std::collections::HashMap;

pub use io::{load_model, read_model, save_model, write_model, FORMAT_VERSION, MAGIC};
pub use lattice::{Lattice, Marginals};
pub use objective::{nll_and_gradient, Instance};
pub use train::{train, train_with_report, TrainParams, TrainReport, Trainer};

use crate::corpus::{Corpus, Sentence};
use crate::error::{Error, Result};
use crate::features::{sentence_features, FeatureConfig, FeatureVector};
use crate::gazetteer::Gazetteer;

/// Bijection between feature id strings and dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureIndex {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl FeatureIndex {
    /// Fails on a duplicate name.
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut ids = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if ids.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate feature id {name:?}")));
            }
        }
        Ok(FeatureIndex { names, ids })
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Training provenance stored with the model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrainMetadata {
    pub iterations: u32,
    pub final_objective: f64,
    pub config_hash: u64,
}

/// Sparse `(feature index, value)` pairs of one position.
pub type IndexedVector = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    labels: Vec<String>,
    features: FeatureIndex,
    weights: Vec<f64>,
    l2_sigma: f64,
    metadata: TrainMetadata,
    feature_config: FeatureConfig,
    gazetteers: Vec<Gazetteer>,
}

pub(crate) fn num_params(num_features: usize, num_labels: usize) -> usize {
    num_features * num_labels + (num_labels + 1) * num_labels
}

impl Model {
    /// A model with all weights zero.
    pub fn new(
        labels: Vec<String>,
        features: FeatureIndex,
        feature_config: FeatureConfig,
        gazetteers: Vec<Gazetteer>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("model needs at least one label".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate label {dup:?}")));
        }
        let n = num_params(features.len(), labels.len());
        Ok(Model {
            labels,
            features,
            weights: vec![0.0; n],
            l2_sigma: TrainParams::default().l2_sigma,
            metadata: TrainMetadata::default(),
            feature_config,
            gazetteers,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn features(&self) -> &FeatureIndex {
        &self.features
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.feature_config
    }

    pub fn gazetteers(&self) -> &[Gazetteer] {
        &self.gazetteers
    }

    pub fn l2_sigma(&self) -> f64 {
        self.l2_sigma
    }

    pub fn set_l2_sigma(&mut self, sigma: f64) -> Result<()> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("l2_sigma must be positive, got {sigma}")));
        }
        self.l2_sigma = sigma;
        Ok(())
    }

    pub fn metadata(&self) -> &TrainMetadata {
        &self.metadata
    }

    pub fn set_metadata(&mut self, metadata: TrainMetadata) {
        self.metadata = metadata;
    }

    /// All parameters, unigram block first.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    fn unigram_len(&self) -> usize {
        self.features.len() * self.labels.len()
    }

    pub fn unigram(&self, feature: usize, label: usize) -> f64 {
        self.weights[feature * self.labels.len() + label]
    }

    pub fn set_unigram(&mut self, feature: usize, label: usize, w: f64) {
        let l = self.labels.len();
        self.weights[feature * l + label] = w;
    }

    pub fn transition(&self, prev: usize, next: usize) -> f64 {
        self.weights[self.unigram_len() + prev * self.labels.len() + next]
    }

    pub fn set_transition(&mut self, prev: usize, next: usize, w: f64) {
        let i = self.unigram_len() + prev * self.labels.len() + next;
        self.weights[i] = w;
    }

    /// Weight of entering `label` from the virtual start state.
    pub fn start(&self, label: usize) -> f64 {
        self.transition(self.labels.len(), label)
    }

    pub fn set_start(&mut self, label: usize, w: f64) {
        self.set_transition(self.labels.len(), label, w)
    }

    pub fn label_id(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Maps feature ids to dense indices, dropping ids the model has never seen.
    pub fn index_vectors(&self, vectors: &[FeatureVector]) -> Vec<IndexedVector> {
        vectors
            .iter()
            .map(|v| {
                v.entries()
                    .iter()
                    .filter_map(|(id, value)| self.features.id(id).map(|i| (i, *value)))
                    .collect()
            })
            .collect()
    }

    /// Node scores from feature weights; unknown feature ids contribute nothing.
    pub fn build_lattice(&self, vectors: &[FeatureVector]) -> Result<Lattice> {
        if vectors.is_empty() {
            return Err(Error::InvalidInput("cannot build a lattice for an empty sequence".into()));
        }
        Ok(lattice::from_weights(
            &self.weights,
            self.labels.len(),
            &self.index_vectors(vectors),
        ))
    }

    pub fn sentence_features(&self, sentence: &Sentence) -> Vec<FeatureVector> {
        sentence_features(sentence, &self.feature_config, &self.gazetteers)
    }

    /// Best label sequence of a sentence under the model's own feature configuration.
    pub fn tag(&self, sentence: &Sentence) -> Vec<String> {
        let vectors = self.sentence_features(sentence);
        viterbi(self, &vectors)
            .expect("sentences are nonempty")
            .0
    }

    /// Tags every sentence, returning a labeled copy of `corpus`.
    pub fn tag_corpus(&self, corpus: &Corpus) -> Result<Corpus> {
        let labels: Vec<Vec<String>> = corpus.sentences().iter().map(|s| self.tag(s)).collect();
        corpus.with_labels(&labels)
    }
}

/// Highest-scoring label sequence and its score.
pub fn viterbi(model: &Model, vectors: &[FeatureVector]) -> Result<(Vec<String>, f64)> {
    let lattice = model.build_lattice(vectors)?;
    let (path, score) = lattice.viterbi();
    let labels = path.into_iter().map(|y| model.labels[y].clone()).collect();
    Ok((labels, score))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(features: &[&str], labels: usize) -> Model {
        let labels = (0..labels).map(|i| format!("L{i}")).collect();
        let index = FeatureIndex::new(features.iter().map(|s| s.to_string()).collect()).unwrap();
        Model::new(labels, index, FeatureConfig::minimal(), vec![]).unwrap()
    }

    fn fv(entries: &[(&str, f64)]) -> FeatureVector {
        FeatureVector::new(entries.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    #[test]
    fn zero_weights_zero_scores() {
        let m = model(&["a", "b"], 3);
        let lat = m.build_lattice(&[fv(&[("a", 1.0)]), fv(&[("b", 1.0)])]).unwrap();
        assert!((0..2).all(|t| (0..3).all(|y| lat.node(t, y) == 0.0)));
    }

    #[test]
    fn lattice_is_linear_in_values() {
        let mut m = model(&["a"], 2);
        m.set_unigram(0, 0, 2.0);
        let lat = m.build_lattice(&[fv(&[("a", 1.0)])]).unwrap();
        assert_eq!(lat.node(0, 0), 2.0);
        assert_eq!(lat.node(0, 1), 0.0);
        let lat = m.build_lattice(&[fv(&[("a", 0.5), ("unseen", 1.0)])]).unwrap();
        assert_eq!(lat.node(0, 0), 1.0);
    }

    #[test]
    fn empty_sequence_rejected() {
        let m = model(&["a"], 2);
        assert!(m.build_lattice(&[]).is_err());
        assert!(viterbi(&m, &[]).is_err());
    }

    #[test]
    fn viterbi_single_position() {
        let mut m = model(&["a", "b"], 2);
        m.set_unigram(0, 0, 0.1);
        m.set_unigram(1, 1, 0.9);
        let (labels, score) = viterbi(&m, &[fv(&[("a", 1.0), ("b", 1.0)])]).unwrap();
        assert_eq!(labels, ["L1"]);
        assert_eq!(score, 0.9);
    }

    #[test]
    fn label_and_feature_invariants() {
        assert!(Model::new(vec![], FeatureIndex::default(), FeatureConfig::minimal(), vec![]).is_err());
        assert!(Model::new(
            vec!["O".into(), "O".into()],
            FeatureIndex::default(),
            FeatureConfig::minimal(),
            vec![]
        )
        .is_err());
        assert!(FeatureIndex::new(vec!["x".into(), "x".into()]).is_err());
        let idx = FeatureIndex::new(vec!["x".into(), "y".into()]).unwrap();
        for (i, name) in idx.names().iter().enumerate() {
            assert_eq!(idx.id(name), Some(i));
            assert_eq!(idx.name(i), Some(name.as_str()));
        }
    }

    #[test]
    fn parameter_layout() {
        let mut m = model(&["a", "b"], 2);
        assert_eq!(m.weights().len(), 2 * 2 + 3 * 2);
        m.set_start(1, 7.0);
        m.set_transition(0, 1, 5.0);
        assert_eq!(m.weights()[4 + 2 * 2 + 1], 7.0);
        assert_eq!(m.weights()[4 + 1], 5.0);
        assert_eq!(m.start(1), 7.0);
    }
}
