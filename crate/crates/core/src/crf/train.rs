use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::corpus::{validate_bio, Corpus};
use crate::error::{Error, Result};
use crate::features::{sentence_features, FeatureConfig};
use crate::gazetteer::Gazetteer;

use super::lbfgs::{Lbfgs, StopReason};
use super::objective::{accumulate, add_penalty, Instance};
use super::{num_params, FeatureIndex, Model, TrainMetadata};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub l2_sigma: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// L-BFGS memory.
    pub history: usize,
    /// Features seen fewer times than this in training are dropped.
    pub feature_cutoff: usize,
    /// Gradient workers. Results are bit-identical for a fixed count.
    pub threads: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            l2_sigma: 1.0,
            max_iter: 200,
            tol: 1e-5,
            history: 10,
            feature_cutoff: 1,
            threads: 1,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_sigma > 0.0 && self.l2_sigma.is_finite()) {
            return Err(Error::Config(format!("l2_sigma must be positive, got {}", self.l2_sigma)));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Config(format!("tol must be non-negative, got {}", self.tol)));
        }
        if self.history == 0 {
            return Err(Error::Config("history must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub iterations: usize,
    pub final_objective: f64,
    /// Penalized objective at the zero start point and after every accepted step.
    pub objective_trace: Vec<f64>,
    pub stop: StopReason,
    pub num_features: usize,
    pub num_instances: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Trainer {
    params: TrainParams,
}

fn config_hash(cfg: &FeatureConfig, params: &TrainParams, gazetteers: &[Gazetteer]) -> u64 {
    let mut h = Sha256::new();
    h.update(cfg.to_kv_string().as_bytes());
    h.update(format!("{params:?}").as_bytes());
    for g in gazetteers {
        h.update(format!("{}:{}:{}\n", g.name(), g.fold_case(), g.len()).as_bytes());
        for entry in g.entries() {
            h.update(entry.join(" ").as_bytes());
            h.update(b"\n");
        }
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

impl Trainer {
    pub fn new(params: TrainParams) -> Self {
        Trainer { params }
    }

    pub fn params(&self) -> &TrainParams {
        &self.params
    }

    /// Penalized objective over `instances`, reduced over a fixed partition of the data.
    fn objective(
        &self,
        weights: &[f64],
        num_labels: usize,
        instances: &[Instance],
        grad: &mut [f64],
    ) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let threads = self.params.threads.min(instances.len()).max(1);
        let mut value = 0.0;
        if threads == 1 {
            for inst in instances {
                value += accumulate(weights, num_labels, inst, grad);
            }
        } else {
            let chunk = instances.len().div_ceil(threads);
            let partials: Vec<(f64, Vec<f64>)> = std::thread::scope(|scope| {
                let handles: Vec<_> = instances
                    .chunks(chunk)
                    .map(|part| {
                        scope.spawn(move || {
                            let mut g = vec![0.0; weights.len()];
                            let v = part
                                .iter()
                                .map(|inst| accumulate(weights, num_labels, inst, &mut g))
                                .sum::<f64>();
                            (v, g)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("gradient worker panicked"))
                    .collect()
            });
            for (v, g) in partials {
                value += v;
                for (acc, x) in grad.iter_mut().zip(&g) {
                    *acc += x;
                }
            }
        }
        value + add_penalty(weights, self.params.l2_sigma, grad)
    }

    pub fn train(
        &self,
        corpus: &Corpus,
        cfg: &FeatureConfig,
        gazetteers: &[Gazetteer],
    ) -> Result<(Model, TrainReport)> {
        self.params.validate()?;
        cfg.validate()?;
        if corpus.is_empty() {
            return Err(Error::InvalidInput("training corpus is empty".into()));
        }
        if !corpus.is_labeled() {
            return Err(Error::InvalidInput("training corpus must be labeled".into()));
        }
        let check = validate_bio(corpus, false)?;
        if let Some(v) = check.violations.first() {
            return Err(Error::InvalidInput(format!(
                "{} BIO violation(s), first {} at sentence {} token {}; repair the corpus with BIO validation first",
                check.violations.len(),
                v.label,
                v.sentence,
                v.position
            )));
        }
        for name in &cfg.gazetteers {
            if !gazetteers.iter().any(|g| g.name() == name) {
                return Err(Error::Config(format!("no gazetteer supplied for slot {name:?}")));
            }
        }
        let gazetteers: Vec<Gazetteer> = gazetteers
            .iter()
            .filter(|g| cfg.gazetteers.iter().any(|n| n == g.name()))
            .cloned()
            .collect();

        let labels: Vec<String> = corpus.labels().iter().cloned().collect();
        let label_id: BTreeMap<&str, usize> = corpus
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();

        let extracted: Vec<_> = corpus
            .sentences()
            .iter()
            .map(|s| sentence_features(s, cfg, &gazetteers))
            .collect();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for id in extracted.iter().flatten().flat_map(|v| v.ids()) {
            *counts.entry(id).or_insert(0) += 1;
        }
        let names: Vec<String> = counts
            .into_iter()
            .filter(|&(_, c)| c >= self.params.feature_cutoff)
            .map(|(id, _)| id.to_string())
            .collect();

        let mut model = Model::new(labels, FeatureIndex::new(names)?, cfg.clone(), gazetteers)?;
        model.set_l2_sigma(self.params.l2_sigma)?;

        let instances: Vec<Instance> = corpus
            .sentences()
            .iter()
            .zip(&extracted)
            .map(|(s, vectors)| Instance {
                features: model.index_vectors(vectors),
                gold: s
                    .labels()
                    .expect("labeled corpus")
                    .into_iter()
                    .map(|l| label_id[l])
                    .collect(),
            })
            .collect();

        let num_labels = model.num_labels();
        let optimizer = Lbfgs {
            history: self.params.history,
            max_iter: self.params.max_iter,
            tol: self.params.tol,
            ..Lbfgs::default()
        };
        let x0 = vec![0.0; num_params(model.features().len(), num_labels)];
        let outcome = optimizer.minimize(
            |w, g| self.objective(w, num_labels, &instances, g),
            x0,
        );
        if !outcome.value.is_finite() || outcome.x.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("training diverged to a non-finite objective".into()));
        }

        model.weights_mut().copy_from_slice(&outcome.x);
        model.set_metadata(TrainMetadata {
            iterations: outcome.iterations as u32,
            final_objective: outcome.value,
            config_hash: config_hash(cfg, &self.params, model.gazetteers()),
        });
        let report = TrainReport {
            iterations: outcome.iterations,
            final_objective: outcome.value,
            objective_trace: outcome.trace,
            stop: outcome.stop,
            num_features: model.features().len(),
            num_instances: instances.len(),
        };
        Ok((model, report))
    }
}

/// Trains a model from zero weights with L-BFGS.
pub fn train(
    corpus: &Corpus,
    cfg: &FeatureConfig,
    gazetteers: &[Gazetteer],
    params: &TrainParams,
) -> Result<Model> {
    Ok(train_with_report(corpus, cfg, gazetteers, params)?.0)
}

pub fn train_with_report(
    corpus: &Corpus,
    cfg: &FeatureConfig,
    gazetteers: &[Gazetteer],
    params: &TrainParams,
) -> Result<(Model, TrainReport)> {
    Trainer::new(params.clone()).train(corpus, cfg, gazetteers)
}
