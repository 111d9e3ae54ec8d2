//! One-vs-rest training and evaluation over raw documents.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::corpus::{normalize, RawDocument, SparseVector, Vocabulary};
use crate::eval::{evaluate, EvalReport};
use crate::model::{Classifier, ModelMeta};
use crate::training::{train, TrainConfig, TrainReport};
use crate::Result;

pub type LabeledVector = (SparseVector, BTreeSet<String>);

#[derive(Debug, Clone)]
pub struct TrainedCategory {
    pub classifier: Classifier,
    pub report: TrainReport,
}

/// A frozen vocabulary plus the training configuration that decides how
/// documents are vectorized.
#[derive(Debug, Clone)]
pub struct Pipeline {
    vocab: Vocabulary,
    config: TrainConfig,
}

impl Pipeline {
    pub fn new(vocab: Vocabulary, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        Ok(Pipeline { vocab, config })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn meta(&self) -> ModelMeta {
        ModelMeta {
            strength: self.config.strength_mode,
            normalize: self.config.normalize,
            vocab_hash: self.vocab.hash(),
        }
    }

    pub fn vectorize(&self, text: &str) -> SparseVector {
        vectorize_with(&self.vocab, &self.meta(), text)
    }

    pub fn vectorize_docs(&self, docs: &[RawDocument]) -> Vec<LabeledVector> {
        let meta = self.meta();
        docs.par_iter()
            .map(|d| (vectorize_with(&self.vocab, &meta, &d.text), d.labels.clone()))
            .collect()
    }

    /// Trains one classifier per category appearing in `docs`, in category
    /// name order. Categories train in parallel; results do not depend on
    /// scheduling.
    pub fn train(&self, docs: &[RawDocument]) -> Result<Vec<TrainedCategory>> {
        let examples = self.vectorize_docs(docs);
        let categories = categories(docs);
        train_one_vs_rest(&self.config, self.vocab.avg_active(), self.vocab.len(), &examples, &categories)
    }

    pub fn evaluate(&self, classifiers: &[Classifier], docs: &[RawDocument]) -> Result<EvalReport> {
        evaluate(classifiers, &self.vectorize_docs(docs))
    }
}

/// Vectorizes text the way a model with `meta` expects.
pub fn vectorize_with(vocab: &Vocabulary, meta: &ModelMeta, text: &str) -> SparseVector {
    let v = vocab.vectorize_text(text, meta.strength);
    if meta.normalize {
        normalize(&v)
    } else {
        v
    }
}

pub fn categories(docs: &[RawDocument]) -> BTreeSet<String> {
    docs.iter().flat_map(|d| d.labels.iter().cloned()).collect()
}

pub fn train_one_vs_rest(
    config: &TrainConfig,
    avg_active: f64,
    num_features: usize,
    examples: &[LabeledVector],
    categories: &BTreeSet<String>,
) -> Result<Vec<TrainedCategory>> {
    config.validate()?;
    let cats: Vec<&String> = categories.iter().collect();
    cats.par_iter()
        .map(|&cat| {
            let binary: Vec<(SparseVector, bool)> = examples
                .iter()
                .map(|(v, labels)| (v.clone(), labels.contains(cat)))
                .collect();
            let mut classifier = config
                .classifier(avg_active, num_features)?
                .with_category(cat.clone());
            let report = train(&mut classifier, &binary, config)?;
            Ok(TrainedCategory { classifier, report })
        })
        .collect()
}
