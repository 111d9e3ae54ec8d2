//! Synthetic targets and corpora for checking mistake bounds and the effect
//! of each training extension at desk scale.

mod text;

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::SparseVector;
use crate::model::{Algorithm, Classifier, HyperParams};
use crate::{Error, Result};

pub use text::{
    ablation_benchmark, filtering_benchmark, generate_text_corpus, length_variation_benchmark,
    token_for_rank, FilterBenchmark, TextCorpus, TextCorpusSpec, VariantResult,
};

/// Boolean function over the relevant features of an example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// At least one relevant feature active.
    Disjunction,
    /// All relevant features active.
    Conjunction,
    /// At least `r` relevant features active.
    RofK { r: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthTarget {
    pub kind: TargetKind,
    pub relevant: Vec<u32>,
    /// Total number of features; every id is in `0..n`.
    pub n: u32,
    /// `(example index, new relevant set)`; the replacement applies from that
    /// index on. Must be sorted by index.
    pub drift: Vec<(usize, Vec<u32>)>,
}

impl SynthTarget {
    pub fn new(kind: TargetKind, relevant: Vec<u32>, n: u32) -> Result<Self> {
        let t = SynthTarget {
            kind,
            relevant,
            n,
            drift: Vec::new(),
        };
        t.validate()?;
        Ok(t)
    }

    /// Target over `k` relevant features drawn at random from `0..n`.
    pub fn random(kind: TargetKind, k: usize, n: u32, seed: u64) -> Result<Self> {
        if k > n as usize {
            return Err(Error::InvalidParams(format!("k={k} exceeds n={n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let relevant = rand::seq::index::sample(&mut rng, n as usize, k)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        Self::new(kind, relevant, n)
    }

    pub fn with_drift(mut self, at: usize, relevant: Vec<u32>) -> Result<Self> {
        self.drift.push((at, relevant));
        self.validate()?;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.relevant.len()
    }

    fn validate(&self) -> Result<()> {
        let sets = std::iter::once(&self.relevant).chain(self.drift.iter().map(|(_, r)| r));
        for set in sets {
            if set.iter().any(|&f| f >= self.n) {
                return Err(Error::InvalidParams("relevant feature outside 0..n".into()));
            }
            if set.iter().collect::<HashSet<_>>().len() != set.len() {
                return Err(Error::InvalidParams("duplicate relevant feature".into()));
            }
            if set.is_empty() {
                return Err(Error::InvalidParams("relevant set must not be empty".into()));
            }
            if let TargetKind::RofK { r } = self.kind {
                if r == 0 || r > set.len() {
                    return Err(Error::InvalidParams(format!("need 1 <= r <= k, got r={r}")));
                }
            }
        }
        if !self.drift.windows(2).all(|w| w[0].0 <= w[1].0) {
            return Err(Error::InvalidParams("drift schedule must be sorted".into()));
        }
        Ok(())
    }

    /// Relevant set in force for example `index`.
    pub fn relevant_at(&self, index: usize) -> &[u32] {
        self.drift
            .iter()
            .rev()
            .find(|(at, _)| *at <= index)
            .map_or(&self.relevant, |(_, r)| r)
    }

    /// Target value for the active set of `v` given a relevant set.
    pub fn label(&self, relevant: &[u32], v: &SparseVector) -> bool {
        let hits = relevant.iter().filter(|&&f| v.contains(f)).count();
        match self.kind {
            TargetKind::Disjunction => hits >= 1,
            TargetKind::Conjunction => hits == relevant.len(),
            TargetKind::RofK { r } => hits >= r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthCorpusSpec {
    pub n_docs: usize,
    /// Inclusive range of active features per example, drawn uniformly.
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a label is flipped.
    pub noise_rate: f64,
    pub seed: u64,
}

impl SynthCorpusSpec {
    pub fn new(n_docs: usize, min_len: usize, max_len: usize, seed: u64) -> Self {
        SynthCorpusSpec {
            n_docs,
            min_len,
            max_len,
            noise_rate: 0.0,
            seed,
        }
    }

    fn validate(&self, target: &SynthTarget) -> Result<()> {
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::InvalidParams("need 1 <= min_len <= max_len".into()));
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return Err(Error::InvalidParams("noise_rate must be in [0, 1)".into()));
        }
        let widest = std::iter::once(&target.relevant)
            .chain(target.drift.iter().map(|(_, r)| r))
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        if self.max_len + widest > target.n as usize {
            return Err(Error::InvalidParams("documents longer than the feature space allows".into()));
        }
        Ok(())
    }
}

/// Boolean examples for `target`.
///
/// Each example includes a uniformly chosen number `j ∈ 0..=k` of the
/// currently relevant features and is padded with irrelevant features drawn
/// uniformly from the rest of `0..n` up to a length drawn from
/// `[min_len, max_len]`. The output is a pure function of the inputs.
pub fn gen_examples(target: &SynthTarget, spec: &SynthCorpusSpec) -> Result<Vec<(SparseVector, bool)>> {
    spec.validate(target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.n_docs);
    for i in 0..spec.n_docs {
        let relevant = target.relevant_at(i);
        let relevant_set: HashSet<u32> = relevant.iter().copied().collect();
        let j = rng.random_range(0..=relevant.len());
        let len = rng.random_range(spec.min_len..=spec.max_len).max(j);
        let mut active: HashSet<u32> = relevant.choose_multiple(&mut rng, j).copied().collect();
        while active.len() < len {
            let f = rng.random_range(0..target.n);
            if !relevant_set.contains(&f) {
                active.insert(f);
            }
        }
        let v = SparseVector::binary(active);
        let mut label = target.label(relevant, &v);
        if spec.noise_rate > 0.0 && rng.random_bool(spec.noise_rate) {
            label = !label;
        }
        out.push((v, label));
    }
    Ok(out)
}

/// Mistake flag per example of a single online pass (no epochs, the
/// classifier is updated as it goes).
pub fn online_pass(c: &mut Classifier, examples: &[(SparseVector, bool)]) -> Vec<bool> {
    examples
        .iter()
        .map(|(v, label)| c.learn(v, *label).is_mistake())
        .collect()
}

/// Classifier used by the mistake-bound harness.
///
/// Bounds over `{0,1}^n` are stated for an initial weight scaled to the
/// dimension, so the initial-weight denominator is `n` here rather than the
/// average document length used for text.
pub fn bound_classifier(algorithm: Algorithm, n: u32) -> Result<Classifier> {
    Classifier::new(algorithm, HyperParams::defaults(algorithm), f64::from(n), false, n as usize)
}

/// Total online mistakes of `algorithm` on one pass over the examples
/// generated for `target`, with a single threshold.
pub fn mistake_bound_run(algorithm: Algorithm, target: &SynthTarget, spec: &SynthCorpusSpec) -> Result<usize> {
    let examples = gen_examples(target, spec)?;
    let mut c = bound_classifier(algorithm, target.n)?;
    Ok(online_pass(&mut c, &examples).into_iter().filter(|&m| m).count())
}

/// Index just past the first window of `window` consecutive mistake-free
/// examples, if any.
pub fn first_clean_run(mistakes: &[bool], window: usize) -> Option<usize> {
    let mut run = 0;
    for (i, &m) in mistakes.iter().enumerate() {
        run = if m { 0 } else { run + 1 };
        if run >= window {
            return Some(i + 1);
        }
    }
    None
}
