//! Multi-epoch mistake-driven training with optional one-shot feature
//! filtering.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{SparseVector, StrengthMode};
use crate::model::{Algorithm, Classifier, HyperParams};
use crate::{Error, Result};

pub const DEFAULT_MAX_EPOCHS: usize = 50;

/// When to discard features whose weights stayed near their initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterPolicy {
    pub enabled: bool,
    /// Filter after the first epoch whose mistakes are at most this fraction
    /// of the training examples.
    pub trigger_mistake_fraction: f64,
    /// Filter after this epoch at the latest.
    pub trigger_max_epochs: usize,
}

impl FilterPolicy {
    pub fn disabled() -> Self {
        FilterPolicy {
            enabled: false,
            ..FilterPolicy::enabled()
        }
    }

    pub fn enabled() -> Self {
        FilterPolicy {
            enabled: true,
            trigger_mistake_fraction: 0.02,
            trigger_max_epochs: 10,
        }
    }
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy::disabled()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub hyper: HyperParams,
    pub max_epochs: usize,
    pub strength_mode: StrengthMode,
    /// Length-normalized strengths; Positive Winnow only.
    pub normalize: bool,
    pub filter: FilterPolicy,
    /// Shuffle the examples once before the first epoch.
    pub shuffle_seed: Option<u64>,
}

impl TrainConfig {
    /// The basic algorithm: binary strengths, single threshold, no filtering.
    pub fn basic(algorithm: Algorithm) -> Self {
        TrainConfig {
            algorithm,
            hyper: HyperParams::defaults(algorithm),
            max_epochs: DEFAULT_MAX_EPOCHS,
            strength_mode: StrengthMode::Binary,
            normalize: false,
            filter: FilterPolicy::disabled(),
            shuffle_seed: None,
        }
    }

    /// Balanced Winnow with threshold range [0.9, 1.1], square-root
    /// strengths and feature filtering.
    pub fn balanced_plus() -> Self {
        let mut cfg = TrainConfig::basic(Algorithm::BalancedWinnow);
        cfg.hyper = cfg.hyper.with_range(0.9, 1.1);
        cfg.strength_mode = StrengthMode::Sqrt;
        cfg.filter = FilterPolicy::enabled();
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.hyper.validate(self.algorithm)?;
        if self.max_epochs == 0 {
            return Err(Error::InvalidParams("max_epochs must be at least 1".into()));
        }
        if self.normalize && self.algorithm != Algorithm::PositiveWinnow {
            return Err(Error::InvalidParams(
                "normalization applies to Positive Winnow only".into(),
            ));
        }
        if self.filter.enabled {
            let f = self.filter.trigger_mistake_fraction;
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "filter trigger fraction must be in (0, 1], got {f}"
                )));
            }
            if self.filter.trigger_max_epochs == 0 {
                return Err(Error::InvalidParams("filter trigger epoch must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// A fresh classifier for this configuration.
    pub fn classifier(&self, avg_active: f64, num_features: usize) -> Result<Classifier> {
        Classifier::new(self.algorithm, self.hyper, avg_active, self.normalize, num_features)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub mistakes_per_epoch: Vec<usize>,
    /// Filtered feature count at the end of each epoch.
    pub filtered_per_epoch: Vec<usize>,
    pub filtered_count: usize,
    /// The last epoch made no mistakes.
    pub converged: bool,
}

impl TrainReport {
    pub fn total_mistakes(&self) -> usize {
        self.mistakes_per_epoch.iter().sum()
    }

    /// `epoch=<i> mistakes=<m> filtered=<k>` lines, one per epoch.
    pub fn log_lines(&self) -> Vec<String> {
        self.mistakes_per_epoch
            .iter()
            .zip(&self.filtered_per_epoch)
            .enumerate()
            .map(|(i, (m, k))| format!("epoch={} mistakes={m} filtered={k}", i + 1))
            .collect()
    }
}

/// One pass over `examples` in order. Returns the number of promotions plus
/// demotions.
pub fn train_epoch<'a, I>(c: &mut Classifier, examples: I) -> usize
where
    I: IntoIterator<Item = (&'a SparseVector, bool)>,
{
    examples
        .into_iter()
        .filter(|&(v, label)| c.learn(v, label).is_mistake())
        .count()
}

/// Repeats [`train_epoch`] until an epoch makes no mistakes or `max_epochs`
/// is reached.
///
/// With filtering enabled, features are filtered exactly once: after the
/// first epoch whose mistake count is at most
/// `trigger_mistake_fraction × examples`, or after epoch
/// `min(trigger_max_epochs, max_epochs)`. An epoch that triggers filtering
/// never ends training by itself; training continues on the pruned model.
pub fn train(c: &mut Classifier, examples: &[(SparseVector, bool)], cfg: &TrainConfig) -> Result<TrainReport> {
    if examples.is_empty() {
        return Err(Error::EmptyExamples);
    }
    if cfg.max_epochs == 0 {
        return Err(Error::InvalidParams("max_epochs must be at least 1".into()));
    }
    let mut order: Vec<usize> = (0..examples.len()).collect();
    if let Some(seed) = cfg.shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let filter_deadline = cfg.filter.trigger_max_epochs.min(cfg.max_epochs);
    let filter_budget = cfg.filter.trigger_mistake_fraction * examples.len() as f64;
    let mut filtered_done = false;
    let mut report = TrainReport::default();
    for epoch in 1..=cfg.max_epochs {
        let mistakes = train_epoch(c, order.iter().map(|&i| (&examples[i].0, examples[i].1)));
        report.mistakes_per_epoch.push(mistakes);
        report.epochs_run = epoch;

        let mut filtered_now = false;
        if cfg.filter.enabled
            && !filtered_done
            && (mistakes as f64 <= filter_budget || epoch >= filter_deadline)
        {
            report.filtered_count = c.apply_filter();
            filtered_done = true;
            filtered_now = true;
        }
        report.filtered_per_epoch.push(report.filtered_count);
        if mistakes == 0 && !filtered_now {
            break;
        }
    }
    report.converged = report.mistakes_per_epoch.last() == Some(&0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Outcome;

    fn bv(ids: &[u32]) -> SparseVector {
        SparseVector::binary(ids.iter().copied())
    }

    #[test]
    fn zero_mistake_epoch_leaves_state_unchanged() {
        let cfg = TrainConfig::basic(Algorithm::BalancedWinnow);
        let mut c = cfg.classifier(2.0, 4).unwrap();
        let pos = bv(&[0, 1]);
        let neg = bv(&[2, 3]);
        let examples = vec![(pos.clone(), true), (neg.clone(), false)];
        train(&mut c, &examples, &cfg).unwrap();
        let before = c.clone();
        let m = train_epoch(&mut c, examples.iter().map(|(v, l)| (v, *l)));
        assert_eq!(m, 0);
        assert_eq!(before, c);
    }

    #[test]
    fn single_positive_below_threshold() {
        let cfg = TrainConfig::basic(Algorithm::PositiveWinnow);
        let mut c = cfg.classifier(4.0, 4).unwrap();
        let v = bv(&[0, 1]);
        assert_eq!(c.train_outcome(&v, true), Outcome::NeedPromote);
        let m = train_epoch(&mut c, [(&v, true)]);
        assert_eq!(m, 1);
        assert_eq!(c.coefficient(0), Some(0.25 * 1.5));
        assert_eq!(c.coefficient(2), Some(0.25));
    }

    #[test]
    fn epoch_cap() {
        let mut cfg = TrainConfig::basic(Algorithm::Perceptron);
        cfg.max_epochs = 1;
        let mut c = cfg.classifier(1.0, 3).unwrap();
        // same vector with both labels can never be fit
        let examples = vec![(bv(&[0]), true), (bv(&[0]), false)];
        let r = train(&mut c, &examples, &cfg).unwrap();
        assert_eq!(r.epochs_run, 1);
        assert!(!r.converged);
    }

    #[test]
    fn empty_examples_error() {
        let cfg = TrainConfig::basic(Algorithm::Perceptron);
        let mut c = cfg.classifier(1.0, 3).unwrap();
        assert!(matches!(train(&mut c, &[], &cfg), Err(Error::EmptyExamples)));
    }

    #[test]
    fn filtering_happens_once_and_training_continues() {
        let mut cfg = TrainConfig::basic(Algorithm::BalancedWinnow);
        cfg.filter = FilterPolicy::enabled();
        let mut c = cfg.classifier(2.0, 10).unwrap();
        let examples = vec![
            (bv(&[0, 5]), true),
            (bv(&[1, 6]), false),
            (bv(&[0, 7]), true),
            (bv(&[2, 6]), false),
        ];
        let r = train(&mut c, &examples, &cfg).unwrap();
        assert!(c.is_pruned());
        assert!(r.filtered_count > 0);
        let first = r.filtered_per_epoch.iter().position(|&k| k > 0).unwrap();
        assert!(r.filtered_per_epoch[first..].iter().all(|&k| k == r.filtered_count));
        assert!(r.epochs_run > first + 1, "training must continue after filtering");
        assert_eq!(r.log_lines().len(), r.epochs_run);
    }

    #[test]
    fn filter_deadline_respects_max_epochs() {
        let mut cfg = TrainConfig::basic(Algorithm::Perceptron);
        cfg.filter = FilterPolicy::enabled();
        cfg.max_epochs = 2;
        let mut c = cfg.classifier(1.0, 3).unwrap();
        let examples = vec![(bv(&[0]), true), (bv(&[0]), false)];
        let r = train(&mut c, &examples, &cfg).unwrap();
        assert_eq!(r.epochs_run, 2);
        assert!(c.is_pruned());
    }

    #[test]
    fn shuffle_is_deterministic() {
        let mut cfg = TrainConfig::basic(Algorithm::PositiveWinnow);
        cfg.shuffle_seed = Some(7);
        let examples: Vec<_> = (0..40u32)
            .map(|i| (bv(&[i % 7, 7 + i % 5, 12 + i % 3]), i % 7 < 2))
            .collect();
        let run = || {
            let mut c = cfg.classifier(3.0, 15).unwrap();
            let r = train(&mut c, &examples, &cfg).unwrap();
            (c, r)
        };
        let (c1, r1) = run();
        let (c2, r2) = run();
        assert_eq!(c1, c2);
        assert_eq!(r1, r2);
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig::basic(Algorithm::BalancedWinnow);
        cfg.normalize = true;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainConfig::basic(Algorithm::PositiveWinnow);
        cfg.max_epochs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainConfig::balanced_plus();
        assert!(cfg.validate().is_ok());
        cfg.filter.trigger_mistake_fraction = 0.0;
        assert!(cfg.validate().is_err());
    }
}
