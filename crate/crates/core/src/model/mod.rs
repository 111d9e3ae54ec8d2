//! Sparse linear classifiers and their mistake-driven update rules.
//!
//! Weights are materialized lazily: a feature that has never been updated
//! implicitly carries the initial weight, so promotion and demotion only
//! touch the active features of the current document.

mod file;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::corpus::SparseVector;
use crate::{Error, Result};

pub use file::{read_model, write_model, ModelMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    PositiveWinnow,
    BalancedWinnow,
    Perceptron,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::PositiveWinnow,
        Algorithm::BalancedWinnow,
        Algorithm::Perceptron,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Algorithm::PositiveWinnow => "pw",
            Algorithm::BalancedWinnow => "bw",
            Algorithm::Perceptron => "perc",
        }
    }

    pub fn is_winnow(self) -> bool {
        !matches!(self, Algorithm::Perceptron)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pw" => Ok(Algorithm::PositiveWinnow),
            "bw" => Ok(Algorithm::BalancedWinnow),
            "perc" => Ok(Algorithm::Perceptron),
            other => Err(Error::Format(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Threshold and update parameters.
///
/// `alpha` is the promotion factor (Winnow) or additive step (Perceptron);
/// `beta` is the Winnow demotion factor. During training a score inside
/// `[theta_minus, theta_plus]` counts as a mistake; prediction uses `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
}

impl HyperParams {
    pub const DEFAULT_THETA: f64 = 1.0;

    /// α=1.5, β=0.5 for Winnow, α=0.1·θ for the Perceptron, θ=1 and no
    /// threshold range.
    pub fn defaults(algorithm: Algorithm) -> Self {
        Self::with_theta(algorithm, Self::DEFAULT_THETA)
    }

    pub fn with_theta(algorithm: Algorithm, theta: f64) -> Self {
        let (alpha, beta) = match algorithm {
            Algorithm::Perceptron => (0.1 * theta, 0.5),
            _ => (1.5, 0.5),
        };
        HyperParams {
            alpha,
            beta,
            theta,
            theta_minus: theta,
            theta_plus: theta,
        }
    }

    pub fn with_range(mut self, theta_minus: f64, theta_plus: f64) -> Self {
        self.theta_minus = theta_minus;
        self.theta_plus = theta_plus;
        self
    }

    pub fn validate(&self, algorithm: Algorithm) -> Result<()> {
        let all = [self.alpha, self.beta, self.theta, self.theta_minus, self.theta_plus];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if !(self.theta > 0.0) {
            return Err(Error::InvalidParams(format!("theta must be > 0, got {}", self.theta)));
        }
        if !(self.theta_minus <= self.theta && self.theta <= self.theta_plus) {
            return Err(Error::InvalidParams(format!(
                "need theta_minus <= theta <= theta_plus, got {} / {} / {}",
                self.theta_minus, self.theta, self.theta_plus
            )));
        }
        if algorithm.is_winnow() {
            if !(self.alpha > 1.0) {
                return Err(Error::InvalidParams(format!("Winnow needs alpha > 1, got {}", self.alpha)));
            }
            if !(self.beta > 0.0 && self.beta < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "Winnow needs 0 < beta < 1, got {}",
                    self.beta
                )));
            }
        } else if !(self.alpha > 0.0) {
            return Err(Error::InvalidParams(format!("Perceptron needs alpha > 0, got {}", self.alpha)));
        }
        Ok(())
    }

    fn has_range(&self) -> bool {
        self.theta_minus < self.theta_plus
    }
}

/// What training should do with an example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Correct,
    NeedPromote,
    NeedDemote,
}

impl Outcome {
    pub fn is_mistake(self) -> bool {
        self != Outcome::Correct
    }
}

/// Training decision for a raw score.
///
/// With a real range `theta_minus < theta_plus`, every score in the closed
/// interval is a mistake whatever the label. With a degenerate range the rule
/// is the plain single-threshold one: positive is correct iff `score > theta`,
/// negative iff `score <= theta`.
pub fn outcome_for_score(params: &HyperParams, score: f64, label: bool) -> Outcome {
    if label {
        if score > params.theta_plus {
            Outcome::Correct
        } else {
            Outcome::NeedPromote
        }
    } else {
        let mistake = if params.has_range() {
            score >= params.theta_minus
        } else {
            score > params.theta_minus
        };
        if mistake {
            Outcome::NeedDemote
        } else {
            Outcome::Correct
        }
    }
}

/// Logistic function of the raw score.
pub fn probability(score: f64) -> f64 {
    1.0 / (1.0 + (-score).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveWinnowModel {
    weights: HashMap<u32, f64>,
    initial_weight: f64,
}

impl PositiveWinnowModel {
    pub fn initial_weight(&self) -> f64 {
        self.initial_weight
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalancedWinnowModel {
    /// `(w+, w-)` per materialized feature.
    weights: HashMap<u32, (f64, f64)>,
    initial_pos: f64,
    initial_neg: f64,
}

impl BalancedWinnowModel {
    pub fn initial_pos(&self) -> f64 {
        self.initial_pos
    }

    pub fn initial_neg(&self) -> f64 {
        self.initial_neg
    }

    pub fn parts(&self, id: u32) -> Option<(f64, f64)> {
        self.weights.get(&id).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronModel {
    weights: HashMap<u32, f64>,
    initial_weight: f64,
}

impl PerceptronModel {
    pub fn initial_weight(&self) -> f64 {
        self.initial_weight
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Positive(PositiveWinnowModel),
    Balanced(BalancedWinnowModel),
    Perceptron(PerceptronModel),
}

impl Model {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Model::Positive(_) => Algorithm::PositiveWinnow,
            Model::Balanced(_) => Algorithm::BalancedWinnow,
            Model::Perceptron(_) => Algorithm::Perceptron,
        }
    }

    fn materialized(&self) -> usize {
        match self {
            Model::Positive(m) => m.weights.len(),
            Model::Balanced(m) => m.weights.len(),
            Model::Perceptron(m) => m.weights.len(),
        }
    }

    fn ids(&self) -> Box<dyn Iterator<Item = u32> + '_> {
        match self {
            Model::Positive(m) => Box::new(m.weights.keys().copied()),
            Model::Balanced(m) => Box::new(m.weights.keys().copied()),
            Model::Perceptron(m) => Box::new(m.weights.keys().copied()),
        }
    }

    fn is_materialized(&self, id: u32) -> bool {
        match self {
            Model::Positive(m) => m.weights.contains_key(&id),
            Model::Balanced(m) => m.weights.contains_key(&id),
            Model::Perceptron(m) => m.weights.contains_key(&id),
        }
    }

    fn initial_coefficient(&self) -> f64 {
        match self {
            Model::Positive(m) => m.initial_weight,
            Model::Balanced(m) => m.initial_pos - m.initial_neg,
            Model::Perceptron(m) => m.initial_weight,
        }
    }

    fn stored_coefficient(&self, id: u32) -> Option<f64> {
        match self {
            Model::Positive(m) => m.weights.get(&id).copied(),
            Model::Balanced(m) => m.weights.get(&id).map(|&(p, n)| p - n),
            Model::Perceptron(m) => m.weights.get(&id).copied(),
        }
    }
}

/// One category's classifier: a model, its hyperparameters, and the
/// feature filter state.
///
/// Once [`Classifier::apply_filter`] has run, every feature without a stored
/// weight is filtered: it never contributes to a score and updates never
/// re-create it.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    model: Model,
    params: HyperParams,
    category: String,
    num_features: usize,
    pruned: bool,
}

impl Classifier {
    /// Creates a classifier with lazily initialized weights.
    ///
    /// Initial weights are θ/d̄ for Positive Winnow and the Perceptron, and
    /// (2θ/d̄, θ/d̄) for the two parts of Balanced Winnow. With `normalized`
    /// strengths (Positive Winnow only) the initial weight is θ.
    pub fn new(
        algorithm: Algorithm,
        params: HyperParams,
        avg_active: f64,
        normalized: bool,
        num_features: usize,
    ) -> Result<Self> {
        params.validate(algorithm)?;
        if !(avg_active > 0.0 && avg_active.is_finite()) {
            return Err(Error::InvalidAverageActive(avg_active));
        }
        if normalized && algorithm != Algorithm::PositiveWinnow {
            return Err(Error::InvalidParams(
                "normalized strengths are only supported for Positive Winnow".into(),
            ));
        }
        let theta = params.theta;
        let model = match algorithm {
            Algorithm::PositiveWinnow => Model::Positive(PositiveWinnowModel {
                weights: HashMap::new(),
                initial_weight: if normalized { theta } else { theta / avg_active },
            }),
            Algorithm::BalancedWinnow => Model::Balanced(BalancedWinnowModel {
                weights: HashMap::new(),
                initial_pos: 2.0 * theta / avg_active,
                initial_neg: theta / avg_active,
            }),
            Algorithm::Perceptron => Model::Perceptron(PerceptronModel {
                weights: HashMap::new(),
                initial_weight: theta / avg_active,
            }),
        };
        Ok(Classifier {
            model,
            params,
            category: String::new(),
            num_features,
            pruned: false,
        })
    }

    pub(crate) fn from_parts(
        model: Model,
        params: HyperParams,
        category: String,
        num_features: usize,
        pruned: bool,
    ) -> Self {
        Classifier {
            model,
            params,
            category,
            num_features,
            pruned,
        }
    }

    pub fn with_category(mut self, category: impl Into<String>) -> Self {
        self.category = category.into();
        self
    }

    pub fn algorithm(&self) -> Algorithm {
        self.model.algorithm()
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn params(&self) -> &HyperParams {
        &self.params
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    /// Number of features with an explicitly stored weight.
    pub fn materialized(&self) -> usize {
        self.model.materialized()
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    pub fn is_filtered(&self, id: u32) -> bool {
        self.pruned && !self.model.is_materialized(id)
    }

    /// Filtered feature ids within `0..num_features`, ascending.
    pub fn filtered_ids(&self) -> Vec<u32> {
        if !self.pruned {
            return Vec::new();
        }
        (0..self.num_features as u32)
            .filter(|&id| !self.model.is_materialized(id))
            .collect()
    }

    pub fn filtered_count(&self) -> usize {
        if !self.pruned {
            return 0;
        }
        let n = self.num_features;
        n - self.model.ids().filter(|&id| (id as usize) < n).count()
    }

    /// Effective weight of `id`, or `None` when the feature is filtered.
    /// For Balanced Winnow this is `w+ - w-`.
    pub fn coefficient(&self, id: u32) -> Option<f64> {
        match self.model.stored_coefficient(id) {
            Some(w) => Some(w),
            None if self.pruned => None,
            None => Some(self.model.initial_coefficient()),
        }
    }

    pub fn initial_coefficient(&self) -> f64 {
        self.model.initial_coefficient()
    }

    /// Σ strength × effective weight over active, non-filtered features.
    pub fn score(&self, v: &SparseVector) -> f64 {
        v.iter()
            .filter_map(|(id, s)| self.coefficient(id).map(|w| w * s))
            .fold(0.0, |acc, x| acc + x)
    }

    /// Test-time decision: `score > theta`.
    pub fn predict(&self, v: &SparseVector) -> bool {
        self.score(v) > self.params.theta
    }

    pub fn train_outcome(&self, v: &SparseVector, label: bool) -> Outcome {
        outcome_for_score(&self.params, self.score(v), label)
    }

    /// Scores `v`, and promotes or demotes its active features if training
    /// counts it as a mistake.
    pub fn learn(&mut self, v: &SparseVector, label: bool) -> Outcome {
        let outcome = self.train_outcome(v, label);
        match outcome {
            Outcome::Correct => {}
            Outcome::NeedPromote => self.promote(v),
            Outcome::NeedDemote => self.demote(v),
        }
        outcome
    }

    pub fn promote(&mut self, v: &SparseVector) {
        self.update(v, true);
    }

    pub fn demote(&mut self, v: &SparseVector) {
        self.update(v, false);
    }

    fn update(&mut self, v: &SparseVector, up: bool) {
        let HyperParams { alpha, beta, .. } = self.params;
        let pruned = self.pruned;
        match &mut self.model {
            Model::Positive(m) => {
                let factor = if up { alpha } else { beta };
                for id in v.ids() {
                    if let Some(w) = slot(&mut m.weights, id, m.initial_weight, pruned) {
                        *w *= factor;
                    }
                }
            }
            Model::Balanced(m) => {
                let (pos_factor, neg_factor) = if up { (alpha, beta) } else { (beta, alpha) };
                let init = (m.initial_pos, m.initial_neg);
                for id in v.ids() {
                    if let Some((p, n)) = slot(&mut m.weights, id, init, pruned) {
                        *p *= pos_factor;
                        *n *= neg_factor;
                    }
                }
            }
            Model::Perceptron(m) => {
                let step = if up { alpha } else { -alpha };
                for id in v.ids() {
                    if let Some(w) = slot(&mut m.weights, id, m.initial_weight, pruned) {
                        *w += step;
                    }
                }
            }
        }
    }

    /// Closed interval of effective weights reachable from the initial
    /// weight by at most one promotion or demotion.
    pub fn filter_range(&self) -> (f64, f64) {
        let HyperParams { alpha, beta, .. } = self.params;
        match &self.model {
            Model::Positive(m) => (beta * m.initial_weight, alpha * m.initial_weight),
            Model::Balanced(m) => (
                m.initial_pos * beta - m.initial_neg * alpha,
                m.initial_pos * alpha - m.initial_neg * beta,
            ),
            Model::Perceptron(m) => (m.initial_weight - alpha, m.initial_weight + alpha),
        }
    }

    /// Discards every feature whose effective weight lies inside
    /// [`filter_range`](Self::filter_range). Features that were never updated
    /// sit at the initial weight and are discarded too. Returns the total
    /// number of filtered features.
    pub fn apply_filter(&mut self) -> usize {
        let (lo, hi) = self.filter_range();
        let inside = |w: f64| lo <= w && w <= hi;
        match &mut self.model {
            Model::Positive(m) => m.weights.retain(|_, w| !inside(*w)),
            Model::Balanced(m) => m.weights.retain(|_, (p, n)| !inside(*p - *n)),
            Model::Perceptron(m) => m.weights.retain(|_, w| !inside(*w)),
        }
        self.pruned = true;
        self.filtered_count()
    }
}

fn slot<T: Copy>(weights: &mut HashMap<u32, T>, id: u32, init: T, pruned: bool) -> Option<&mut T> {
    if pruned {
        weights.get_mut(&id)
    } else {
        Some(weights.entry(id).or_insert(init))
    }
}
