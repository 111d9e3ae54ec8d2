//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use winnowtc::corpus::SparseVector;
use winnowtc::model::{Algorithm, Classifier, HyperParams, Model};

/// Naive dense learner: stores all n weights and walks the whole vector on
/// every prediction and update.
#[derive(Debug, Clone)]
pub struct DenseReference {
    pub algorithm: Algorithm,
    pub params: HyperParams,
    pub pos: Vec<f64>,
    /// Balanced Winnow negative part; unused otherwise.
    pub neg: Vec<f64>,
}

impl DenseReference {
    pub fn new(algorithm: Algorithm, params: HyperParams, avg_active: f64, n: usize) -> Self {
        let t = params.theta;
        let (pos, neg) = match algorithm {
            Algorithm::PositiveWinnow | Algorithm::Perceptron => (t / avg_active, 0.0),
            Algorithm::BalancedWinnow => (2.0 * t / avg_active, t / avg_active),
        };
        DenseReference {
            algorithm,
            params,
            pos: vec![pos; n],
            neg: vec![neg; n],
        }
    }

    pub fn coefficient(&self, i: usize) -> f64 {
        match self.algorithm {
            Algorithm::BalancedWinnow => self.pos[i] - self.neg[i],
            _ => self.pos[i],
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..x.len() {
            if x[i] != 0.0 {
                s += x[i] * self.coefficient(i);
            }
        }
        s
    }

    /// One trial; returns whether a mistake was made.
    pub fn trial(&mut self, x: &[f64], label: bool) -> bool {
        let s = self.score(x);
        let p = self.params;
        let ranged = p.theta_minus < p.theta_plus;
        let promote = label && !(s > p.theta_plus);
        let demote = !label && if ranged { s >= p.theta_minus } else { s > p.theta };
        if !(promote || demote) {
            return false;
        }
        for i in 0..x.len() {
            if x[i] == 0.0 {
                continue;
            }
            match (self.algorithm, promote) {
                (Algorithm::PositiveWinnow, true) => self.pos[i] *= p.alpha,
                (Algorithm::PositiveWinnow, false) => self.pos[i] *= p.beta,
                (Algorithm::Perceptron, true) => self.pos[i] += p.alpha,
                (Algorithm::Perceptron, false) => self.pos[i] -= p.alpha,
                (Algorithm::BalancedWinnow, true) => {
                    self.pos[i] *= p.alpha;
                    self.neg[i] *= p.beta;
                }
                (Algorithm::BalancedWinnow, false) => {
                    self.pos[i] *= p.beta;
                    self.neg[i] *= p.alpha;
                }
            }
        }
        true
    }
}

pub fn dense(v: &SparseVector, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (id, s) in v.iter() {
        x[id as usize] = s;
    }
    x
}

/// Per-feature `(w+, w-)` of a sparse classifier, materialized or not;
/// `w-` is zero for single-weight models.
pub fn sparse_parts(c: &Classifier, id: u32) -> (f64, f64) {
    match c.model() {
        Model::Balanced(m) => m.parts(id).unwrap_or((m.initial_pos(), m.initial_neg())),
        _ => (c.coefficient(id).expect("not filtered"), 0.0),
    }
}

/// Largest absolute difference between sparse and dense weights.
pub fn max_weight_gap(c: &Classifier, d: &DenseReference) -> f64 {
    (0..d.pos.len())
        .map(|i| {
            let (p, n) = sparse_parts(c, i as u32);
            let dn = if d.algorithm == Algorithm::BalancedWinnow { d.neg[i] } else { 0.0 };
            (p - d.pos[i]).abs().max((n - dn).abs())
        })
        .fold(0.0, f64::max)
}

/// `(recall, precision)` at every cut, found by sweeping each distinct score
/// as an inclusive acceptance level and counting directly.
pub fn brute_force_curve(scores: &[(f64, bool)]) -> Vec<(f64, f64)> {
    let mut levels: Vec<f64> = scores.iter().map(|s| s.0).collect();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup();
    let count = |accept: &dyn Fn(f64) -> bool| {
        let (mut p1, mut p2, mut n2) = (0usize, 0usize, 0usize);
        for &(s, l) in scores {
            match (l, accept(s)) {
                (true, true) => p1 += 1,
                (true, false) => p2 += 1,
                (false, true) => n2 += 1,
                _ => {}
            }
        }
        let r = if p1 + p2 == 0 { 0.0 } else { p1 as f64 / (p1 + p2) as f64 };
        let p = if p1 + n2 == 0 { 1.0 } else { p1 as f64 / (p1 + n2) as f64 };
        (r, p)
    };
    let mut out = vec![count(&|_| false)];
    for level in levels {
        out.push(count(&|s| s >= level));
    }
    out
}

/// Break-even by linear interpolation at the first sign change of
/// precision − recall; midpoint at the closest point when none exists.
pub fn brute_force_bep(curve: &[(f64, f64)]) -> f64 {
    for i in 0..curve.len() {
        let (r, p) = curve[i];
        if p == r {
            return p;
        }
        if i > 0 {
            let (r0, p0) = curve[i - 1];
            if (p0 - r0 > 0.0) != (p - r > 0.0) {
                let t = (p0 - r0) / ((p0 - r0) - (p - r));
                return r0 + t * (r - r0);
            }
        }
    }
    let (r, p) = curve
        .iter()
        .copied()
        .min_by(|a, b| (a.1 - a.0).abs().partial_cmp(&(b.1 - b.0).abs()).unwrap())
        .unwrap();
    (r + p) / 2.0
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
