//! Recall, precision and interpolated break-even points.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::SparseVector;
use crate::model::Classifier;
use crate::{Error, Result};

/// Decision counts for one category at one threshold.
///
/// `p1`: members accepted, `p2`: members rejected, `n1`: non-members
/// rejected, `n2`: non-members accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Contingency {
    pub p1: usize,
    pub p2: usize,
    pub n1: usize,
    pub n2: usize,
}

impl Contingency {
    pub fn total(&self) -> usize {
        self.p1 + self.p2 + self.n1 + self.n2
    }

    /// `p1 / (p1 + p2)`, or 0 when there are no members.
    pub fn recall(&self) -> f64 {
        if self.p1 + self.p2 == 0 {
            0.0
        } else {
            self.p1 as f64 / (self.p1 + self.p2) as f64
        }
    }

    /// `p1 / (p1 + n2)`, or 1 when nothing is accepted.
    pub fn precision(&self) -> f64 {
        if self.p1 + self.n2 == 0 {
            1.0
        } else {
            self.p1 as f64 / (self.p1 + self.n2) as f64
        }
    }
}

impl std::ops::AddAssign for Contingency {
    fn add_assign(&mut self, o: Contingency) {
        self.p1 += o.p1;
        self.p2 += o.p2;
        self.n1 += o.n1;
        self.n2 += o.n2;
    }
}

/// Counts with decision `score > threshold`.
pub fn contingency(scores: &[(f64, bool)], threshold: f64) -> Contingency {
    let mut c = Contingency::default();
    for &(s, label) in scores {
        match (label, s > threshold) {
            (true, true) => c.p1 += 1,
            (true, false) => c.p2 += 1,
            (false, true) => c.n2 += 1,
            (false, false) => c.n1 += 1,
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PRPoint {
    /// Documents scoring strictly above this value are accepted.
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
    pub counts: Contingency,
}

impl PRPoint {
    fn from_counts(threshold: f64, counts: Contingency) -> Self {
        PRPoint {
            threshold,
            recall: counts.recall(),
            precision: counts.precision(),
            counts,
        }
    }
}

/// Precision/recall at every cut of the descending score ranking.
///
/// Equal scores are never split. The first point accepts nothing and the
/// last accepts everything; interior thresholds lie midway between adjacent
/// distinct scores.
pub fn pr_curve(scores: &[(f64, bool)]) -> Result<Vec<PRPoint>> {
    let positives = scores.iter().filter(|&&(_, l)| l).count();
    if positives == 0 {
        return Err(Error::UndefinedRecall);
    }
    let negatives = scores.len() - positives;
    let mut ranked: Vec<(f64, bool)> = scores.to_vec();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut counts = Contingency {
        p1: 0,
        p2: positives,
        n1: negatives,
        n2: 0,
    };
    let mut curve = vec![PRPoint::from_counts(f64::INFINITY, counts)];
    let mut i = 0;
    while i < ranked.len() {
        let score = ranked[i].0;
        while i < ranked.len() && ranked[i].0.total_cmp(&score) == Ordering::Equal {
            if ranked[i].1 {
                counts.p1 += 1;
                counts.p2 -= 1;
            } else {
                counts.n2 += 1;
                counts.n1 -= 1;
            }
            i += 1;
        }
        let threshold = match ranked.get(i) {
            Some(&(next, _)) => score / 2.0 + next / 2.0,
            None => f64::NEG_INFINITY,
        };
        curve.push(PRPoint::from_counts(threshold, counts));
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakEven {
    pub value: f64,
    /// No crossing of precision and recall exists; `value` is the midpoint
    /// at the closest approach.
    pub approximate: bool,
}

/// Value where interpolated precision equals recall.
pub fn break_even(curve: &[PRPoint]) -> Result<f64> {
    break_even_detail(curve).map(|b| b.value)
}

pub fn break_even_detail(curve: &[PRPoint]) -> Result<BreakEven> {
    if curve.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let gap = |p: &PRPoint| p.precision - p.recall;
    for (i, point) in curve.iter().enumerate() {
        let d = gap(point);
        if d == 0.0 {
            return Ok(BreakEven {
                value: point.precision,
                approximate: false,
            });
        }
        if i == 0 {
            continue;
        }
        let prev = &curve[i - 1];
        let d_prev = gap(prev);
        if (d_prev > 0.0) != (d > 0.0) {
            let t = d_prev / (d_prev - d);
            let recall = prev.recall + t * (point.recall - prev.recall);
            let precision = prev.precision + t * (point.precision - prev.precision);
            return Ok(BreakEven {
                value: 0.5 * (recall + precision),
                approximate: false,
            });
        }
    }
    let closest = curve
        .iter()
        .min_by(|a, b| gap(a).abs().total_cmp(&gap(b).abs()))
        .expect("non-empty");
    Ok(BreakEven {
        value: 0.5 * (closest.precision + closest.recall),
        approximate: true,
    })
}

/// Scores of one category's classifier over a test set.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScores {
    pub category: String,
    pub theta: f64,
    pub scores: Vec<(f64, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryResult {
    /// `None` when the category has no positive test document.
    pub bep: Option<BreakEven>,
    pub positives: usize,
    pub at_theta: Contingency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_category: BTreeMap<String, CategoryResult>,
    /// Unweighted mean over categories with at least one positive.
    pub macro_bep: Option<f64>,
    /// Break-even of the pooled (score, label) pairs of all categories.
    pub micro_bep: Option<BreakEven>,
    pub contingency_at_theta: Contingency,
}

impl EvalReport {
    pub fn skipped(&self) -> Vec<&str> {
        self.per_category
            .iter()
            .filter(|(_, r)| r.bep.is_none())
            .map(|(c, _)| c.as_str())
            .collect()
    }

    pub fn approximate(&self) -> Vec<&str> {
        self.per_category
            .iter()
            .filter(|(_, r)| r.bep.is_some_and(|b| b.approximate))
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// One row per category, `<category> TAB <bep> TAB <p1> <p2> <n1> <n2>`,
    /// then `macro TAB <bep>` and `micro TAB <bep>`. Skipped values are `NA`.
    pub fn to_text(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |b| format!("{b:?}"));
        let mut out = String::new();
        for (cat, r) in &self.per_category {
            let c = r.at_theta;
            out.push_str(&format!(
                "{cat}\t{}\t{} {} {} {}\n",
                fmt(r.bep.map(|b| b.value)),
                c.p1,
                c.p2,
                c.n1,
                c.n2
            ));
        }
        out.push_str(&format!("macro\t{}\n", fmt(self.macro_bep)));
        out.push_str(&format!("micro\t{}\n", fmt(self.micro_bep.map(|b| b.value))));
        out
    }
}

/// Parses the report table into `row name -> bep` (`None` for `NA`).
pub fn parse_report(text: &str) -> Result<BTreeMap<String, Option<f64>>> {
    let mut rows = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(name), Some(bep)) = (cols.next(), cols.next()) else {
            return Err(Error::parse(i + 1, "expected `<name> TAB <bep>`"));
        };
        let bep = match bep {
            "NA" => None,
            v => Some(v.parse::<f64>().map_err(|_| Error::parse(i + 1, "bad bep"))?),
        };
        rows.insert(name.to_string(), bep);
    }
    Ok(rows)
}

pub fn evaluate_scored(categories: &[CategoryScores]) -> Result<EvalReport> {
    let mut per_category = BTreeMap::new();
    let mut total = Contingency::default();
    let mut pooled = Vec::new();
    for cat in categories {
        let at_theta = contingency(&cat.scores, cat.theta);
        total += at_theta;
        let positives = cat.scores.iter().filter(|&&(_, l)| l).count();
        let bep = if positives > 0 {
            Some(break_even_detail(&pr_curve(&cat.scores)?)?)
        } else {
            None
        };
        pooled.extend_from_slice(&cat.scores);
        per_category.insert(
            cat.category.clone(),
            CategoryResult {
                bep,
                positives,
                at_theta,
            },
        );
    }
    let beps: Vec<f64> = per_category
        .values()
        .filter_map(|r| r.bep.map(|b| b.value))
        .collect();
    let macro_bep = if beps.is_empty() {
        None
    } else {
        Some(beps.iter().sum::<f64>() / beps.len() as f64)
    };
    let micro_bep = if pooled.iter().any(|&(_, l)| l) {
        Some(break_even_detail(&pr_curve(&pooled)?)?)
    } else {
        None
    };
    Ok(EvalReport {
        per_category,
        macro_bep,
        micro_bep,
        contingency_at_theta: total,
    })
}

/// Scores every test document with every classifier (one-vs-rest) and
/// evaluates.
pub fn evaluate(classifiers: &[Classifier], test: &[(SparseVector, BTreeSet<String>)]) -> Result<EvalReport> {
    let scored: Vec<CategoryScores> = classifiers
        .iter()
        .map(|c| CategoryScores {
            category: c.category().to_string(),
            theta: c.params().theta,
            scores: test
                .iter()
                .map(|(v, labels)| (c.score(v), labels.contains(c.category())))
                .collect(),
        })
        .collect();
    evaluate_scored(&scored)
}
