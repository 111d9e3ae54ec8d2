//! Line-oriented model file.
//!
//! ```text
//! winnowtc-model v1 variant=bw theta=1.0 alpha=1.5 beta=0.5 init=0.2 init_neg=0.1 ... category=<name>
//! <feature-id> TAB <w+> TAB <w->
//! filtered: <comma-separated ids>
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so a save/load
//! cycle reproduces every weight bit for bit.

use std::collections::{BTreeSet, HashMap};

use super::{
    Algorithm, BalancedWinnowModel, Classifier, HyperParams, Model, PerceptronModel,
    PositiveWinnowModel,
};
use crate::corpus::StrengthMode;
use crate::{Error, Result};

const MAGIC: &str = "winnowtc-model v1";

/// Pipeline settings stored alongside a classifier so that documents can be
/// vectorized the same way at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub strength: StrengthMode,
    pub normalize: bool,
    pub vocab_hash: String,
}

pub fn write_model(c: &Classifier, meta: Option<&ModelMeta>) -> String {
    let p = c.params();
    let mut header = format!(
        "{MAGIC} variant={} theta={:?} alpha={:?} beta={:?}",
        c.algorithm().code(),
        p.theta,
        p.alpha,
        p.beta
    );
    match c.model() {
        Model::Positive(m) => header.push_str(&format!(" init={:?}", m.initial_weight)),
        Model::Perceptron(m) => header.push_str(&format!(" init={:?}", m.initial_weight)),
        Model::Balanced(m) => header.push_str(&format!(
            " init={:?} init_neg={:?}",
            m.initial_pos, m.initial_neg
        )),
    }
    header.push_str(&format!(
        " theta_minus={:?} theta_plus={:?} features={}",
        p.theta_minus,
        p.theta_plus,
        c.num_features()
    ));
    if let Some(meta) = meta {
        header.push_str(&format!(
            " strength={} normalize={} vocab={}",
            meta.strength, meta.normalize, meta.vocab_hash
        ));
    }
    header.push_str(&format!(" category={}", c.category()));

    let mut out = header;
    out.push('\n');
    match c.model() {
        Model::Positive(m) => write_single(&mut out, &m.weights),
        Model::Perceptron(m) => write_single(&mut out, &m.weights),
        Model::Balanced(m) => {
            let mut ids: Vec<_> = m.weights.keys().copied().collect();
            ids.sort_unstable();
            for id in ids {
                let (p, n) = m.weights[&id];
                out.push_str(&format!("{id}\t{p:?}\t{n:?}\n"));
            }
        }
    }
    let filtered: Vec<String> = c.filtered_ids().iter().map(u32::to_string).collect();
    out.push_str("filtered: ");
    out.push_str(&filtered.join(","));
    out.push('\n');
    out
}

fn write_single(out: &mut String, weights: &HashMap<u32, f64>) {
    let mut ids: Vec<_> = weights.keys().copied().collect();
    ids.sort_unstable();
    for id in ids {
        out.push_str(&format!("{id}\t{:?}\n", weights[&id]));
    }
}

fn header_value<'a>(fields: &HashMap<&str, &'a str>, key: &str) -> Result<&'a str> {
    fields
        .get(key)
        .copied()
        .ok_or_else(|| Error::parse(1, format!("missing header field `{key}`")))
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::parse(line, format!("bad number `{s}`")))
}

pub fn read_model(text: &str) -> Result<(Classifier, Option<ModelMeta>)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty model file"))?;
    let rest = header
        .strip_prefix(MAGIC)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::parse(1, "not a winnowtc-model v1 file"))?;
    let (keyed, category) = match rest.find("category=") {
        Some(0) => ("", &rest["category=".len()..]),
        Some(pos) if rest.as_bytes()[pos - 1] == b' ' => {
            (&rest[..pos - 1], &rest[pos + "category=".len()..])
        }
        _ => return Err(Error::parse(1, "missing header field `category`")),
    };
    let mut fields = HashMap::new();
    for field in keyed.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("malformed header field `{field}`")))?;
        fields.insert(k, v);
    }

    let algorithm: Algorithm = header_value(&fields, "variant")?.parse()?;
    let theta = parse_f64(header_value(&fields, "theta")?, 1)?;
    let params = HyperParams {
        alpha: parse_f64(header_value(&fields, "alpha")?, 1)?,
        beta: parse_f64(header_value(&fields, "beta")?, 1)?,
        theta,
        theta_minus: fields.get("theta_minus").map_or(Ok(theta), |v| parse_f64(v, 1))?,
        theta_plus: fields.get("theta_plus").map_or(Ok(theta), |v| parse_f64(v, 1))?,
    };
    params.validate(algorithm)?;
    let init = parse_f64(header_value(&fields, "init")?, 1)?;
    let num_features: usize = header_value(&fields, "features")?
        .parse()
        .map_err(|_| Error::parse(1, "bad `features` value"))?;

    let meta = match (fields.get("strength"), fields.get("normalize"), fields.get("vocab")) {
        (Some(s), Some(n), Some(h)) => Some(ModelMeta {
            strength: s.parse()?,
            normalize: n
                .parse()
                .map_err(|_| Error::parse(1, "bad `normalize` value"))?,
            vocab_hash: h.to_string(),
        }),
        (None, None, None) => None,
        _ => return Err(Error::parse(1, "incomplete pipeline fields in header")),
    };

    let mut single: HashMap<u32, f64> = HashMap::new();
    let mut pair: HashMap<u32, (f64, f64)> = HashMap::new();
    let mut filtered: Option<BTreeSet<u32>> = None;
    for (i, line) in lines {
        let lineno = i + 1;
        if filtered.is_some() {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(lineno, "content after `filtered:` line"));
        }
        if let Some(list) = line.strip_prefix("filtered:") {
            let mut set = BTreeSet::new();
            for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let id: u32 = id
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad filtered id `{id}`")))?;
                set.insert(id);
            }
            filtered = Some(set);
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let id: u32 = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad feature id `{}`", cols[0])))?;
        let dup = match (algorithm, cols.len()) {
            (Algorithm::BalancedWinnow, 3) => pair
                .insert(id, (parse_f64(cols[1], lineno)?, parse_f64(cols[2], lineno)?))
                .is_some(),
            (Algorithm::BalancedWinnow, _) => {
                return Err(Error::parse(lineno, "expected `<id> TAB <w+> TAB <w->`"))
            }
            (_, 2) => single.insert(id, parse_f64(cols[1], lineno)?).is_some(),
            _ => return Err(Error::parse(lineno, "expected `<id> TAB <w>`")),
        };
        if dup {
            return Err(Error::parse(lineno, format!("duplicate feature id {id}")));
        }
    }
    let filtered = filtered.ok_or_else(|| Error::Format("missing `filtered:` line".into()))?;

    let model = match algorithm {
        Algorithm::PositiveWinnow => Model::Positive(PositiveWinnowModel {
            weights: single,
            initial_weight: init,
        }),
        Algorithm::Perceptron => Model::Perceptron(PerceptronModel {
            weights: single,
            initial_weight: init,
        }),
        Algorithm::BalancedWinnow => Model::Balanced(BalancedWinnowModel {
            weights: pair,
            initial_pos: init,
            initial_neg: parse_f64(header_value(&fields, "init_neg")?, 1)?,
        }),
    };
    let pruned = !filtered.is_empty();
    let c = Classifier::from_parts(model, params, category.to_string(), num_features, pruned);
    if pruned {
        // A pruned classifier filters exactly the features it does not store.
        let expected: BTreeSet<u32> = c.filtered_ids().into_iter().collect();
        if expected != filtered {
            return Err(Error::Format(
                "filtered ids are not the complement of the stored weights".into(),
            ));
        }
    }
    Ok((c, meta))
}
