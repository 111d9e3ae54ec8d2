//! Documents, tokenization, vocabulary construction and sparse vectors.

mod io;
mod vector;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub use io::{escape_text, format_corpus, parse_corpus, unescape_text};
pub use vector::{normalize, SparseVector};

pub const DEFAULT_MIN_FREQUENCY: u64 = 3;

/// A labeled document as read from a corpus file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    /// Categories this document belongs to. Empty means it is a negative
    /// example for every category.
    pub labels: BTreeSet<String>,
}

impl RawDocument {
    pub fn new<I, S>(id: impl Into<String>, text: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RawDocument {
            id: id.into(),
            text: text.into(),
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }
}

/// Splits text into feature tokens.
pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str) -> Vec<String>;
}

/// Lowercased maximal runs of alphabetic characters, dropping runs shorter
/// than two characters.
#[derive(Debug, Default, Clone, Copy)]
pub struct AlphaTokenizer;

impl Tokenizer for AlphaTokenizer {
    fn tokenize(&self, text: &str) -> Vec<String> {
        tokenize(text)
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut run_len = 0usize;
    let mut flush = |current: &mut String, run_len: &mut usize| {
        if *run_len >= 2 {
            tokens.push(std::mem::take(current));
        } else {
            current.clear();
        }
        *run_len = 0;
    };
    for ch in text.chars() {
        if ch.is_alphabetic() {
            current.extend(ch.to_lowercase());
            run_len += 1;
        } else if run_len > 0 {
            flush(&mut current, &mut run_len);
        }
    }
    if run_len > 0 {
        flush(&mut current, &mut run_len);
    }
    tokens
}

/// How the occurrence count n(f,d) of a feature maps to its strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrengthMode {
    /// 1 if present.
    #[default]
    Binary,
    /// n(f,d).
    Linear,
    /// sqrt(n(f,d)).
    Sqrt,
}

impl StrengthMode {
    pub fn strength(self, count: u32) -> f64 {
        match self {
            StrengthMode::Binary => 1.0,
            StrengthMode::Linear => f64::from(count),
            StrengthMode::Sqrt => f64::from(count).sqrt(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StrengthMode::Binary => "binary",
            StrengthMode::Linear => "linear",
            StrengthMode::Sqrt => "sqrt",
        }
    }
}

impl fmt::Display for StrengthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrengthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(StrengthMode::Binary),
            "linear" => Ok(StrengthMode::Linear),
            "sqrt" => Ok(StrengthMode::Sqrt),
            other => Err(Error::Format(format!("unknown strength mode `{other}`"))),
        }
    }
}

/// Token to feature-id map, frozen after construction.
///
/// Feature ids are dense (`0..len()`) and assigned in order of first
/// occurrence in the training corpus. `avg_active` is the mean number of
/// distinct retained tokens per training document; classifiers use it to
/// pick their initial weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    min_frequency: u64,
    avg_active: f64,
}

impl Vocabulary {
    /// Builds a vocabulary with the default alphabetic tokenizer.
    pub fn build(docs: &[RawDocument], min_frequency: u64) -> Result<Self> {
        Self::build_with(docs, min_frequency, &AlphaTokenizer)
    }

    pub fn build_with(
        docs: &[RawDocument],
        min_frequency: u64,
        tokenizer: &dyn Tokenizer,
    ) -> Result<Self> {
        Self::from_token_lists(docs.iter().map(|d| tokenizer.tokenize(&d.text)), min_frequency)
    }

    /// Builds a vocabulary from pre-tokenized documents.
    ///
    /// `min_frequency` counts total token occurrences across the corpus, not
    /// document frequency.
    pub fn from_token_lists<I>(docs: I, min_frequency: u64) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        if min_frequency == 0 {
            return Err(Error::InvalidParams("min_frequency must be at least 1".into()));
        }
        let mut first_seen: Vec<String> = Vec::new();
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut per_doc: Vec<Vec<String>> = Vec::new();
        for tokens in docs {
            for tok in &tokens {
                match counts.get_mut(tok) {
                    Some(c) => *c += 1,
                    None => {
                        counts.insert(tok.clone(), 1);
                        first_seen.push(tok.clone());
                    }
                }
            }
            per_doc.push(tokens);
        }
        if per_doc.is_empty() {
            return Err(Error::EmptyCorpus);
        }

        let mut vocab = Vocabulary {
            tokens: Vec::new(),
            counts: Vec::new(),
            index: HashMap::new(),
            min_frequency,
            avg_active: 0.0,
        };
        for tok in first_seen {
            let count = counts[&tok];
            if count >= min_frequency {
                vocab.push(tok, count);
            }
        }
        if vocab.is_empty() {
            return Err(Error::NoRetainedFeatures(min_frequency));
        }

        let total_active: usize = per_doc
            .iter()
            .map(|tokens| {
                tokens
                    .iter()
                    .filter(|t| vocab.index.contains_key(t.as_str()))
                    .collect::<BTreeSet<_>>()
                    .len()
            })
            .sum();
        vocab.avg_active = total_active as f64 / per_doc.len() as f64;
        Ok(vocab)
    }

    fn push(&mut self, token: String, count: u64) {
        let id = self.tokens.len() as u32;
        self.index.insert(token.clone(), id);
        self.tokens.push(token);
        self.counts.push(count);
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn min_frequency(&self) -> u64 {
        self.min_frequency
    }

    pub fn avg_active(&self) -> f64 {
        self.avg_active
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn count(&self, id: u32) -> Option<u64> {
        self.counts.get(id as usize).copied()
    }

    /// `(token, id, count)` in id order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, u32, u64)> + '_ {
        self.tokens
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(i, (t, &c))| (t.as_str(), i as u32, c))
    }

    /// Strength vector for already tokenized text; unknown tokens are ignored.
    pub fn vectorize_tokens<S: AsRef<str>>(&self, tokens: &[S], mode: StrengthMode) -> SparseVector {
        let mut occurrences: BTreeMap<u32, u32> = BTreeMap::new();
        for tok in tokens {
            if let Some(id) = self.id(tok.as_ref()) {
                *occurrences.entry(id).or_insert(0) += 1;
            }
        }
        SparseVector::from_sorted_unchecked(
            occurrences
                .into_iter()
                .map(|(id, n)| (id, mode.strength(n)))
                .collect(),
        )
    }

    pub fn vectorize_text(&self, text: &str, mode: StrengthMode) -> SparseVector {
        self.vectorize_tokens(&tokenize(text), mode)
    }

    pub fn vectorize(&self, doc: &RawDocument, mode: StrengthMode) -> SparseVector {
        self.vectorize_text(&doc.text, mode)
    }

    /// Serializes to the line-oriented vocabulary file format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "winnowtc-vocab v1 min_freq={} avg_active={:?}\n",
            self.min_frequency, self.avg_active
        );
        for (tok, id, count) in self.entries() {
            out.push_str(&format!("{tok}\t{id}\t{count}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing vocabulary header"))?;
        let rest = header
            .strip_prefix("winnowtc-vocab v1 ")
            .ok_or_else(|| Error::parse(1, "not a winnowtc-vocab v1 file"))?;
        let mut min_frequency = None;
        let mut avg_active = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("min_freq", v)) => {
                    min_frequency = Some(v.parse::<u64>().map_err(|e| Error::parse(1, e.to_string()))?)
                }
                Some(("avg_active", v)) => {
                    avg_active = Some(v.parse::<f64>().map_err(|e| Error::parse(1, e.to_string()))?)
                }
                _ => return Err(Error::parse(1, format!("unexpected header field `{field}`"))),
            }
        }
        let min_frequency = min_frequency.ok_or_else(|| Error::parse(1, "missing min_freq"))?;
        let avg_active = avg_active.ok_or_else(|| Error::parse(1, "missing avg_active"))?;
        if !(avg_active > 0.0) {
            return Err(Error::InvalidAverageActive(avg_active));
        }

        let mut vocab = Vocabulary {
            tokens: Vec::new(),
            counts: Vec::new(),
            index: HashMap::new(),
            min_frequency,
            avg_active,
        };
        for (i, line) in lines {
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [tok, id, count] = fields[..] else {
                return Err(Error::parse(lineno, "expected `<token> TAB <id> TAB <count>`"));
            };
            let id: u32 = id.parse().map_err(|_| Error::parse(lineno, "bad feature id"))?;
            let count: u64 = count.parse().map_err(|_| Error::parse(lineno, "bad count"))?;
            if id as usize != vocab.len() {
                return Err(Error::parse(lineno, "feature ids must be contiguous from 0"));
            }
            if vocab.index.contains_key(tok) {
                return Err(Error::parse(lineno, format!("duplicate token `{tok}`")));
            }
            vocab.push(tok.to_string(), count);
        }
        Ok(vocab)
    }

    /// Short content hash of the serialized vocabulary, embedded in model
    /// files so train/eval mismatches are caught.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
