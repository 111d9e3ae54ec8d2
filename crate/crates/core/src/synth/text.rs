//! Zipf-distributed text-like corpora with topical categories, and the
//! benchmarks run on them.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::corpus::{RawDocument, StrengthMode, Vocabulary, DEFAULT_MIN_FREQUENCY};
use crate::eval::EvalReport;
use crate::model::{Algorithm, Classifier};
use crate::pipeline::Pipeline;
use crate::training::{FilterPolicy, TrainConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextCorpusSpec {
    pub vocab_size: usize,
    pub n_categories: usize,
    /// Topical words per category, disjoint across categories.
    pub indicative_per_category: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Inclusive token-count range per document, drawn uniformly.
    pub min_len: usize,
    pub max_len: usize,
    /// Independent probability that a document carries each category.
    pub label_rate: f64,
    /// Fraction of a labeled document's tokens drawn from its categories'
    /// topical words; the rest come from the background distribution.
    pub topical_rate: f64,
    pub zipf_exponent: f64,
    pub seed: u64,
}

impl Default for TextCorpusSpec {
    fn default() -> Self {
        TextCorpusSpec {
            vocab_size: 3000,
            n_categories: 5,
            indicative_per_category: 20,
            n_train: 1500,
            n_test: 1000,
            min_len: 20,
            max_len: 120,
            label_rate: 0.15,
            topical_rate: 0.1,
            zipf_exponent: 1.0,
            seed: 1,
        }
    }
}

impl TextCorpusSpec {
    /// Default corpus with document lengths spread over 5..=200 tokens.
    pub fn length_variation(seed: u64) -> Self {
        TextCorpusSpec {
            min_len: 5,
            max_len: 200,
            seed,
            ..TextCorpusSpec::default()
        }
    }

    pub fn with_seed(seed: u64) -> Self {
        TextCorpusSpec {
            seed,
            ..TextCorpusSpec::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextCorpus {
    pub train: Vec<RawDocument>,
    pub test: Vec<RawDocument>,
    /// Background ranks of each category's topical words.
    pub indicative: Vec<Vec<usize>>,
}

/// Alphabetic token standing for background rank `rank`.
pub fn token_for_rank(rank: usize) -> String {
    let mut letters = Vec::new();
    let mut r = rank;
    loop {
        letters.push(b'a' + (r % 26) as u8);
        r /= 26;
        if r == 0 {
            break;
        }
    }
    while letters.len() < 3 {
        letters.push(b'a');
    }
    letters.reverse();
    format!("w{}", String::from_utf8(letters).expect("ascii"))
}

pub fn category_name(index: usize) -> String {
    format!("topic{index}")
}

pub fn generate_text_corpus(spec: &TextCorpusSpec) -> Result<TextCorpus> {
    let topical_words = spec.n_categories * spec.indicative_per_category;
    if spec.vocab_size < 2 * topical_words || spec.min_len == 0 || spec.min_len > spec.max_len {
        return Err(Error::InvalidParams("inconsistent text corpus spec".into()));
    }
    let zipf = Zipf::new(spec.vocab_size as f64, spec.zipf_exponent)
        .map_err(|e| Error::InvalidParams(format!("zipf: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Topical words come from the middle of the frequency ranking so they
    // are neither stop-word-like nor pruned as rare.
    let lo = spec.vocab_size / 20;
    let pool: Vec<usize> = rand::seq::index::sample(&mut rng, spec.vocab_size / 2 - lo, topical_words)
        .into_iter()
        .map(|i| i + lo)
        .collect();
    let indicative: Vec<Vec<usize>> = pool
        .chunks(spec.indicative_per_category)
        .map(<[usize]>::to_vec)
        .collect();

    let make_doc = |id: String, rng: &mut ChaCha8Rng| {
        let labels: Vec<usize> = (0..spec.n_categories)
            .filter(|_| rng.random_bool(spec.label_rate))
            .collect();
        let len = rng.random_range(spec.min_len..=spec.max_len);
        let words: Vec<String> = (0..len)
            .map(|_| {
                let rank = if !labels.is_empty() && rng.random_bool(spec.topical_rate) {
                    let cat = *labels.choose(rng).expect("non-empty");
                    *indicative[cat].choose(rng).expect("non-empty")
                } else {
                    zipf.sample(rng) as usize - 1
                };
                token_for_rank(rank)
            })
            .collect();
        RawDocument::new(id, words.join(" "), labels.into_iter().map(category_name))
    };
    let train = (0..spec.n_train)
        .map(|i| make_doc(format!("train{i}"), &mut rng))
        .collect();
    let test = (0..spec.n_test)
        .map(|i| make_doc(format!("test{i}"), &mut rng))
        .collect();
    Ok(TextCorpus {
        train,
        test,
        indicative,
    })
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub name: String,
    pub report: EvalReport,
    pub classifiers: Vec<Classifier>,
}

impl VariantResult {
    pub fn macro_bep(&self) -> f64 {
        self.report.macro_bep.unwrap_or(0.0)
    }

    /// `<variant> TAB <macro bep> TAB <p1> <p2> <n1> <n2>` with counts summed
    /// over categories at θ.
    pub fn row(&self) -> String {
        let c = self.report.contingency_at_theta;
        format!("{}\t{:?}\t{} {} {} {}", self.name, self.macro_bep(), c.p1, c.p2, c.n1, c.n2)
    }
}

pub fn run_variant(name: &str, corpus: &TextCorpus, cfg: TrainConfig) -> Result<VariantResult> {
    let vocab = Vocabulary::build(&corpus.train, DEFAULT_MIN_FREQUENCY)?;
    let pipeline = Pipeline::new(vocab, cfg)?;
    let classifiers: Vec<Classifier> = pipeline
        .train(&corpus.train)?
        .into_iter()
        .map(|t| t.classifier)
        .collect();
    let report = pipeline.evaluate(&classifiers, &corpus.test)?;
    Ok(VariantResult {
        name: name.to_string(),
        report,
        classifiers,
    })
}

/// Basic Positive Winnow, normalized Positive Winnow and basic Balanced
/// Winnow on a corpus with strongly varying document length.
pub fn length_variation_benchmark(spec: &TextCorpusSpec) -> Result<Vec<VariantResult>> {
    let corpus = generate_text_corpus(spec)?;
    let mut normalized = TrainConfig::basic(Algorithm::PositiveWinnow);
    normalized.normalize = true;
    Ok(vec![
        run_variant("pw", &corpus, TrainConfig::basic(Algorithm::PositiveWinnow))?,
        run_variant("pw-norm", &corpus, normalized)?,
        run_variant("bw", &corpus, TrainConfig::basic(Algorithm::BalancedWinnow))?,
    ])
}

pub struct FilterBenchmark {
    pub without_filter: VariantResult,
    pub with_filter: VariantResult,
    pub vocab_size: usize,
    /// Mean over categories of filtered features / vocabulary size.
    pub filtered_fraction: f64,
}

/// Balanced Winnow with threshold range and square-root strengths, trained
/// with and without feature filtering.
pub fn filtering_benchmark(spec: &TextCorpusSpec) -> Result<FilterBenchmark> {
    let corpus = generate_text_corpus(spec)?;
    let with_cfg = TrainConfig::balanced_plus();
    let mut without_cfg = with_cfg.clone();
    without_cfg.filter = FilterPolicy::disabled();
    let without_filter = run_variant("bw+ no-filter", &corpus, without_cfg)?;
    let with_filter = run_variant("bw+", &corpus, with_cfg)?;
    let vocab_size = with_filter.classifiers.first().map_or(0, Classifier::num_features);
    let fractions: Vec<f64> = with_filter
        .classifiers
        .iter()
        .map(|c| c.filtered_count() as f64 / c.num_features() as f64)
        .collect();
    let filtered_fraction = fractions.iter().sum::<f64>() / fractions.len().max(1) as f64;
    Ok(FilterBenchmark {
        without_filter,
        with_filter,
        vocab_size,
        filtered_fraction,
    })
}

/// Cumulative extensions per algorithm: basic, normalization (Positive
/// Winnow only), threshold range, linear frequency, square-root frequency,
/// and feature filtering on top of square-root frequency.
pub fn ablation_benchmark(spec: &TextCorpusSpec) -> Result<Vec<VariantResult>> {
    let corpus = generate_text_corpus(spec)?;
    let mut out = Vec::new();
    for algorithm in [Algorithm::BalancedWinnow, Algorithm::PositiveWinnow, Algorithm::Perceptron] {
        let code = algorithm.code();
        let mut cfg = TrainConfig::basic(algorithm);
        out.push(run_variant(&format!("{code}/basic"), &corpus, cfg.clone())?);
        if algorithm == Algorithm::PositiveWinnow {
            cfg.normalize = true;
            out.push(run_variant(&format!("{code}/norm"), &corpus, cfg.clone())?);
        }
        cfg.hyper = cfg.hyper.with_range(0.9 * cfg.hyper.theta, 1.1 * cfg.hyper.theta);
        out.push(run_variant(&format!("{code}/theta-range"), &corpus, cfg.clone())?);
        cfg.strength_mode = StrengthMode::Linear;
        out.push(run_variant(&format!("{code}/linear"), &corpus, cfg.clone())?);
        cfg.strength_mode = StrengthMode::Sqrt;
        out.push(run_variant(&format!("{code}/sqrt"), &corpus, cfg.clone())?);
        cfg.filter = FilterPolicy::enabled();
        out.push(run_variant(&format!("{code}/discard"), &corpus, cfg)?);
    }
    Ok(out)
}
