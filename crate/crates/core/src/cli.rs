//! `winnowtc` command line: vocab, train, eval, predict, bench.

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{parse_corpus, RawDocument, StrengthMode, Vocabulary, DEFAULT_MIN_FREQUENCY};
use crate::eval::evaluate;
use crate::model::{probability, read_model, write_model, Algorithm, Classifier, HyperParams, ModelMeta};
use crate::pipeline::{vectorize_with, Pipeline};
use crate::synth::{ablation_benchmark, filtering_benchmark, length_variation_benchmark, TextCorpusSpec};
use crate::training::{FilterPolicy, TrainConfig, DEFAULT_MAX_EPOCHS};

pub const VOCAB_FILE: &str = "vocab.txt";
const MODEL_EXT: &str = "model";

#[derive(Debug, Parser)]
#[command(name = "winnowtc", version, about = "Mistake-driven sparse text categorization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a vocabulary file from a corpus.
    Vocab {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MIN_FREQUENCY)]
        min_freq: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one classifier per category.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// Vocabulary built from the same corpus; built on the fly if omitted.
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        opts: TrainOptions,
    },
    /// Evaluate trained models on a labeled corpus.
    Eval {
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Report path; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score one document against every category.
    Predict {
        #[arg(long)]
        models: PathBuf,
        #[arg(long, conflicts_with = "file")]
        text: Option<String>,
        /// Document file, or `-` for standard input.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Run the synthetic benchmarks and print per-variant break-even points.
    Bench {
        #[arg(long, value_enum, default_value_t = Suite::Length)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Length variation: basic vs normalized Positive Winnow vs Balanced Winnow.
    Length,
    /// Balanced Winnow+ with and without feature filtering.
    Filter,
    /// Cumulative extensions for all three algorithms.
    Ablation,
}

#[derive(Debug, Default, Clone, Args)]
pub struct TrainOptions {
    /// pw, bw, perc, or bw+ (bw with threshold range, sqrt strength and filtering).
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub strength: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub theta_minus: Option<f64>,
    #[arg(long)]
    pub theta_plus: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long, overrides_with = "no_filter")]
    pub filter: bool,
    #[arg(long)]
    pub no_filter: bool,
    /// Filter once an epoch's mistakes fall to this fraction of the examples.
    #[arg(long)]
    pub filter_trigger: Option<f64>,
    #[arg(long)]
    pub min_freq: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub verbose: bool,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved training settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTraining {
    pub config: TrainConfig,
    pub min_freq: u64,
    pub verbose: bool,
}

/// Parses a flat `key = value` config file. `#` starts a comment; dashes
/// and underscores in keys are interchangeable.
pub fn parse_config(text: &str) -> anyhow::Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`", i + 1))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn config_value<T: std::str::FromStr>(cfg: &HashMap<String, String>, key: &str) -> anyhow::Result<Option<T>> {
    cfg.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| anyhow!("config key `{key}`: cannot parse `{v}`"))
        })
        .transpose()
}

impl TrainOptions {
    pub fn resolve(&self) -> anyhow::Result<ResolvedTraining> {
        let file = match &self.config {
            Some(path) => parse_config(&read_to_string(path)?)?,
            None => HashMap::new(),
        };
        const KNOWN: &[&str] = &[
            "algorithm", "normalize", "strength", "theta", "theta_minus", "theta_plus", "alpha",
            "beta", "max_epochs", "filter", "filter_trigger", "filter_max_epochs", "min_freq",
            "seed", "verbose",
        ];
        if let Some(k) = file.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            bail!("unknown config key `{k}`");
        }

        let algorithm_name = match &self.algorithm {
            Some(a) => a.clone(),
            None => file.get("algorithm").cloned().unwrap_or_else(|| "bw+".into()),
        };
        let plus = algorithm_name == "bw+";
        let algorithm: Algorithm = if plus {
            Algorithm::BalancedWinnow
        } else {
            algorithm_name.parse()?
        };

        let theta = self.theta.or(config_value(&file, "theta")?).unwrap_or(HyperParams::DEFAULT_THETA);
        let defaults = HyperParams::with_theta(algorithm, theta);
        let (preset_minus, preset_plus) = if plus { (0.9 * theta, 1.1 * theta) } else { (theta, theta) };
        let hyper = HyperParams {
            alpha: self.alpha.or(config_value(&file, "alpha")?).unwrap_or(defaults.alpha),
            beta: self.beta.or(config_value(&file, "beta")?).unwrap_or(defaults.beta),
            theta,
            theta_minus: self
                .theta_minus
                .or(config_value(&file, "theta_minus")?)
                .unwrap_or(preset_minus),
            theta_plus: self
                .theta_plus
                .or(config_value(&file, "theta_plus")?)
                .unwrap_or(preset_plus),
        };

        let strength: StrengthMode = match &self.strength {
            Some(s) => s.parse()?,
            None => match file.get("strength") {
                Some(s) => s.parse()?,
                None if plus => StrengthMode::Sqrt,
                None => StrengthMode::Binary,
            },
        };
        let filter_enabled = if self.filter {
            true
        } else if self.no_filter {
            false
        } else {
            config_value(&file, "filter")?.unwrap_or(plus)
        };
        let defaults_filter = FilterPolicy::enabled();
        let filter = FilterPolicy {
            enabled: filter_enabled,
            trigger_mistake_fraction: self
                .filter_trigger
                .or(config_value(&file, "filter_trigger")?)
                .unwrap_or(defaults_filter.trigger_mistake_fraction),
            trigger_max_epochs: config_value(&file, "filter_max_epochs")?
                .unwrap_or(defaults_filter.trigger_max_epochs),
        };

        let config = TrainConfig {
            algorithm,
            hyper,
            max_epochs: self
                .max_epochs
                .or(config_value(&file, "max_epochs")?)
                .unwrap_or(DEFAULT_MAX_EPOCHS),
            strength_mode: strength,
            normalize: self.normalize || config_value(&file, "normalize")?.unwrap_or(false),
            filter,
            shuffle_seed: self.seed.or(config_value(&file, "seed")?),
        };
        config.validate()?;
        Ok(ResolvedTraining {
            config,
            min_freq: self
                .min_freq
                .or(config_value(&file, "min_freq")?)
                .unwrap_or(DEFAULT_MIN_FREQUENCY),
            verbose: self.verbose || config_value(&file, "verbose")?.unwrap_or(false),
        })
    }
}

fn read_to_string(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn read_corpus(path: &Path) -> anyhow::Result<Vec<RawDocument>> {
    let text = read_to_string(path)?;
    parse_corpus(&text).with_context(|| format!("malformed corpus {}", path.display()))
}

fn read_vocab(path: &Path) -> anyhow::Result<Vocabulary> {
    let text = read_to_string(path)?;
    Vocabulary::parse(&text).with_context(|| format!("malformed vocabulary {}", path.display()))
}

/// File stem for a category: unsafe characters become `_`.
pub fn model_file_stem(category: &str) -> String {
    let s: String = category
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with('.') {
        format!("_{s}")
    } else {
        s
    }
}

/// Loaded models directory: the vocabulary plus every model, by category.
pub struct ModelSet {
    pub vocab: Vocabulary,
    pub models: Vec<(Classifier, ModelMeta)>,
}

pub fn load_models(dir: &Path) -> anyhow::Result<ModelSet> {
    let vocab = read_vocab(&dir.join(VOCAB_FILE))?;
    let hash = vocab.hash();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read models directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == MODEL_EXT))
        .collect();
    paths.sort();
    let mut models = Vec::new();
    for path in paths {
        let (c, meta) = read_model(&read_to_string(&path)?)
            .with_context(|| format!("malformed model {}", path.display()))?;
        let meta = meta.ok_or_else(|| anyhow!("{}: model has no pipeline fields", path.display()))?;
        if meta.vocab_hash != hash {
            bail!(
                "{}: vocabulary hash {} does not match {} ({})",
                path.display(),
                meta.vocab_hash,
                dir.join(VOCAB_FILE).display(),
                hash
            );
        }
        models.push((c, meta));
    }
    if models.is_empty() {
        bail!("no .{MODEL_EXT} files in {}", dir.display());
    }
    models.sort_by(|a, b| a.0.category().cmp(b.0.category()));
    Ok(ModelSet { vocab, models })
}

pub fn run_vocab(corpus: &Path, min_freq: u64, out: &Path) -> anyhow::Result<Vocabulary> {
    let docs = read_corpus(corpus)?;
    let vocab = Vocabulary::build(&docs, min_freq)?;
    write_file(out, &vocab.to_text())?;
    Ok(vocab)
}

pub fn run_train(
    corpus: &Path,
    vocab_path: Option<&Path>,
    out_dir: &Path,
    opts: &TrainOptions,
    stdout: &mut dyn Write,
) -> anyhow::Result<()> {
    let resolved = opts.resolve()?;
    let docs = read_corpus(corpus)?;
    let vocab = match vocab_path {
        Some(path) => {
            let vocab = read_vocab(path)?;
            let rebuilt = Vocabulary::build(&docs, vocab.min_frequency())?;
            if rebuilt.hash() != vocab.hash() {
                bail!(
                    "vocabulary {} was not built from corpus {} (hash {} != {})",
                    path.display(),
                    corpus.display(),
                    vocab.hash(),
                    rebuilt.hash()
                );
            }
            vocab
        }
        None => Vocabulary::build(&docs, resolved.min_freq)?,
    };
    let pipeline = Pipeline::new(vocab, resolved.config.clone())?;
    let trained = pipeline.train(&docs)?;
    if trained.is_empty() {
        bail!("corpus {} has no labeled documents", corpus.display());
    }

    let meta = pipeline.meta();
    let mut files: Vec<(PathBuf, String)> = vec![(out_dir.join(VOCAB_FILE), pipeline.vocab().to_text())];
    let mut used = BTreeSet::new();
    for t in &trained {
        let stem = model_file_stem(t.classifier.category());
        let mut name = stem.clone();
        let mut k = 2;
        while !used.insert(name.clone()) {
            name = format!("{stem}-{k}");
            k += 1;
        }
        files.push((
            out_dir.join(format!("{name}.{MODEL_EXT}")),
            write_model(&t.classifier, Some(&meta)),
        ));
    }

    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    remove_stale_models(out_dir, &files)?;
    for (path, contents) in &files {
        write_file(path, contents)?;
    }
    if resolved.verbose {
        for t in &trained {
            writeln!(stdout, "# category={}", t.classifier.category())?;
            for line in t.report.log_lines() {
                writeln!(stdout, "{line}")?;
            }
        }
    }
    Ok(())
}

fn remove_stale_models(dir: &Path, keep: &[(PathBuf, String)]) -> anyhow::Result<()> {
    let keep: BTreeSet<&PathBuf> = keep.iter().map(|(p, _)| p).collect();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == MODEL_EXT) && !keep.contains(&path) {
            let is_ours = fs::read_to_string(&path)
                .map(|t| t.starts_with("winnowtc-model "))
                .unwrap_or(false);
            if is_ours {
                fs::remove_file(&path).with_context(|| format!("cannot remove {}", path.display()))?;
            }
        }
    }
    Ok(())
}

pub fn run_eval(
    models_dir: &Path,
    corpus: &Path,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> anyhow::Result<String> {
    let set = load_models(models_dir)?;
    let docs = read_corpus(corpus)?;
    let known: BTreeSet<&str> = set.models.iter().map(|(c, _)| c.category()).collect();
    let missing: BTreeSet<&str> = docs
        .iter()
        .flat_map(|d| d.labels.iter().map(String::as_str))
        .filter(|l| !known.contains(l))
        .collect();
    for cat in &missing {
        writeln!(stderr, "warning: no model for category `{cat}`; skipped")?;
    }

    let meta = &set.models[0].1;
    if set
        .models
        .iter()
        .any(|(_, m)| m.strength != meta.strength || m.normalize != meta.normalize)
    {
        bail!("models in {} use different strength settings", models_dir.display());
    }
    let test: Vec<_> = docs
        .iter()
        .map(|d| (vectorize_with(&set.vocab, meta, &d.text), d.labels.clone()))
        .collect();
    let classifiers: Vec<Classifier> = set.models.iter().map(|(c, _)| c.clone()).collect();
    let report = evaluate(&classifiers, &test)?;
    for cat in report.skipped() {
        writeln!(stderr, "note: category `{cat}` has no positive test document; excluded from macro")?;
    }
    for cat in report.approximate() {
        writeln!(stderr, "note: category `{cat}`: precision and recall never cross; approximate BEP")?;
    }
    writeln!(stderr, "note: both macro and micro averages are reported; summaries use macro")?;
    let text = report.to_text();
    match out {
        Some(path) => write_file(path, &text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(text)
}

/// `(category, score, probability, decision)` sorted by descending score.
pub fn predict_lines(set: &ModelSet, text: &str) -> Vec<(String, f64, f64, bool)> {
    let mut rows: Vec<(String, f64, f64, bool)> = set
        .models
        .iter()
        .map(|(c, meta)| {
            let v = vectorize_with(&set.vocab, meta, text);
            let score = c.score(&v);
            let theta = c.params().theta;
            (c.category().to_string(), score, probability(score - theta), score > theta)
        })
        .collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows
}

pub fn run_predict(
    models_dir: &Path,
    text: Option<&str>,
    file: Option<&Path>,
    stdout: &mut dyn Write,
) -> anyhow::Result<()> {
    let input = match (text, file) {
        (Some(t), _) => t.to_string(),
        (None, Some(p)) if p == Path::new("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
        (None, Some(p)) => read_to_string(p)?,
        (None, None) => bail!("predict needs --text or --file"),
    };
    let set = load_models(models_dir)?;
    if input.trim().is_empty() {
        return Ok(());
    }
    for (cat, score, prob, decision) in predict_lines(&set, &input) {
        writeln!(stdout, "{cat}\t{score:.6}\t{prob:.6}\t{decision}")?;
    }
    Ok(())
}

pub fn run_bench(suite: Suite, seed: u64, out: Option<&Path>, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let mut text = String::new();
    match suite {
        Suite::Length => {
            for v in length_variation_benchmark(&TextCorpusSpec::length_variation(seed))? {
                text.push_str(&v.row());
                text.push('\n');
            }
        }
        Suite::Filter => {
            let b = filtering_benchmark(&TextCorpusSpec::with_seed(seed))?;
            text.push_str(&b.without_filter.row());
            text.push('\n');
            text.push_str(&b.with_filter.row());
            text.push('\n');
            text.push_str(&format!(
                "# filtered_fraction={:.4} vocab={}\n",
                b.filtered_fraction, b.vocab_size
            ));
        }
        Suite::Ablation => {
            for v in ablation_benchmark(&TextCorpusSpec::with_seed(seed))? {
                text.push_str(&v.row());
                text.push('\n');
            }
        }
    }
    match out {
        Some(path) => write_file(path, &text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the CLI with explicit argument list and output streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    match cli.command {
        Command::Vocab { corpus, min_freq, out } => {
            run_vocab(&corpus, min_freq, &out)?;
        }
        Command::Train {
            corpus,
            vocab,
            out_dir,
            opts,
        } => run_train(&corpus, vocab.as_deref(), &out_dir, &opts, stdout)?,
        Command::Eval { models, corpus, out } => {
            run_eval(&models, &corpus, out.as_deref(), stdout, stderr)?;
        }
        Command::Predict { models, text, file } => {
            run_predict(&models, text.as_deref(), file.as_deref(), stdout)?
        }
        Command::Bench { suite, seed, out } => run_bench(suite, seed, out.as_deref(), stdout)?,
    }
    Ok(())
}

/// Process entry point; returns the exit status.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let result = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    match result {
        Ok(()) => 0,
        Err(e) => match e.downcast_ref::<clap::Error>() {
            Some(ce) => {
                let _ = ce.print();
                if ce.use_stderr() {
                    2
                } else {
                    0
                }
            }
            None => {
                eprintln!("error: {e:#}");
                1
            }
        },
    }
}
