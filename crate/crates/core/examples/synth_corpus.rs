//! Writes a synthetic train/test corpus pair in the corpus file format.
//!
//! `cargo run --example synth_corpus -- --out-dir DIR --categories 10`

use std::fs;
use std::path::PathBuf;

use clap::Parser;
use winnowtc::corpus::format_corpus;
use winnowtc::synth::{generate_text_corpus, TextCorpusSpec};

#[derive(Parser)]
struct Args {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    categories: usize,
    #[arg(long, default_value_t = 800)]
    vocab_size: usize,
    #[arg(long, default_value_t = 400)]
    train: usize,
    #[arg(long, default_value_t = 200)]
    test: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let corpus = generate_text_corpus(&TextCorpusSpec {
        vocab_size: args.vocab_size,
        n_categories: args.categories,
        n_train: args.train,
        n_test: args.test,
        seed: args.seed,
        ..TextCorpusSpec::default()
    })?;
    fs::create_dir_all(&args.out_dir)?;
    fs::write(args.out_dir.join("train.tsv"), format_corpus(&corpus.train))?;
    fs::write(args.out_dir.join("test.tsv"), format_corpus(&corpus.test))?;
    Ok(())
}
