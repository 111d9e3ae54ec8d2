//! Sparse, mistake-driven linear classifiers for text categorization.
//!
//! Three online learners are provided: Positive Winnow, Balanced Winnow and
//! the Perceptron. All of them keep weights only for features that have been
//! seen in a mistake, so an update costs time proportional to the number of
//! active features in a document rather than the size of the vocabulary.
//!
//! On top of the basic learners the crate implements length-normalized
//! strengths, training with a threshold range (a "thick" separator),
//! frequency-based strength modes, and one-shot feature filtering during
//! training, plus the text pipeline and the break-even-point evaluation
//! needed to run one-vs-rest categorization end to end.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod model;
pub mod pipeline;
pub mod synth;
pub mod training;

pub use error::{Error, Result};
