//! Two-layer tweet sentiment toolkit: lexicon weak labeling, BoW/TF-IDF
//! features, six from-scratch classifiers, evaluation, and per-sentiment
//! keyword context learning.

pub mod context;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod models;
pub mod polarity;
pub mod preprocess;

pub use error::{Error, Result};
