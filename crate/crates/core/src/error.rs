use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column '{0}' in input header")]
    MissingColumn(String),
    #[error("duplicate document id '{0}'")]
    DuplicateId(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("train fraction {0} outside (0, 1)")]
    BadSplitFraction(f64),
    #[error("document '{0}' has no label")]
    UnlabeledDocument(String),
    #[error("vocabulary is empty after min_count={0} filtering; lower min_count")]
    EmptyVocabulary(usize),
    #[error("term '{0}' not in vocabulary")]
    UnknownTerm(String),
    #[error("class {0:?} absent from training data; cannot estimate prior")]
    MissingClass(crate::corpus::SentimentLabel),
    #[error("non-finite {what} during {kind} training (epoch/round {step})")]
    NonFinite {
        kind: String,
        what: String,
        step: usize,
    },
    #[error("invalid hyperparameter: {0}")]
    BadHyperparameter(String),
    #[error("vocabulary fingerprint mismatch: model {model}, features {features}")]
    FingerprintMismatch { model: String, features: String },
    #[error("feature row width {row} exceeds vocabulary size {vocab}")]
    RowTooWide { row: usize, vocab: usize },
    #[error("length mismatch: {left} true labels vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },
    #[error("class {0:?} is degenerate for ROC (needs at least one positive and one negative)")]
    DegenerateClass(crate::corpus::SentimentLabel),
    #[error("reports computed on different test sets: {0} vs {1}")]
    MixedTestSets(String, String),
    #[error("empty input for {0}")]
    EmptyInput(&'static str),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("missing artifact: expected {0}")]
    MissingArtifact(String),
    #[error("unknown model format_version {0}")]
    UnknownFormatVersion(u32),
    #[error("output {0} exists; pass --force to overwrite")]
    WouldOverwrite(String),
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Exit code contract: 1 for validation problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadSplitFraction(_)
            | Error::BadHyperparameter(_)
            | Error::Config(_)
            | Error::MissingColumn(_)
            | Error::WouldOverwrite(_) => 1,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
