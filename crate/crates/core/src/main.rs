//! Command-line entry point: full experiment runs plus stage-wise
//! subcommands over a shared run directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sentigraph::error::Error;
use sentigraph::experiment::{
    self, ExperimentConfig, RunPaths,
};

#[derive(Parser)]
#[command(name = "sentigraph", version, about = "Two-layer tweet sentiment pipeline: weak labeling, six classifiers, keyword context learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// TOML config file; flags below override its values.
    #[arg(long, env = "SENTIGRAPH_CONFIG")]
    config: Option<PathBuf>,
    /// Input CSV with a header row.
    #[arg(long, env = "SENTIGRAPH_INPUT")]
    input: Option<PathBuf>,
    /// Column mapping: "id,text" or "id,text,label".
    #[arg(long, env = "SENTIGRAPH_SCHEMA")]
    schema: Option<String>,
    /// Polarity lexicon TSV (term<TAB>polarity); default: bundled.
    #[arg(long, env = "SENTIGRAPH_LEXICON")]
    lexicon: Option<PathBuf>,
    /// Stopword list, one per line; default: bundled.
    #[arg(long, env = "SENTIGRAPH_STOPWORDS")]
    stopwords: Option<PathBuf>,
    /// Train fraction in (0, 1).
    #[arg(long, env = "SENTIGRAPH_SPLIT")]
    split: Option<f64>,
    /// Seed for the split and all stochastic trainers.
    #[arg(long, env = "SENTIGRAPH_SEED")]
    seed: Option<u64>,
    /// Minimum total corpus occurrences for vocabulary admission.
    #[arg(long = "min-count", env = "SENTIGRAPH_MIN_COUNT")]
    min_count: Option<usize>,
    /// Comma-separated models (nb,lr,svm,dt,rf,gbt); default: all six.
    #[arg(long, alias = "model", env = "SENTIGRAPH_MODELS", value_delimiter = ',')]
    models: Vec<String>,
    /// Comma-separated feature kinds (bow,tfidf); default: both.
    #[arg(long, alias = "feature", env = "SENTIGRAPH_FEATURES", value_delimiter = ',')]
    features: Vec<String>,
    /// Top-k keyword list length for context learning.
    #[arg(long, env = "SENTIGRAPH_K")]
    k: Option<usize>,
    /// Run directory for artifacts.
    #[arg(long, env = "SENTIGRAPH_OUT")]
    out: Option<PathBuf>,
    /// Overwrite existing artifacts.
    #[arg(long, env = "SENTIGRAPH_FORCE")]
    force: bool,
    /// Worker threads for training jobs; default: all cores.
    #[arg(long, env = "SENTIGRAPH_JOBS")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline end to end.
    Run(CommonOpts),
    /// Load the input CSV and run the text pipeline; writes tokens.json.
    Preprocess(CommonOpts),
    /// Weak-label tokenized documents and split; writes labels.json.
    Label(CommonOpts),
    /// Build the vocabulary and feature matrices; writes vocab.json + features/.
    Featurize(CommonOpts),
    /// Train the selected models on the selected extractors; writes models/.
    Train(CommonOpts),
    /// Evaluate trained models on the held-out split; writes reports/ + roc/.
    Evaluate(CommonOpts),
    /// Rank per-sentiment keywords and score coverage; writes context.json.
    Context(CommonOpts),
    /// Assemble report.md from a completed run directory.
    Report(CommonOpts),
}

impl CommonOpts {
    /// TOML file (if given) -> defaults, then flag overrides on top.
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let raw = std::fs::read_to_string(path)
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
                ExperimentConfig::from_toml(&raw)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(input) = &self.input {
            cfg.input = input.clone();
        }
        if let Some(schema) = &self.schema {
            let parts: Vec<&str> = schema.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [id, text] => {
                    cfg.id_column = id.to_string();
                    cfg.text_column = text.to_string();
                    cfg.label_column = None;
                }
                [id, text, label] => {
                    cfg.id_column = id.to_string();
                    cfg.text_column = text.to_string();
                    cfg.label_column = Some(label.to_string());
                }
                _ => {
                    return Err(Error::Config(format!(
                        "--schema expects \"id,text\" or \"id,text,label\", got '{schema}'"
                    )))
                }
            }
        }
        if self.lexicon.is_some() {
            cfg.lexicon = self.lexicon.clone();
        }
        if self.stopwords.is_some() {
            cfg.stopwords = self.stopwords.clone();
        }
        if let Some(split) = self.split {
            cfg.split = split;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(min_count) = self.min_count {
            cfg.min_count = min_count;
        }
        if !self.models.is_empty() {
            cfg.models = self.models.clone();
        }
        if !self.features.is_empty() {
            cfg.features = self.features.clone();
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        cfg.validate()?;
        if let Some(jobs) = self.jobs {
            if jobs == 0 {
                return Err(Error::Config("--jobs must be >= 1".into()));
            }
            // ignore the error if a global pool already exists (tests)
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global();
        }
        Ok(cfg)
    }
}

fn dispatch(command: &Command) -> Result<(), Error> {
    let (opts, stage): (&CommonOpts, &str) = match command {
        Command::Run(o) => (o, "run"),
        Command::Preprocess(o) => (o, "preprocess"),
        Command::Label(o) => (o, "label"),
        Command::Featurize(o) => (o, "featurize"),
        Command::Train(o) => (o, "train"),
        Command::Evaluate(o) => (o, "evaluate"),
        Command::Context(o) => (o, "context"),
        Command::Report(o) => (o, "report"),
    };
    let cfg = opts.resolve()?;
    let paths = RunPaths::new(&cfg.out);
    let force = opts.force;
    match stage {
        "run" => experiment::run_experiment(&cfg, force)?,
        "preprocess" => {
            let artifact = experiment::stage_preprocess(&cfg, &paths, force)
                .map_err(|e| e.in_stage("preprocess"))?;
            eprintln!(
                "tokenized {} documents ({} rejected as non-English)",
                artifact.docs.len(),
                artifact.rejected
            );
        }
        "label" => {
            let artifact =
                experiment::stage_label(&cfg, &paths, force).map_err(|e| e.in_stage("label"))?;
            eprintln!(
                "labeled {} documents: {:?}",
                artifact.labels.len(),
                artifact.counts
            );
        }
        "featurize" => {
            let vocab = experiment::stage_featurize(&cfg, &paths, force)
                .map_err(|e| e.in_stage("featurize"))?;
            eprintln!("vocabulary: {} terms", vocab.len());
        }
        "train" => {
            experiment::stage_train(&cfg, &paths, force).map_err(|e| e.in_stage("train"))?;
        }
        "evaluate" => {
            let reports = experiment::stage_evaluate(&cfg, &paths, force)
                .map_err(|e| e.in_stage("evaluate"))?;
            for r in &reports {
                eprintln!(
                    "{} / {}: accuracy {:.2}%",
                    r.model_kind,
                    r.feature_kind,
                    r.metrics.accuracy * 100.0
                );
            }
        }
        "context" => {
            experiment::stage_context(&cfg, &paths, force).map_err(|e| e.in_stage("context"))?;
        }
        "report" => {
            let md =
                experiment::stage_report(&cfg, &paths, force).map_err(|e| e.in_stage("report"))?;
            println!("{md}");
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
