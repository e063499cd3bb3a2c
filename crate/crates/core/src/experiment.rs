//! Experiment orchestration: resolved configuration, artifact layout, and
//! the staged pipeline (preprocess -> label -> featurize -> train ->
//! evaluate -> context -> report). Every artifact embeds the config hash
//! and a format version; reruns with the same config and seed are
//! byte-identical regardless of --jobs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::context::{build_context_report, ContextReport, ImportanceKind};
use crate::corpus::{self, CsvSchema, Dataset, Document, SentimentLabel};
use crate::error::{Error, Result};
use crate::eval::{self, EvaluationReport};
use crate::features::{self, SparseFeatureMatrix, Vocabulary, WeightKind};
use crate::models::{forest, gbt, logistic, naive_bayes, svm, tree, ModelKind, TrainedModel};
use crate::polarity::PolarityLexicon;
use crate::preprocess::{
    parse_wordlist, preprocess_pipeline, PipelineConfig, PipelineOutcome, TokenSequence,
};

pub const ARTIFACT_FORMAT_VERSION: u32 = 1;

/// Per-model hyperparameters, all defaulting to the documented values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperSet {
    pub naive_bayes: naive_bayes::NaiveBayesHyper,
    pub logistic: logistic::LogisticHyper,
    pub svm: svm::SvmHyper,
    pub decision_tree: tree::TreeHyper,
    pub random_forest: forest::ForestHyper,
    pub gbt: gbt::GbtHyper,
}

impl Default for HyperSet {
    fn default() -> Self {
        HyperSet {
            naive_bayes: Default::default(),
            logistic: Default::default(),
            svm: Default::default(),
            decision_tree: Default::default(),
            random_forest: Default::default(),
            gbt: Default::default(),
        }
    }
}

/// Fully-resolved experiment configuration; serialized into every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub input: PathBuf,
    pub id_column: String,
    pub text_column: String,
    pub label_column: Option<String>,
    /// Lexicon TSV; None = bundled seed lexicon.
    pub lexicon: Option<PathBuf>,
    /// Stopword list; None = bundled list.
    pub stopwords: Option<PathBuf>,
    pub split: f64,
    pub seed: u64,
    pub min_count: usize,
    pub neutral_band: f64,
    pub models: Vec<String>,
    pub features: Vec<String>,
    pub k: usize,
    pub distinctive_keywords: bool,
    pub out: PathBuf,
    pub hyper: HyperSet,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            input: PathBuf::from("data/fixture.csv"),
            id_column: "id".into(),
            text_column: "text".into(),
            label_column: None,
            lexicon: None,
            stopwords: None,
            split: 0.8,
            seed: 42,
            min_count: 2,
            neutral_band: 0.0,
            models: ModelKind::ALL.iter().map(|m| m.name().to_string()).collect(),
            features: vec!["bow".into(), "tfidf".into()],
            k: 50,
            distinctive_keywords: false,
            out: PathBuf::from("runs/default"),
            hyper: HyperSet::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::BadSplitFraction(self.split));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if self.min_count == 0 {
            return Err(Error::Config("min_count must be >= 1".into()));
        }
        if self.neutral_band < 0.0 || self.neutral_band >= 1.0 {
            return Err(Error::Config(format!(
                "neutral_band {} outside [0, 1)",
                self.neutral_band
            )));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models selected".into()));
        }
        for m in &self.models {
            if ModelKind::parse(m).is_none() {
                return Err(Error::Config(format!("unknown model '{m}'")));
            }
        }
        if self.features.is_empty() {
            return Err(Error::Config("no feature kinds selected".into()));
        }
        for f in &self.features {
            if WeightKind::parse(f).is_none() {
                return Err(Error::Config(format!("unknown feature kind '{f}'")));
            }
        }
        Ok(())
    }

    pub fn model_kinds(&self) -> Vec<ModelKind> {
        self.models
            .iter()
            .map(|m| ModelKind::parse(m).expect("validated"))
            .collect()
    }

    pub fn feature_kinds(&self) -> Vec<WeightKind> {
        self.features
            .iter()
            .map(|f| WeightKind::parse(f).expect("validated"))
            .collect()
    }

    /// sha256 over the canonical JSON serialization. The output directory
    /// is excluded: it doesn't affect what the experiment computes, and
    /// including it would make otherwise-identical runs hash differently.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.stopwords {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            cfg.stopwords = parse_wordlist(&raw);
        }
        Ok(cfg)
    }

    pub fn load_lexicon(&self) -> Result<PolarityLexicon> {
        match &self.lexicon {
            Some(path) => PolarityLexicon::load(path),
            None => Ok(PolarityLexicon::bundled()),
        }
    }

    /// Parse a TOML config file; unknown keys are rejected.
    pub fn from_toml(raw: &str) -> Result<Self> {
        toml::from_str(raw).map_err(|e| Error::Config(format!("config parse: {e}")))
    }
}

/// Wrapper giving every artifact file the same provenance envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub format_version: u32,
    pub config_hash: String,
    pub payload: T,
}

pub fn write_artifact<T: Serialize>(
    path: &Path,
    config_hash: &str,
    payload: &T,
    force: bool,
) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::WouldOverwrite(path.display().to_string()));
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    let artifact = Artifact {
        format_version: ARTIFACT_FORMAT_VERSION,
        config_hash: config_hash.to_string(),
        payload,
    };
    let json = serde_json::to_string_pretty(&artifact)?;
    std::fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_artifact<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Artifact<T>> {
    let raw = std::fs::read_to_string(path).map_err(|_| {
        Error::MissingArtifact(path.display().to_string())
    })?;
    let artifact: Artifact<T> = serde_json::from_str(&raw)?;
    if artifact.format_version != ARTIFACT_FORMAT_VERSION {
        return Err(Error::UnknownFormatVersion(artifact.format_version));
    }
    Ok(artifact)
}

fn write_text(path: &Path, contents: &str, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::WouldOverwrite(path.display().to_string()));
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path.display().to_string(), e))
}

// ---------------------------------------------------------------------------
// Artifact payloads

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub id: String,
    pub tokens: Option<TokenSequence>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokensArtifact {
    pub docs: Vec<TokenizedDoc>,
    pub rejected: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelsArtifact {
    pub labels: Vec<(String, SentimentLabel)>,
    pub counts: BTreeMap<String, usize>,
    pub rejected: usize,
    /// Document ids of the seeded split, in shuffle order.
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeaturesArtifact {
    pub train: SparseFeatureMatrix,
    pub test: SparseFeatureMatrix,
}

// ---------------------------------------------------------------------------
// Paths

pub struct RunPaths {
    pub dir: PathBuf,
}

impl RunPaths {
    pub fn new(dir: &Path) -> Self {
        RunPaths {
            dir: dir.to_path_buf(),
        }
    }

    pub fn config(&self) -> PathBuf {
        self.dir.join("config.json")
    }
    pub fn tokens(&self) -> PathBuf {
        self.dir.join("tokens.json")
    }
    pub fn labels(&self) -> PathBuf {
        self.dir.join("labels.json")
    }
    pub fn vocab(&self) -> PathBuf {
        self.dir.join("vocab.json")
    }
    pub fn features(&self, kind: WeightKind) -> PathBuf {
        self.dir.join(format!("features/{}.json", kind.name()))
    }
    pub fn model(&self, model: ModelKind, kind: WeightKind) -> PathBuf {
        self.dir
            .join(format!("models/{}_{}.json", model.name(), kind.name()))
    }
    pub fn report(&self, model: ModelKind, kind: WeightKind) -> PathBuf {
        self.dir
            .join(format!("reports/{}_{}.json", model.name(), kind.name()))
    }
    pub fn comparison(&self) -> PathBuf {
        self.dir.join("reports/comparison.json")
    }
    pub fn roc(&self, model: ModelKind, kind: WeightKind, label: SentimentLabel) -> PathBuf {
        self.dir.join(format!(
            "roc/{}_{}_{}.csv",
            model.name(),
            kind.name(),
            label.name()
        ))
    }
    pub fn context(&self) -> PathBuf {
        self.dir.join("context.json")
    }
    pub fn report_md(&self) -> PathBuf {
        self.dir.join("report.md")
    }
}

// ---------------------------------------------------------------------------
// Stages

/// Load the input CSV, run the text pipeline on every document, and write
/// tokens.json. Returns the dataset alongside for downstream stages.
pub fn stage_preprocess(cfg: &ExperimentConfig, paths: &RunPaths, force: bool) -> Result<TokensArtifact> {
    let schema = CsvSchema {
        id_column: cfg.id_column.clone(),
        text_column: cfg.text_column.clone(),
        label_column: cfg.label_column.clone(),
    };
    let (dataset, _warnings) = corpus::load_csv(&cfg.input, &schema)?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let pipeline = cfg.pipeline()?;
    let mut docs = Vec::with_capacity(dataset.len());
    let mut rejected = 0usize;
    for doc in &dataset.documents {
        let tokens = match preprocess_pipeline(doc, &pipeline) {
            PipelineOutcome::Tokens(ts) => Some(ts),
            PipelineOutcome::RejectedNonEnglish => {
                rejected += 1;
                None
            }
        };
        docs.push(TokenizedDoc {
            id: doc.id.clone(),
            tokens,
        });
    }
    let artifact = TokensArtifact { docs, rejected };
    write_artifact(&paths.tokens(), &cfg.hash(), &artifact, force)?;
    Ok(artifact)
}

/// Weak-label every tokenized document with the lexicon, split into
/// train/test with the seeded shuffle, and write labels.json.
pub fn stage_label(cfg: &ExperimentConfig, paths: &RunPaths, force: bool) -> Result<LabelsArtifact> {
    let tokens: Artifact<TokensArtifact> = read_artifact(&paths.tokens())?;
    let lexicon = cfg.load_lexicon()?;
    let mut labels = Vec::new();
    let mut counts: BTreeMap<String, usize> = crate::corpus::ALL_LABELS
        .iter()
        .map(|l| (l.name().to_string(), 0))
        .collect();
    let mut labeled_docs: Vec<Document> = Vec::new();
    for doc in &tokens.payload.docs {
        if let Some(ts) = &doc.tokens {
            let label =
                crate::polarity::to_label(crate::polarity::score(ts, &lexicon), cfg.neutral_band);
            labels.push((doc.id.clone(), label));
            *counts.get_mut(label.name()).unwrap() += 1;
            labeled_docs.push(Document {
                id: doc.id.clone(),
                text: String::new(),
                label: Some(label),
            });
        }
    }
    let labeled = Dataset::from_documents(labeled_docs, "weak-labeled")?;
    let (train, test) = corpus::split(&labeled, cfg.split, cfg.seed)?;
    let artifact = LabelsArtifact {
        labels,
        counts,
        rejected: tokens.payload.rejected,
        train_ids: train.documents.iter().map(|d| d.id.clone()).collect(),
        test_ids: test.documents.iter().map(|d| d.id.clone()).collect(),
    };
    write_artifact(&paths.labels(), &cfg.hash(), &artifact, force)?;
    Ok(artifact)
}

/// Everything featurize/train/evaluate/context need, resolved from the
/// tokens + labels artifacts.
pub struct ResolvedSplit {
    pub train_tokens: Vec<TokenSequence>,
    pub test_tokens: Vec<TokenSequence>,
    pub y_train: Vec<usize>,
    pub y_test: Vec<usize>,
}

pub fn resolve_split(paths: &RunPaths) -> Result<ResolvedSplit> {
    let tokens: Artifact<TokensArtifact> = read_artifact(&paths.tokens())?;
    let labels: Artifact<LabelsArtifact> = read_artifact(&paths.labels())?;
    let mut by_id: BTreeMap<&str, &TokenSequence> = BTreeMap::new();
    for doc in &tokens.payload.docs {
        if let Some(ts) = &doc.tokens {
            by_id.insert(doc.id.as_str(), ts);
        }
    }
    let label_of: BTreeMap<&str, SentimentLabel> = labels
        .payload
        .labels
        .iter()
        .map(|(id, l)| (id.as_str(), *l))
        .collect();
    let gather = |ids: &[String]| -> Result<(Vec<TokenSequence>, Vec<usize>)> {
        let mut ts = Vec::with_capacity(ids.len());
        let mut y = Vec::with_capacity(ids.len());
        for id in ids {
            let tokens = by_id
                .get(id.as_str())
                .ok_or_else(|| Error::MissingArtifact(format!("tokens for document '{id}'")))?;
            let label = label_of
                .get(id.as_str())
                .ok_or_else(|| Error::UnlabeledDocument(id.clone()))?;
            ts.push((*tokens).clone());
            y.push(label.code());
        }
        Ok((ts, y))
    };
    let (train_tokens, y_train) = gather(&labels.payload.train_ids)?;
    let (test_tokens, y_test) = gather(&labels.payload.test_ids)?;
    Ok(ResolvedSplit {
        train_tokens,
        test_tokens,
        y_train,
        y_test,
    })
}

/// Build the vocabulary from the training split and write vocab.json plus
/// one features/<kind>.json per requested extractor.
pub fn stage_featurize(cfg: &ExperimentConfig, paths: &RunPaths, force: bool) -> Result<Vocabulary> {
    let split = resolve_split(paths)?;
    let vocab = features::build_vocabulary(&split.train_tokens, cfg.min_count)?;
    write_artifact(&paths.vocab(), &cfg.hash(), &vocab, force)?;
    for kind in cfg.feature_kinds() {
        let artifact = FeaturesArtifact {
            train: features::featurize(&split.train_tokens, &vocab, kind),
            test: features::featurize(&split.test_tokens, &vocab, kind),
        };
        write_artifact(&paths.features(kind), &cfg.hash(), &artifact, force)?;
    }
    Ok(vocab)
}

fn train_one(
    cfg: &ExperimentConfig,
    model: ModelKind,
    x: &SparseFeatureMatrix,
    y: &[usize],
) -> Result<TrainedModel> {
    let h = &cfg.hyper;
    match model {
        ModelKind::NaiveBayes => naive_bayes::train(x, y, 3, h.naive_bayes),
        ModelKind::Logistic => logistic::train(x, y, 3, h.logistic),
        ModelKind::Svm => svm::train(x, y, 3, h.svm),
        ModelKind::DecisionTree => tree::train(x, y, 3, h.decision_tree),
        ModelKind::RandomForest => forest::train(x, y, 3, h.random_forest),
        ModelKind::Gbt => gbt::train(x, y, 3, h.gbt),
    }
}

/// Train every requested model on every requested extractor. Jobs run in
/// parallel on the ambient rayon pool; per-model seeding keeps results
/// independent of scheduling.
pub fn stage_train(cfg: &ExperimentConfig, paths: &RunPaths, force: bool) -> Result<()> {
    let split = resolve_split(paths)?;
    let mut matrices: BTreeMap<&'static str, FeaturesArtifact> = BTreeMap::new();
    for kind in cfg.feature_kinds() {
        let artifact: Artifact<FeaturesArtifact> = read_artifact(&paths.features(kind))?;
        matrices.insert(kind.name(), artifact.payload);
    }
    let jobs: Vec<(ModelKind, WeightKind)> = cfg
        .model_kinds()
        .into_iter()
        .flat_map(|m| cfg.feature_kinds().into_iter().map(move |f| (m, f)))
        .collect();
    let config_hash = cfg.hash();
    let results: Vec<Result<()>> = jobs
        .par_iter()
        .map(|&(model, kind)| {
            let x = &matrices[kind.name()].train;
            let trained = train_one(cfg, model, x, &split.y_train)?;
            write_artifact(&paths.model(model, kind), &config_hash, &trained, force)
        })
        .collect();
    results.into_iter().collect()
}

/// Evaluate every trained model on the held-out split; write per-pair
/// reports, ROC CSVs, and the comparison table.
pub fn stage_evaluate(cfg: &ExperimentConfig, paths: &RunPaths, force: bool) -> Result<Vec<EvaluationReport>> {
    let split = resolve_split(paths)?;
    let vocab_artifact: Artifact<Vocabulary> = read_artifact(&paths.vocab())?;
    let vocab = vocab_artifact.payload.after_deserialize();
    let test_fingerprint = format!(
        "{}:{}:{}",
        vocab.fingerprint(),
        cfg.seed,
        split.y_test.len()
    );
    let config_hash = cfg.hash();
    let mut reports = Vec::new();
    for kind in cfg.feature_kinds() {
        let features_artifact: Artifact<FeaturesArtifact> = read_artifact(&paths.features(kind))?;
        let x_test = &features_artifact.payload.test;
        for model in cfg.model_kinds() {
            let model_path = paths.model(model, kind);
            let raw = std::fs::read_to_string(&model_path)
                .map_err(|_| Error::MissingArtifact(model_path.display().to_string()))?;
            let artifact: Artifact<TrainedModel> = serde_json::from_str(&raw)?;
            let trained = artifact.payload;
            let dists = trained.predict_dist(x_test)?;
            let preds: Vec<usize> = dists.iter().map(|d| d.argmax()).collect();
            let report = eval::evaluate(
                model.name(),
                kind.name(),
                &split.y_test,
                &preds,
                &dists,
                &test_fingerprint,
            )?;
            for (code, points) in report.roc.iter().enumerate() {
                if points.is_empty() {
                    continue;
                }
                let label = SentimentLabel::from_code(code).expect("class code");
                write_text(&paths.roc(model, kind, label), &eval::roc_csv(points), force)?;
            }
            write_artifact(&paths.report(model, kind), &config_hash, &report, force)?;
            reports.push(report);
        }
    }
    let ranked = eval::compare_models(&reports)?;
    let comparison: Vec<&EvaluationReport> = ranked;
    write_artifact(&paths.comparison(), &config_hash, &comparison, force)?;
    Ok(reports)
}

/// Rank keywords on the training split, score coverage on the test split.
pub fn stage_context(cfg: &ExperimentConfig, paths: &RunPaths, force: bool) -> Result<ContextReport> {
    let split = resolve_split(paths)?;
    let group = |tokens: &[TokenSequence], y: &[usize]| {
        let mut by_label: BTreeMap<SentimentLabel, Vec<TokenSequence>> = BTreeMap::new();
        for (ts, &code) in tokens.iter().zip(y) {
            let label = SentimentLabel::from_code(code).expect("label code");
            by_label.entry(label).or_default().push(ts.clone());
        }
        by_label
    };
    let train = group(&split.train_tokens, &split.y_train);
    let test = group(&split.test_tokens, &split.y_test);
    let importance = if cfg.distinctive_keywords {
        ImportanceKind::FrequencyIdf
    } else {
        ImportanceKind::Frequency
    };
    let report = build_context_report(&train, &test, cfg.k, importance)?;
    write_artifact(&paths.context(), &cfg.hash(), &report, force)?;
    Ok(report)
}

/// Assemble report.md from the run's artifacts.
pub fn stage_report(cfg: &ExperimentConfig, paths: &RunPaths, force: bool) -> Result<String> {
    let labels: Artifact<LabelsArtifact> = read_artifact(&paths.labels())?;
    let mut reports = Vec::new();
    for kind in cfg.feature_kinds() {
        for model in cfg.model_kinds() {
            let artifact: Artifact<EvaluationReport> = read_artifact(&paths.report(model, kind))?;
            reports.push(artifact.payload);
        }
    }
    let context: Artifact<ContextReport> = read_artifact(&paths.context())?;

    let mut md = String::from("# Experiment report\n\n");
    md.push_str(&format!("Config hash: `{}`\n\n", cfg.hash()));

    md.push_str("## Sentiment distribution (weak labels)\n\n");
    md.push_str("| Label | Count |\n|---|---|\n");
    let total: usize = labels.payload.counts.values().sum();
    for (label, count) in &labels.payload.counts {
        md.push_str(&format!("| {label} | {count} |\n"));
    }
    md.push_str(&format!(
        "\n{total} documents labeled, {} rejected as non-English.\n\n",
        labels.payload.rejected
    ));

    md.push_str("## Model comparison\n\n");
    md.push_str(&eval::comparison_markdown(&reports)?);

    md.push_str("## Macro AUC\n\n| Model | Features | Macro AUC |\n|---|---|---|\n");
    for r in &reports {
        if let Some(auc) = r.macro_auc {
            md.push_str(&format!(
                "| {} | {} | {:.3} |\n",
                r.model_kind, r.feature_kind, auc
            ));
        }
    }
    md.push('\n');

    md.push_str(&format!(
        "## Top-{} keywords per sentiment\n\n",
        context.payload.k
    ));
    for (label, ctx) in &context.payload.per_label {
        let terms: Vec<&str> = ctx
            .top_keywords
            .iter()
            .take(15)
            .map(|(t, _)| t.as_str())
            .collect();
        let accuracy = match ctx.accuracy {
            Some(a) => format!("{:.1}%", a * 100.0),
            None => "n/a (no held-out documents)".to_string(),
        };
        md.push_str(&format!(
            "- **{label}** (context accuracy {accuracy}): {}\n",
            terms.join(", ")
        ));
    }
    md.push('\n');

    write_text(&paths.report_md(), &md, force)?;
    Ok(md)
}

/// The whole pipeline in order, wrapped with stage names for diagnostics.
pub fn run_experiment(cfg: &ExperimentConfig, force: bool) -> Result<()> {
    cfg.validate()?;
    let paths = RunPaths::new(&cfg.out);
    write_artifact(&paths.config(), &cfg.hash(), cfg, force)
        .map_err(|e| e.in_stage("config"))?;
    stage_preprocess(cfg, &paths, force).map_err(|e| e.in_stage("preprocess"))?;
    stage_label(cfg, &paths, force).map_err(|e| e.in_stage("label"))?;
    stage_featurize(cfg, &paths, force).map_err(|e| e.in_stage("featurize"))?;
    stage_train(cfg, &paths, force).map_err(|e| e.in_stage("train"))?;
    stage_evaluate(cfg, &paths, force).map_err(|e| e.in_stage("evaluate"))?;
    stage_context(cfg, &paths, force).map_err(|e| e.in_stage("context"))?;
    stage_report(cfg, &paths, force).map_err(|e| e.in_stage("report"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn bad_fraction_rejected_pre_run() {
        let cfg = ExperimentConfig {
            split: 1.0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::BadSplitFraction(_))));
    }

    #[test]
    fn unknown_model_rejected() {
        let cfg = ExperimentConfig {
            models: vec!["perceptron".into()],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn config_hash_stable_and_sensitive() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig::default();
        assert_eq!(a.hash(), b.hash());
        let c = ExperimentConfig {
            seed: 7,
            ..Default::default()
        };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn toml_round_trip_with_defaults() {
        let cfg = ExperimentConfig::from_toml(
            r#"
input = "data/fixture.csv"
seed = 7
min_count = 3
models = ["rf", "nb"]
"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.min_count, 3);
        assert_eq!(cfg.model_kinds(), vec![ModelKind::RandomForest, ModelKind::NaiveBayes]);
        assert_eq!(cfg.split, 0.8); // default fills in
    }

    #[test]
    fn artifact_overwrite_needs_force() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        write_artifact(&path, "h", &1u32, false).unwrap();
        assert!(matches!(
            write_artifact(&path, "h", &2u32, false),
            Err(Error::WouldOverwrite(_))
        ));
        write_artifact(&path, "h", &2u32, true).unwrap();
        let back: Artifact<u32> = read_artifact(&path).unwrap();
        assert_eq!(back.payload, 2);
    }

    #[test]
    fn missing_artifact_names_file() {
        let err = read_artifact::<u32>(Path::new("/nonexistent/tokens.json")).unwrap_err();
        assert!(matches!(err, Error::MissingArtifact(p) if p.contains("tokens.json")));
    }
}
