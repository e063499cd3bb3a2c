//! Dataset loading, validation and splitting.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three sentiment classes. Integer codes are stable:
/// 0 = Negative, 1 = Neutral, 2 = Positive, used everywhere for matrix indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

pub const ALL_LABELS: [SentimentLabel; 3] = [
    SentimentLabel::Negative,
    SentimentLabel::Neutral,
    SentimentLabel::Positive,
];

impl SentimentLabel {
    pub fn code(self) -> usize {
        match self {
            SentimentLabel::Negative => 0,
            SentimentLabel::Neutral => 1,
            SentimentLabel::Positive => 2,
        }
    }

    pub fn from_code(code: usize) -> Option<Self> {
        match code {
            0 => Some(SentimentLabel::Negative),
            1 => Some(SentimentLabel::Neutral),
            2 => Some(SentimentLabel::Positive),
            _ => None,
        }
    }

    /// Case-insensitive parse of a label cell; accepts the names and
    /// their integer codes. Anything else is `None`.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "negative" | "0" => Some(SentimentLabel::Negative),
            "neutral" | "1" => Some(SentimentLabel::Neutral),
            "positive" | "2" => Some(SentimentLabel::Positive),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Positive => "positive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Option<SentimentLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    /// Unix seconds at load time. Informational only; never hashed into
    /// run artifacts so reruns stay byte-identical.
    pub loaded_at: u64,
}

/// Immutable after load; iteration order is load order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub documents: Vec<Document>,
    pub provenance: Provenance,
}

/// Column-name mapping for CSV ingestion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    pub id_column: String,
    pub text_column: String,
    pub label_column: Option<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            id_column: "id".into(),
            text_column: "text".into(),
            label_column: Some("label".into()),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LoadWarnings {
    pub unparseable_labels: usize,
    pub empty_texts: usize,
    pub messages: Vec<String>,
}

impl Dataset {
    pub fn from_documents(documents: Vec<Document>, source: &str) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if doc.id.is_empty() {
                return Err(Error::DuplicateId(String::from("<empty id>")));
            }
            if !seen.insert(doc.id.clone()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Dataset {
            documents,
            provenance: Provenance {
                source: source.to_string(),
                loaded_at: std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            },
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// Load a dataset from RFC-4180 CSV with a header row.
///
/// Rows whose label cell fails to parse load as unlabeled and are counted
/// in the returned warnings. Duplicate ids are fatal.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<(Dataset, LoadWarnings)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path.display().to_string(), std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string())),
            _ => Error::Csv(e),
        })?;

    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let id_idx = col(&schema.id_column)?;
    let text_idx = col(&schema.text_column)?;
    let label_idx = match &schema.label_column {
        Some(name) => headers.iter().position(|h| h == name.as_str()),
        None => None,
    };

    let mut documents = Vec::new();
    let mut warnings = LoadWarnings::default();
    let mut seen = HashSet::new();

    for record in reader.records() {
        let record = record?;
        let id = record.get(id_idx).unwrap_or("").to_string();
        let text = record.get(text_idx).unwrap_or("").to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let label = match label_idx {
            Some(idx) => {
                let cell = record.get(idx).unwrap_or("");
                if cell.trim().is_empty() {
                    None
                } else {
                    let parsed = SentimentLabel::parse(cell);
                    if parsed.is_none() {
                        warnings.unparseable_labels += 1;
                        warnings
                            .messages
                            .push(format!("row id={id}: unparseable label '{cell}'"));
                    }
                    parsed
                }
            }
            None => None,
        };
        if text.is_empty() {
            warnings.empty_texts += 1;
        }
        documents.push(Document { id, text, label });
    }

    let dataset = Dataset {
        documents,
        provenance: Provenance {
            source: path.display().to_string(),
            loaded_at: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
    };
    Ok((dataset, warnings))
}

/// Seeded Fisher-Yates shuffle over document indices, then cut at
/// round(train_fraction * n). Deterministic for a fixed seed.
pub fn split(d: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadSplitFraction(train_fraction));
    }
    let n = d.len();
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let train_size = (train_fraction * n as f64).round() as usize;
    let take = |idxs: &[usize]| Dataset {
        documents: idxs.iter().map(|&i| d.documents[i].clone()).collect(),
        provenance: d.provenance.clone(),
    };
    Ok((take(&indices[..train_size]), take(&indices[train_size..])))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub counts: BTreeMap<String, usize>,
    pub percentages: BTreeMap<String, f64>,
    pub total: usize,
}

/// Per-label counts and rounded percentages. Errors if any document is unlabeled.
pub fn label_distribution(d: &Dataset) -> Result<LabelDistribution> {
    let mut counts: BTreeMap<String, usize> = ALL_LABELS
        .iter()
        .map(|l| (l.name().to_string(), 0))
        .collect();
    for doc in &d.documents {
        let label = doc
            .label
            .ok_or_else(|| Error::UnlabeledDocument(doc.id.clone()))?;
        *counts.get_mut(label.name()).unwrap() += 1;
    }
    let total = d.len();
    let percentages = counts
        .iter()
        .map(|(k, &v)| (k.clone(), (v as f64 / total as f64 * 100.0 * 100.0).round() / 100.0))
        .collect();
    Ok(LabelDistribution {
        counts,
        percentages,
        total,
    })
}

/// Summary JSON emitted by the CLI: {"total", "labeled", "counts", "warnings"}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub total: usize,
    pub labeled: usize,
    pub counts: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

pub fn summarize(d: &Dataset, warnings: &LoadWarnings) -> DatasetSummary {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut labeled = 0;
    for doc in &d.documents {
        if let Some(label) = doc.label {
            labeled += 1;
            *counts.entry(label.name().to_string()).or_insert(0) += 1;
        }
    }
    DatasetSummary {
        total: d.len(),
        labeled,
        counts,
        warnings: warnings.messages.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn toy_dataset(n: usize) -> Dataset {
        let docs = (0..n)
            .map(|i| Document {
                id: format!("d{i}"),
                text: format!("text {i}"),
                label: Some(ALL_LABELS[i % 3]),
            })
            .collect();
        Dataset::from_documents(docs, "toy").unwrap()
    }

    #[test]
    fn load_unlabeled_rows() {
        let f = write_csv("id,text\na,hello\nb,world\nc,again\n");
        let schema = CsvSchema {
            label_column: None,
            ..Default::default()
        };
        let (d, w) = load_csv(f.path(), &schema).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.documents.iter().all(|doc| doc.label.is_none()));
        assert_eq!(w.unparseable_labels, 0);
    }

    #[test]
    fn label_parse_case_insensitive() {
        let f = write_csv("id,text,label\na,hi,POSITIVE\nb,yo,Negative\nc,eh,2\n");
        let (d, _) = load_csv(f.path(), &CsvSchema::default()).unwrap();
        assert_eq!(d.documents[0].label, Some(SentimentLabel::Positive));
        assert_eq!(d.documents[1].label, Some(SentimentLabel::Negative));
        assert_eq!(d.documents[2].label, Some(SentimentLabel::Positive));
    }

    #[test]
    fn unparseable_label_warns_not_fails() {
        let f = write_csv("id,text,label\na,hi,meh\nb,yo,positive\n");
        let (d, w) = load_csv(f.path(), &CsvSchema::default()).unwrap();
        assert_eq!(d.documents[0].label, None);
        assert_eq!(w.unparseable_labels, 1);
    }

    #[test]
    fn duplicate_id_fatal() {
        let f = write_csv("id,text\na,hi\na,again\n");
        let schema = CsvSchema {
            label_column: None,
            ..Default::default()
        };
        let err = load_csv(f.path(), &schema).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(id) if id == "a"));
    }

    #[test]
    fn missing_column_fatal() {
        let f = write_csv("id,body\na,hi\n");
        let schema = CsvSchema {
            label_column: None,
            ..Default::default()
        };
        let err = load_csv(f.path(), &schema).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "text"));
    }

    #[test]
    fn split_sizes() {
        let d = toy_dataset(10);
        let (train, test) = split(&d, 0.8, 7).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
    }

    #[test]
    fn split_large_corpus_sizes() {
        // round(0.8 * 357526) = 286021, remainder 71505
        let n: usize = 357526;
        let train = (0.8 * n as f64).round() as usize;
        assert_eq!(train, 286021);
        assert_eq!(n - train, 71505);
    }

    #[test]
    fn split_deterministic_partition() {
        let d = toy_dataset(37);
        let (tr1, te1) = split(&d, 0.8, 7).unwrap();
        let (tr2, te2) = split(&d, 0.8, 7).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);

        let mut ids: Vec<&str> = tr1
            .documents
            .iter()
            .chain(te1.documents.iter())
            .map(|doc| doc.id.as_str())
            .collect();
        ids.sort_unstable();
        let mut orig: Vec<&str> = d.documents.iter().map(|doc| doc.id.as_str()).collect();
        orig.sort_unstable();
        assert_eq!(ids, orig);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let d = toy_dataset(4);
        assert!(matches!(split(&d, 0.0, 1), Err(Error::BadSplitFraction(_))));
        assert!(matches!(split(&d, 1.0, 1), Err(Error::BadSplitFraction(_))));
    }

    #[test]
    fn distribution_large_corpus_counts() {
        let mut docs = Vec::new();
        let mut push = |n: usize, label: SentimentLabel, tag: &str| {
            for i in 0..n {
                docs.push(Document {
                    id: format!("{tag}{i}"),
                    text: String::new(),
                    label: Some(label),
                });
            }
        };
        push(52856, SentimentLabel::Negative, "n");
        push(179036, SentimentLabel::Neutral, "u");
        push(125634, SentimentLabel::Positive, "p");
        let d = Dataset::from_documents(docs, "reference").unwrap();
        let dist = label_distribution(&d).unwrap();
        assert_eq!(dist.total, 357526);
        assert_eq!(dist.percentages["negative"].round() as i64, 15);
        assert_eq!(dist.percentages["neutral"].round() as i64, 50);
        assert_eq!(dist.percentages["positive"].round() as i64, 35);
    }

    #[test]
    fn distribution_hand_counts() {
        let docs = vec![
            ("a", SentimentLabel::Negative),
            ("b", SentimentLabel::Neutral),
            ("c", SentimentLabel::Neutral),
            ("d", SentimentLabel::Positive),
        ]
        .into_iter()
        .map(|(id, l)| Document {
            id: id.into(),
            text: String::new(),
            label: Some(l),
        })
        .collect();
        let d = Dataset::from_documents(docs, "toy").unwrap();
        let dist = label_distribution(&d).unwrap();
        assert_eq!(dist.percentages["negative"], 25.0);
        assert_eq!(dist.percentages["neutral"], 50.0);
        assert_eq!(dist.percentages["positive"], 25.0);
        let pct_sum: f64 = dist.percentages.values().sum();
        assert!((pct_sum - 100.0).abs() < 1e-9);
    }

    #[test]
    fn distribution_rejects_unlabeled() {
        let docs = vec![Document {
            id: "a".into(),
            text: String::new(),
            label: None,
        }];
        let d = Dataset::from_documents(docs, "toy").unwrap();
        assert!(matches!(
            label_distribution(&d),
            Err(Error::UnlabeledDocument(_))
        ));
    }

    #[test]
    fn single_doc_distribution() {
        let d = toy_dataset(1);
        let dist = label_distribution(&d).unwrap();
        assert_eq!(dist.percentages["negative"], 100.0);
    }
}
