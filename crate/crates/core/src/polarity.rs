//! Lexicon-based polarity scoring used for weak sentiment labeling.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, SentimentLabel};
use crate::error::{Error, Result};
use crate::preprocess::{preprocess_pipeline, PipelineConfig, PipelineOutcome, TokenSequence};

pub const BUNDLED_LEXICON: &str = include_str!("../resources/lexicon.tsv");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolarityLexicon {
    pub entries: HashMap<String, f64>,
    pub name: String,
    pub version: String,
}

impl PolarityLexicon {
    /// Parse `term<TAB>polarity` lines; `#` starts a comment.
    /// Values are clamped-checked to [-1, 1]; terms must be pre-stemmed
    /// with the same stemmer as the pipeline.
    pub fn parse(raw: &str, name: &str, version: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let term = parts
                .next()
                .filter(|t| !t.is_empty())
                .ok_or_else(|| Error::Config(format!("lexicon line {}: missing term", lineno + 1)))?;
            let value: f64 = parts
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| {
                    Error::Config(format!("lexicon line {}: bad polarity value", lineno + 1))
                })?;
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::Config(format!(
                    "lexicon line {}: polarity {} outside [-1, 1]",
                    lineno + 1,
                    value
                )));
            }
            entries.insert(term.to_string(), value);
        }
        Ok(PolarityLexicon {
            entries,
            name: name.to_string(),
            version: version.to_string(),
        })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON, "bundled-seed", "1").expect("bundled lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&raw, &path.display().to_string(), "custom")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityScore {
    pub value: f64,
    pub matched_terms: usize,
}

/// Arithmetic mean of lexicon polarities over matched tokens, with
/// multiplicity. Zero when nothing matches.
pub fn score(tokens: &TokenSequence, lex: &PolarityLexicon) -> PolarityScore {
    let mut sum = 0.0;
    let mut matched = 0usize;
    for token in &tokens.tokens {
        if let Some(&v) = lex.entries.get(token.as_str()) {
            sum += v;
            matched += 1;
        }
    }
    PolarityScore {
        value: if matched == 0 { 0.0 } else { sum / matched as f64 },
        matched_terms: matched,
    }
}

/// Strict-sign labeling with an optional neutral band: values within
/// [-band, +band] are Neutral. Exactly 0.0 is always Neutral.
pub fn to_label(s: PolarityScore, neutral_band: f64) -> SentimentLabel {
    debug_assert!(neutral_band >= 0.0);
    if s.value > neutral_band {
        SentimentLabel::Positive
    } else if s.value < -neutral_band {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakLabelReport {
    pub labeled: usize,
    pub rejected: usize,
    pub counts: std::collections::BTreeMap<String, usize>,
}

/// Preprocess and weak-label every document. Rejected (non-English)
/// documents keep their original label slot empty and are counted.
pub fn weak_label_dataset(
    d: &Dataset,
    cfg: &PipelineConfig,
    lex: &PolarityLexicon,
    band: f64,
) -> (Dataset, WeakLabelReport) {
    let mut out = d.clone();
    let mut report = WeakLabelReport {
        labeled: 0,
        rejected: 0,
        counts: crate::corpus::ALL_LABELS
            .iter()
            .map(|l| (l.name().to_string(), 0))
            .collect(),
    };
    for doc in &mut out.documents {
        match preprocess_pipeline(doc, cfg) {
            PipelineOutcome::Tokens(ts) => {
                let label = to_label(score(&ts, lex), band);
                doc.label = Some(label);
                report.labeled += 1;
                *report.counts.get_mut(label.name()).unwrap() += 1;
            }
            PipelineOutcome::RejectedNonEnglish => {
                doc.label = None;
                report.rejected += 1;
            }
        }
    }
    (out, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn toy_lexicon() -> PolarityLexicon {
        PolarityLexicon::parse("good\t0.7\nbad\t-0.6\n", "toy", "1").unwrap()
    }

    fn seq(tokens: &[&str]) -> TokenSequence {
        TokenSequence::from_tokens(tokens.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn no_match_is_zero() {
        let s = score(&seq(&["virus", "spread"]), &toy_lexicon());
        assert_eq!(s.value, 0.0);
        assert_eq!(s.matched_terms, 0);
    }

    #[test]
    fn mean_with_multiplicity() {
        let s = score(&seq(&["good", "good", "bad"]), &toy_lexicon());
        assert!((s.value - (0.7 + 0.7 - 0.6) / 3.0).abs() < 1e-12);
        assert_eq!(s.matched_terms, 3);
    }

    #[test]
    fn single_match_mean() {
        let s = score(&seq(&["bad"]), &toy_lexicon());
        assert!((s.value - (-0.6)).abs() < 1e-12);
    }

    #[test]
    fn labeling_thresholds() {
        let mk = |v| PolarityScore {
            value: v,
            matched_terms: 1,
        };
        assert_eq!(to_label(mk(0.0), 0.0), SentimentLabel::Neutral);
        assert_eq!(to_label(mk(0.2667), 0.0), SentimentLabel::Positive);
        assert_eq!(to_label(mk(-0.05), 0.1), SentimentLabel::Neutral);
        assert_eq!(to_label(mk(-0.05), 0.0), SentimentLabel::Negative);
    }

    #[test]
    fn bundled_lexicon_parses_and_is_bounded() {
        let lex = PolarityLexicon::bundled();
        assert!(lex.entries.len() >= 400, "got {}", lex.entries.len());
        assert!(lex.entries.values().all(|v| (-1.0..=1.0).contains(v)));
        // terms are pre-stemmed pipeline outputs: lowercase alphabetic.
        // (Stemming again is not required to be a fixed point — the
        // stemmer itself is not idempotent, e.g. repulsive -> repuls.)
        for term in lex.entries.keys() {
            assert!(
                term.bytes().all(|b| b.is_ascii_lowercase()),
                "lexicon term not a pipeline stem: {term}"
            );
        }
    }

    #[test]
    fn weak_labeling_counts() {
        let docs = vec![
            Document {
                id: "1".into(),
                text: "we love the great vaccine news today".into(),
                label: None,
            },
            Document {
                id: "2".into(),
                text: "the train will arrive at the station".into(),
                label: None,
            },
            Document {
                id: "3".into(),
                text: "zzq qqz zqq xxj jjx".into(),
                label: None,
            },
        ];
        let d = Dataset::from_documents(docs, "toy").unwrap();
        let (labeled, report) = weak_label_dataset(
            &d,
            &PipelineConfig::default(),
            &PolarityLexicon::bundled(),
            0.0,
        );
        assert_eq!(report.labeled, 2);
        assert_eq!(report.rejected, 1);
        assert_eq!(labeled.documents[0].label, Some(SentimentLabel::Positive));
        assert_eq!(labeled.documents[1].label, Some(SentimentLabel::Neutral));
        assert_eq!(labeled.documents[2].label, None);
    }

    #[test]
    fn empty_dataset_weak_label() {
        let d = Dataset::from_documents(vec![], "toy").unwrap();
        let (out, report) = weak_label_dataset(
            &d,
            &PipelineConfig::default(),
            &toy_lexicon(),
            0.0,
        );
        assert!(out.is_empty());
        assert_eq!(report.labeled + report.rejected, 0);
    }
}
