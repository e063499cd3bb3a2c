//! Second-layer keyword learning: rank stems by importance within each
//! sentiment, keep the top k, and measure how well those keywords cover
//! held-out documents of the same sentiment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::SentimentLabel;
use crate::error::{Error, Result};
use crate::preprocess::TokenSequence;

/// Which label a ranking describes, or the whole corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankingScope {
    Label(SentimentLabel),
    Overall,
}

/// How importance is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceKind {
    /// Raw within-scope term frequency.
    #[default]
    Frequency,
    /// Frequency scaled by ln(L / l_t) where l_t is the number of labels
    /// whose documents contain the term — favors label-distinctive stems.
    FrequencyIdf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordRanking {
    pub scope: RankingScope,
    pub kind: ImportanceKind,
    /// (term, importance), non-increasing importance, lexicographic ties.
    pub entries: Vec<(String, f64)>,
}

/// Importance = total occurrence count of each stem across the scope's
/// documents, sorted descending with lexicographic tie-break.
pub fn rank_keywords(docs: &[TokenSequence], scope: RankingScope) -> Result<KeywordRanking> {
    if docs.is_empty() {
        return Err(Error::EmptyInput("rank_keywords"));
    }
    let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
    for doc in docs {
        for token in &doc.tokens {
            *counts.entry(token.as_str()).or_insert(0.0) += 1.0;
        }
    }
    Ok(sorted_ranking(counts, scope, ImportanceKind::Frequency))
}

/// Distinctiveness variant: within-label frequency scaled by an IDF over
/// labels. `docs_by_label` holds every label's training documents; the
/// returned ranking is for `scope`, which must appear in the map.
pub fn rank_keywords_distinctive(
    docs_by_label: &BTreeMap<SentimentLabel, Vec<TokenSequence>>,
    scope: SentimentLabel,
) -> Result<KeywordRanking> {
    let docs = docs_by_label
        .get(&scope)
        .filter(|d| !d.is_empty())
        .ok_or(Error::EmptyInput("rank_keywords_distinctive"))?;
    let n_labels = docs_by_label.len() as f64;
    let mut label_df: BTreeMap<&str, f64> = BTreeMap::new();
    for label_docs in docs_by_label.values() {
        let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
        for doc in label_docs {
            for token in &doc.tokens {
                seen.entry(token.as_str()).or_insert(());
            }
        }
        for term in seen.keys() {
            *label_df.entry(term).or_insert(0.0) += 1.0;
        }
    }
    let mut weighted: BTreeMap<&str, f64> = BTreeMap::new();
    for doc in docs {
        for token in &doc.tokens {
            *weighted.entry(token.as_str()).or_insert(0.0) += 1.0;
        }
    }
    // smoothed so terms present in every label keep a small positive weight
    for (term, w) in weighted.iter_mut() {
        *w *= ((n_labels + 1.0) / (label_df[term] + 1.0)).ln() + 1.0;
    }
    Ok(sorted_ranking(
        weighted,
        RankingScope::Label(scope),
        ImportanceKind::FrequencyIdf,
    ))
}

fn sorted_ranking(
    counts: BTreeMap<&str, f64>,
    scope: RankingScope,
    kind: ImportanceKind,
) -> KeywordRanking {
    let mut entries: Vec<(String, f64)> = counts
        .into_iter()
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    entries.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| a.0.cmp(&b.0))
    });
    KeywordRanking {
        scope,
        kind,
        entries,
    }
}

/// First min(k, len) entries, order preserved.
pub fn top_k(r: &KeywordRanking, k: usize) -> Result<KeywordRanking> {
    if k == 0 {
        return Err(Error::BadHyperparameter("k must be >= 1".into()));
    }
    Ok(KeywordRanking {
        scope: r.scope,
        kind: r.kind,
        entries: r.entries.iter().take(k).cloned().collect(),
    })
}

/// Coverage accuracy: the fraction of held-out documents containing at
/// least one of the ranking's terms.
pub fn context_accuracy(topk: &KeywordRanking, held_out: &[TokenSequence]) -> Result<f64> {
    if held_out.is_empty() {
        return Err(Error::EmptyInput("context_accuracy"));
    }
    let covered = held_out
        .iter()
        .filter(|doc| {
            doc.tokens
                .iter()
                .any(|t| topk.entries.iter().any(|(term, _)| term == t))
        })
        .count();
    Ok(covered as f64 / held_out.len() as f64)
}

/// Top-k terms as a {term: importance} map for wordcloud rendering.
pub fn export_frequencies(r: &KeywordRanking, k: usize) -> BTreeMap<String, f64> {
    r.entries
        .iter()
        .take(k)
        .map(|(t, c)| (t.clone(), *c))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelContext {
    pub top_keywords: Vec<(String, f64)>,
    pub accuracy: Option<f64>,
    pub held_out_documents: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextReport {
    pub k: usize,
    pub importance: ImportanceKind,
    pub per_label: BTreeMap<String, LabelContext>,
    pub overall_top_keywords: Vec<(String, f64)>,
}

/// Rankings come from the training split; coverage accuracy from the test
/// split, so keywords are never scored against the documents that chose
/// them. Labels with no held-out documents report accuracy = None.
pub fn build_context_report(
    train: &BTreeMap<SentimentLabel, Vec<TokenSequence>>,
    test: &BTreeMap<SentimentLabel, Vec<TokenSequence>>,
    k: usize,
    importance: ImportanceKind,
) -> Result<ContextReport> {
    if k == 0 {
        return Err(Error::BadHyperparameter("k must be >= 1".into()));
    }
    let mut per_label = BTreeMap::new();
    let mut all_train: Vec<TokenSequence> = Vec::new();
    for (&label, docs) in train {
        if docs.is_empty() {
            continue;
        }
        all_train.extend(docs.iter().cloned());
        let ranking = match importance {
            ImportanceKind::Frequency => rank_keywords(docs, RankingScope::Label(label))?,
            ImportanceKind::FrequencyIdf => rank_keywords_distinctive(train, label)?,
        };
        let topk = top_k(&ranking, k)?;
        let held_out = test.get(&label).map(|d| d.as_slice()).unwrap_or(&[]);
        let accuracy = if held_out.is_empty() {
            None
        } else {
            Some(context_accuracy(&topk, held_out)?)
        };
        per_label.insert(
            label.name().to_string(),
            LabelContext {
                top_keywords: topk.entries,
                accuracy,
                held_out_documents: held_out.len(),
            },
        );
    }
    if all_train.is_empty() {
        return Err(Error::EmptyInput("build_context_report"));
    }
    let overall = top_k(&rank_keywords(&all_train, RankingScope::Overall)?, k)?;
    Ok(ContextReport {
        k,
        importance,
        per_label,
        overall_top_keywords: overall.entries,
    })
}

/// Optional CSV export: rank,term,importance.
pub fn ranking_csv(r: &KeywordRanking) -> String {
    let mut out = String::from("rank,term,importance\n");
    for (i, (term, importance)) in r.entries.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, term, importance));
    }
    out
}
