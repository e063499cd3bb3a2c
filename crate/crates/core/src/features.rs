//! Vocabulary construction and BoW / TF-IDF featurization.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::preprocess::TokenSequence;

/// Term -> dense index map with document frequencies.
///
/// Admission requires total corpus occurrences >= min_count. Index
/// assignment is by descending total frequency, lexicographic tie-break,
/// so identical corpora always yield identical vocabularies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: BTreeMap<String, TermEntry>,
    pub document_count: usize,
    pub min_count: usize,
    #[serde(skip)]
    index_to_term: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TermEntry {
    pub index: usize,
    pub document_frequency: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.get(term).map(|e| e.index)
    }

    pub fn term_at(&self, index: usize) -> Option<&str> {
        self.index_to_term.get(index).map(String::as_str)
    }

    fn rebuild_index(&mut self) {
        let mut v = vec![String::new(); self.terms.len()];
        for (term, entry) in &self.terms {
            v[entry.index] = term.clone();
        }
        self.index_to_term = v;
    }

    pub fn after_deserialize(mut self) -> Self {
        self.rebuild_index();
        self
    }

    /// Stable identity of (terms, indices, dfs, N); used to refuse
    /// predicting with mismatched features.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.document_count.to_le_bytes());
        for (term, entry) in &self.terms {
            hasher.update(term.as_bytes());
            hasher.update([0u8]);
            hasher.update(entry.index.to_le_bytes());
            hasher.update(entry.document_frequency.to_le_bytes());
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Build the vocabulary from TRAINING documents only.
pub fn build_vocabulary(train_docs: &[TokenSequence], min_count: usize) -> Result<Vocabulary> {
    if train_docs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total: HashMap<&str, usize> = HashMap::new();
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in train_docs {
        let mut seen: HashMap<&str, bool> = HashMap::new();
        for token in &doc.tokens {
            *total.entry(token.as_str()).or_insert(0) += 1;
            seen.entry(token.as_str()).or_insert(true);
        }
        for term in seen.keys() {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let mut admitted: Vec<(&str, usize)> = total
        .iter()
        .filter(|(_, &count)| count >= min_count)
        .map(|(&term, &count)| (term, count))
        .collect();
    if admitted.is_empty() {
        return Err(Error::EmptyVocabulary(min_count));
    }
    // descending frequency, then lexicographic
    admitted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let terms: BTreeMap<String, TermEntry> = admitted
        .iter()
        .enumerate()
        .map(|(index, &(term, _))| {
            (
                term.to_string(),
                TermEntry {
                    index,
                    document_frequency: df[term],
                },
            )
        })
        .collect();
    let mut vocab = Vocabulary {
        terms,
        document_count: train_docs.len(),
        min_count,
        index_to_term: Vec::new(),
    };
    vocab.rebuild_index();
    Ok(vocab)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Count,
    Tfidf,
}

impl WeightKind {
    pub fn name(self) -> &'static str {
        match self {
            WeightKind::Count => "bow",
            WeightKind::Tfidf => "tfidf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bow" | "count" => Some(WeightKind::Count),
            "tfidf" | "tf-idf" => Some(WeightKind::Tfidf),
            _ => None,
        }
    }
}

/// Row-per-document sparse matrix. No explicit zeros; column indices
/// strictly increasing within each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseFeatureMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub n_columns: usize,
    pub kind: WeightKind,
    pub vocabulary_fingerprint: String,
}

impl SparseFeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.rows[row]
            .binary_search_by_key(&col, |&(i, _)| i)
            .map(|pos| self.rows[row][pos].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; self.n_columns];
                for &(i, w) in row {
                    dense[i] = w;
                }
                dense
            })
            .collect()
    }

    /// MatrixMarket-style coordinate text (1-based indices) for debugging.
    pub fn to_coordinate_text(&self) -> String {
        let nnz: usize = self.rows.iter().map(Vec::len).sum();
        let mut out = format!(
            "%%MatrixMarket matrix coordinate real general\n{} {} {}\n",
            self.n_rows(),
            self.n_columns,
            nnz
        );
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, w) in row {
                out.push_str(&format!("{} {} {}\n", r + 1, c + 1, w));
            }
        }
        out
    }
}

/// Sparse count row; out-of-vocabulary tokens are ignored.
pub fn bow_vector(doc: &TokenSequence, vocab: &Vocabulary) -> Vec<(usize, f64)> {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for token in &doc.tokens {
        if let Some(idx) = vocab.index_of(token) {
            *counts.entry(idx).or_insert(0.0) += 1.0;
        }
    }
    counts.into_iter().collect()
}

pub fn bow_matrix(docs: &[TokenSequence], vocab: &Vocabulary) -> SparseFeatureMatrix {
    SparseFeatureMatrix {
        rows: docs.iter().map(|d| bow_vector(d, vocab)).collect(),
        n_columns: vocab.len(),
        kind: WeightKind::Count,
        vocabulary_fingerprint: vocab.fingerprint(),
    }
}

/// Term frequency: occurrences of t divided by total token count of d,
/// counting ALL tokens (including out-of-vocabulary ones) in the
/// denominator. Empty document -> 0.
pub fn tf(term: &str, doc: &TokenSequence) -> f64 {
    if doc.tokens.is_empty() {
        return 0.0;
    }
    let count = doc.tokens.iter().filter(|t| t.as_str() == term).count();
    count as f64 / doc.tokens.len() as f64
}

/// Inverse document frequency: ln(N / df). Requires the term to be
/// in the vocabulary, where df >= 1 always holds.
pub fn idf(term: &str, vocab: &Vocabulary) -> Result<f64> {
    let entry = vocab
        .terms
        .get(term)
        .ok_or_else(|| Error::UnknownTerm(term.to_string()))?;
    Ok((vocab.document_count as f64 / entry.document_frequency as f64).ln())
}

/// TF-IDF matrix: entry (d, t) = tf(t, d) * idf(t). Entries that are
/// semantically zero (tf = 0 or idf = 0) are omitted from storage.
pub fn tfidf_matrix(docs: &[TokenSequence], vocab: &Vocabulary) -> SparseFeatureMatrix {
    let rows = docs
        .iter()
        .map(|doc| {
            let total = doc.tokens.len();
            if total == 0 {
                return Vec::new();
            }
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for token in &doc.tokens {
                if let Some(idx) = vocab.index_of(token) {
                    *counts.entry(idx).or_insert(0) += 1;
                }
            }
            counts
                .into_iter()
                .filter_map(|(idx, count)| {
                    let term = vocab.term_at(idx).expect("index valid");
                    let weight = count as f64 / total as f64
                        * idf(term, vocab).expect("in-vocabulary term");
                    (weight != 0.0).then_some((idx, weight))
                })
                .collect()
        })
        .collect();
    SparseFeatureMatrix {
        rows,
        n_columns: vocab.len(),
        kind: WeightKind::Tfidf,
        vocabulary_fingerprint: vocab.fingerprint(),
    }
}

pub fn featurize(
    docs: &[TokenSequence],
    vocab: &Vocabulary,
    kind: WeightKind,
) -> SparseFeatureMatrix {
    match kind {
        WeightKind::Count => bow_matrix(docs, vocab),
        WeightKind::Tfidf => tfidf_matrix(docs, vocab),
    }
}
