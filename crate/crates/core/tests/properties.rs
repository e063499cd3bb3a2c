//! Property tests for the documented invariants.

use std::collections::BTreeMap;

use proptest::prelude::*;

use sentigraph::context::{rank_keywords, top_k, RankingScope};
use sentigraph::corpus::{split, Dataset, Document, SentimentLabel, ALL_LABELS};
use sentigraph::eval::{confusion, metrics};
use sentigraph::features::{build_vocabulary, tf, tfidf_matrix};
use sentigraph::models::softmax;
use sentigraph::polarity::{score, PolarityLexicon};
use sentigraph::preprocess::{
    clean_text, preprocess_pipeline, PipelineConfig, PipelineOutcome, TokenSequence,
};

fn token_strategy() -> impl Strategy<Value = String> {
    "[a-z]{1,8}"
}

fn corpus_strategy() -> impl Strategy<Value = Vec<TokenSequence>> {
    prop::collection::vec(
        prop::collection::vec(token_strategy(), 0..12).prop_map(TokenSequence::from_tokens),
        1..15,
    )
}

proptest! {
    /// clean_text is idempotent on arbitrary input.
    #[test]
    fn clean_text_idempotent(text in ".{0,200}") {
        let cfg = PipelineConfig::default();
        let once = clean_text(&text, &cfg);
        let twice = clean_text(&once, &cfg);
        prop_assert_eq!(once, twice);
    }

    /// The full pipeline never panics and only emits tokens from the
    /// pipeline alphabet.
    #[test]
    fn pipeline_tokens_stay_in_alphabet(text in ".{0,200}") {
        let cfg = PipelineConfig::default();
        let doc = Document { id: "p".into(), text, label: None };
        if let PipelineOutcome::Tokens(ts) = preprocess_pipeline(&doc, &cfg) {
            for token in &ts.tokens {
                prop_assert!(!token.is_empty());
                prop_assert!(token.chars().all(|c| {
                    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '@' || c == '_'
                }), "bad token {:?}", token);
            }
        }
    }

    /// Term frequencies within one document sum to at most 1, with
    /// equality when every token is in the vocabulary.
    #[test]
    fn tf_sums_to_one_over_document(docs in corpus_strategy()) {
        prop_assume!(docs.iter().any(|d| !d.tokens.is_empty()));
        let vocab = build_vocabulary(&docs, 1).unwrap();
        for doc in &docs {
            if doc.tokens.is_empty() { continue; }
            let unique: std::collections::BTreeSet<&str> =
                doc.tokens.iter().map(String::as_str).collect();
            let sum: f64 = unique.iter().map(|t| tf(t, doc)).sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            let _ = &vocab; // vocabulary covers every token by construction
        }
    }

    /// TF-IDF entries are finite, non-negative, and stored sparsely with
    /// strictly increasing column indices.
    #[test]
    fn tfidf_matrix_well_formed(docs in corpus_strategy()) {
        prop_assume!(docs.iter().any(|d| !d.tokens.is_empty()));
        let vocab = build_vocabulary(&docs, 1).unwrap();
        let m = tfidf_matrix(&docs, &vocab);
        for row in &m.rows {
            let mut last: Option<usize> = None;
            for &(idx, w) in row {
                prop_assert!(w.is_finite() && w > 0.0);
                prop_assert!(idx < m.n_columns);
                if let Some(prev) = last {
                    prop_assert!(idx > prev);
                }
                last = Some(idx);
            }
        }
    }

    /// Polarity score is bounded by the lexicon range and invariant under
    /// token permutation.
    #[test]
    fn polarity_score_bounded_and_order_invariant(tokens in prop::collection::vec(token_strategy(), 0..20)) {
        let lex = PolarityLexicon::bundled();
        let seq = TokenSequence::from_tokens(tokens.clone());
        let forward = score(&seq, &lex);
        prop_assert!((-1.0..=1.0).contains(&forward.value));
        let mut reversed_tokens = tokens;
        reversed_tokens.reverse();
        let reversed = score(&TokenSequence::from_tokens(reversed_tokens), &lex);
        prop_assert!((forward.value - reversed.value).abs() < 1e-12);
        prop_assert_eq!(forward.matched_terms, reversed.matched_terms);
    }

    /// top_k(r, k1) is a prefix of top_k(r, k2) for k1 <= k2.
    #[test]
    fn top_k_prefix_property(docs in corpus_strategy(), k1 in 1usize..20, k2 in 1usize..20) {
        prop_assume!(docs.iter().any(|d| !d.tokens.is_empty()));
        let (k1, k2) = (k1.min(k2), k1.max(k2));
        let r = rank_keywords(&docs, RankingScope::Overall).unwrap();
        let small = top_k(&r, k1).unwrap();
        let big = top_k(&r, k2).unwrap();
        prop_assert_eq!(
            &small.entries[..],
            &big.entries[..small.entries.len()]
        );
    }

    /// softmax output is a probability distribution preserving order.
    #[test]
    fn softmax_distribution(scores in prop::collection::vec(-50.0f64..50.0, 2..6)) {
        let p = softmax(&scores);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if scores[i] > scores[j] {
                    prop_assert!(p[i] >= p[j]);
                }
            }
        }
    }

    /// Split is an exact partition with round(fraction * n) training docs,
    /// stable under repetition.
    #[test]
    fn split_partition(n in 2usize..200, fraction in 0.05f64..0.95, seed in 0u64..1000) {
        let docs: Vec<Document> = (0..n)
            .map(|i| Document {
                id: format!("d{i}"),
                text: String::new(),
                label: Some(ALL_LABELS[i % 3]),
            })
            .collect();
        let d = Dataset::from_documents(docs, "prop").unwrap();
        let expected_train = (fraction * n as f64).round() as usize;
        let (train, test) = split(&d, fraction, seed).unwrap();
        prop_assert_eq!(train.len(), expected_train);
        prop_assert_eq!(train.len() + test.len(), n);
        let mut ids: Vec<&str> = train
            .documents
            .iter()
            .chain(test.documents.iter())
            .map(|doc| doc.id.as_str())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), n);
        let (train2, _) = split(&d, fraction, seed).unwrap();
        prop_assert_eq!(train, train2);
    }

    /// Metrics are permutation-invariant and accuracy equals trace/total.
    #[test]
    fn metrics_permutation_invariant(
        pairs in prop::collection::vec((0usize..3, 0usize..3), 1..50),
        shuffle_seed in 0u64..100,
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let y_true: Vec<usize> = pairs.iter().map(|&(t, _)| t).collect();
        let y_pred: Vec<usize> = pairs.iter().map(|&(_, p)| p).collect();
        let m1 = metrics(&confusion(&y_true, &y_pred).unwrap());
        let correct = pairs.iter().filter(|&&(t, p)| t == p).count();
        prop_assert!((m1.accuracy - correct as f64 / pairs.len() as f64).abs() < 1e-12);
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle_seed));
        let yt: Vec<usize> = shuffled.iter().map(|&(t, _)| t).collect();
        let yp: Vec<usize> = shuffled.iter().map(|&(_, p)| p).collect();
        let m2 = metrics(&confusion(&yt, &yp).unwrap());
        prop_assert_eq!(m1, m2);
    }

    /// Vocabulary indices are a permutation of 0..len and ordered by
    /// descending frequency with lexicographic tie-break.
    #[test]
    fn vocabulary_index_order(docs in corpus_strategy()) {
        prop_assume!(docs.iter().any(|d| !d.tokens.is_empty()));
        let vocab = build_vocabulary(&docs, 1).unwrap();
        let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
        for d in &docs {
            for t in &d.tokens {
                *freq.entry(t.as_str()).or_insert(0) += 1;
            }
        }
        let mut seen = vec![false; vocab.len()];
        for entry in vocab.terms.values() {
            prop_assert!(!seen[entry.index]);
            seen[entry.index] = true;
        }
        for i in 0..vocab.len().saturating_sub(1) {
            let a = vocab.term_at(i).unwrap();
            let b = vocab.term_at(i + 1).unwrap();
            let (fa, fb) = (freq[a], freq[b]);
            prop_assert!(fa > fb || (fa == fb && a < b));
        }
    }

    /// Weak labels follow the documented sign convention.
    #[test]
    fn weak_label_sign_convention(value in -1.0f64..1.0) {
        use sentigraph::polarity::{to_label, PolarityScore};
        let label = to_label(PolarityScore { value, matched_terms: 1 }, 0.0);
        let expected = if value > 0.0 {
            SentimentLabel::Positive
        } else if value < 0.0 {
            SentimentLabel::Negative
        } else {
            SentimentLabel::Neutral
        };
        prop_assert_eq!(label, expected);
    }
}
