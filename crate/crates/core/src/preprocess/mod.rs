//! Text normalization pipeline: English filtering, cleaning, mention
//! normalization, tokenization, stopword removal, stemming.

pub mod porter;

use std::collections::HashSet;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;

pub const BUNDLED_STOPWORDS: &str = include_str!("../../resources/stopwords.txt");
pub const BUNDLED_ENGLISH_WORDS: &str = include_str!("../../resources/english_words.txt");

pub fn parse_wordlist(raw: &str) -> HashSet<String> {
    raw.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_ascii_lowercase())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub stopwords: HashSet<String>,
    pub english_words: HashSet<String>,
    pub english_threshold: f64,
    pub strip_urls: bool,
    pub lowercase: bool,
    /// Keep the "@username" sentinel as a feature token.
    pub keep_mention_token: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stopwords: parse_wordlist(BUNDLED_STOPWORDS),
            english_words: parse_wordlist(BUNDLED_ENGLISH_WORDS),
            english_threshold: 0.15,
            strip_urls: true,
            lowercase: true,
            keep_mention_token: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub dropped_count: usize,
}

impl TokenSequence {
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        TokenSequence {
            tokens,
            dropped_count: 0,
        }
    }
}

/// Outcome of the full pipeline for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PipelineOutcome {
    Tokens(TokenSequence),
    RejectedNonEnglish,
}

/// Wordlist-hit-ratio heuristic: fraction of whitespace-split words found
/// in the English wordlist must reach `threshold`. Empty text fails.
pub fn is_english(text: &str, english_words: &HashSet<String>, threshold: f64) -> bool {
    let mut total = 0usize;
    let mut hits = 0usize;
    for word in text.split_whitespace() {
        let normalized: String = word
            .chars()
            .filter(|c| c.is_ascii_alphabetic())
            .collect::<String>()
            .to_ascii_lowercase();
        total += 1;
        if !normalized.is_empty() && english_words.contains(&normalized) {
            hits += 1;
        }
    }
    if total == 0 {
        return false;
    }
    hits as f64 / total as f64 >= threshold
}

struct CleanPatterns {
    mention: Regex,
    url: Regex,
}

fn clean_patterns() -> &'static CleanPatterns {
    use std::sync::OnceLock;
    static PATTERNS: OnceLock<CleanPatterns> = OnceLock::new();
    PATTERNS.get_or_init(|| CleanPatterns {
        mention: Regex::new(r"@\w+").unwrap(),
        url: Regex::new(r"(?i)\b(?:https?://|www\.)\S+").unwrap(),
    })
}

/// Normalize mentions to the sentinel "@username", strip URLs, drop
/// punctuation / emoji / non-printables, optionally lowercase, and
/// collapse whitespace. Idempotent.
pub fn clean_text(text: &str, cfg: &PipelineConfig) -> String {
    let patterns = clean_patterns();
    let mut s = text.to_string();
    if cfg.strip_urls {
        s = patterns.url.replace_all(&s, " ").into_owned();
    }
    if cfg.lowercase {
        s = s.to_lowercase();
    }
    let filtered: String = s
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '@' || c == '_' {
                c
            } else if c.is_whitespace() {
                ' '
            } else {
                '\u{0}' // marker for deletion, filtered below
            }
        })
        .filter(|&c| c != '\u{0}')
        .collect();
    // Mentions are normalized after punctuation stripping; doing it
    // earlier would let stripped characters splice new "@word" sequences
    // together, breaking idempotence.
    let s = patterns
        .mention
        .replace_all(&filtered, "@username")
        .into_owned();
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Split on whitespace runs; never yields empty tokens.
pub fn tokenize(cleaned: &str) -> Vec<String> {
    cleaned.split_whitespace().map(str::to_string).collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stopwords: &HashSet<String>) -> (Vec<String>, usize) {
    let before = tokens.len();
    let kept: Vec<String> = tokens
        .into_iter()
        .filter(|t| !stopwords.contains(t.as_str()))
        .collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

pub fn stem(token: &str) -> String {
    porter::stem(token)
}

/// Full pipeline: is_english -> clean_text -> tokenize -> remove_stopwords -> stem.
pub fn preprocess_pipeline(doc: &Document, cfg: &PipelineConfig) -> PipelineOutcome {
    if !is_english(&doc.text, &cfg.english_words, cfg.english_threshold) {
        return PipelineOutcome::RejectedNonEnglish;
    }
    let cleaned = clean_text(&doc.text, cfg);
    let tokens = tokenize(&cleaned);
    let before = tokens.len();
    let (tokens, dropped_stopwords) = remove_stopwords(tokens, &cfg.stopwords);
    let mut stemmed: Vec<String> = tokens.iter().map(|t| stem(t)).collect();
    let mut dropped = dropped_stopwords;
    if !cfg.keep_mention_token {
        stemmed.retain(|t| t != "@username");
        dropped = before - stemmed.len();
    }
    PipelineOutcome::Tokens(TokenSequence {
        tokens: stemmed,
        dropped_count: dropped,
    })
}
