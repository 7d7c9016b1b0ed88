//! Sentence preprocessing: tokenization and content-word filtering.
//!
//! Filtering removes stop words, ordinals, cardinals, and short tokens,
//! keeping an audit trail of every removal. The kept list is deduplicated
//! to word types, since each word is counted once downstream.

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

const ENGLISH_PROFILE_JSON: &str = include_str!("../assets/profiles/english.json");

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("profile document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("profile field `{field}` is invalid: {reason}")]
    Schema { field: &'static str, reason: String },
    #[error("unknown language profile `{0}`")]
    Unknown(String),
}

/// Filtering rules for one language: stop words, an ordinal-number pattern,
/// and the minimum kept-token length.
#[derive(Debug, Clone)]
pub struct LanguageProfile {
    pub name: String,
    stopwords: HashSet<String>,
    ordinal: Regex,
    cardinal: Regex,
    pub min_keep_length: usize,
    pub ordinal_pattern: String,
}

impl LanguageProfile {
    pub fn from_json(document: &str) -> Result<Self, ProfileError> {
        #[derive(Deserialize)]
        struct Raw {
            name: String,
            stopwords: Vec<String>,
            ordinal_pattern: String,
            min_keep_length: usize,
        }
        let raw: Raw = serde_json::from_str(document)?;
        let ordinal = Regex::new(&raw.ordinal_pattern).map_err(|e| ProfileError::Schema {
            field: "ordinal_pattern",
            reason: e.to_string(),
        })?;
        if raw.name.trim().is_empty() {
            return Err(ProfileError::Schema {
                field: "name",
                reason: "must be a non-empty string".into(),
            });
        }
        Ok(LanguageProfile {
            name: raw.name,
            stopwords: raw.stopwords.into_iter().collect(),
            ordinal,
            cardinal: Regex::new("^[0-9]+$").unwrap(),
            min_keep_length: raw.min_keep_length,
            ordinal_pattern: raw.ordinal_pattern,
        })
    }

    /// The bundled English profile (stop-word list, `Nth` ordinals, min length 4).
    pub fn english() -> Self {
        Self::from_json(ENGLISH_PROFILE_JSON).expect("bundled english profile is valid")
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn stopword_count(&self) -> usize {
        self.stopwords.len()
    }

    /// The active stop-word list in sorted order, for run metadata.
    pub fn stopwords_sorted(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.stopwords.iter().map(String::as_str).collect();
        words.sort_unstable();
        words
    }
}

/// Why a token was dropped during filtering. When a token matches several
/// rules, the recorded reason is the first match in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemovalReason {
    Stopword,
    Ordinal,
    Cardinal,
    /// Token length under the profile minimum.
    Length,
    /// Token already kept earlier in the stream; counts are per word type.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovedToken {
    pub token: String,
    pub reason: RemovalReason,
}

/// The outcome of preprocessing one sentence. `tokens` holds the kept
/// content words (deduplicated, order of first occurrence); `removed`
/// records every dropped token with its reason, so that kept and removed
/// together replay the raw token stream in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenList {
    pub source: String,
    pub tokens: Vec<String>,
    pub removed: Vec<RemovedToken>,
}

impl TokenList {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }
}

/// Split a sentence into lowercase raw tokens.
///
/// Boundaries are whitespace and punctuation; apostrophes inside a word are
/// kept ("husband's"), apostrophes at word edges are stripped. Hyphenated
/// words split at the hyphen.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '\u{2019}'))
        .map(|piece| piece.trim_matches(|c| c == '\'' || c == '\u{2019}'))
        .filter(|piece| !piece.is_empty())
        .map(|piece| piece.replace('\u{2019}', "'").to_lowercase())
        .collect()
}

/// Apply the removal rules to a raw token stream.
///
/// Removes stop words, ordinal numbers, cardinal numbers, and tokens shorter
/// than the profile minimum, in that precedence order; then collapses
/// duplicate kept tokens to a single occurrence.
pub fn filter_tokens(raw: &[String], profile: &LanguageProfile) -> TokenList {
    let mut kept: Vec<String> = Vec::new();
    let mut kept_set: HashSet<String> = HashSet::new();
    let mut removed = Vec::new();

    for token in raw {
        let reason = if profile.is_stopword(token) {
            Some(RemovalReason::Stopword)
        } else if profile.ordinal.is_match(token) {
            Some(RemovalReason::Ordinal)
        } else if profile.cardinal.is_match(token) {
            Some(RemovalReason::Cardinal)
        } else if token.chars().count() < profile.min_keep_length {
            Some(RemovalReason::Length)
        } else if kept_set.contains(token.as_str()) {
            Some(RemovalReason::Duplicate)
        } else {
            None
        };
        match reason {
            Some(reason) => removed.push(RemovedToken { token: token.clone(), reason }),
            None => {
                kept_set.insert(token.clone());
                kept.push(token.clone());
            }
        }
    }

    TokenList {
        source: raw.join(" "),
        tokens: kept,
        removed,
    }
}

/// Tokenize and filter a sentence in one step.
pub fn preprocess(sentence: &str, profile: &LanguageProfile) -> TokenList {
    let raw = tokenize(sentence);
    let mut list = filter_tokens(&raw, profile);
    list.source = sentence.to_string();
    list
}
