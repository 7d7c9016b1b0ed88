//! Count acquisition for one sentence: every single term once, every
//! (word, emotion) pair, with budget accounting and replayable dumps.

use super::{CountProvider, FrequencyTriple, PairCount, ProviderError, QueryBudget};
use crate::emomodel::EmotionModel;
use crate::preprocess::TokenList;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Raw counts for one directed pair query, as persisted in the pairs dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOccurrence {
    /// Count for the "word emotion" direction.
    pub fxy_wd_em: u64,
    /// Count for the "emotion word" direction.
    pub fxy_em_wd: u64,
    /// The value used downstream (minimum of the two directions).
    pub used: u64,
}

/// The three occurrence documents produced by the acquisition phase:
/// emotion counts, word counts, and pair counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceDumps {
    pub emotions: BTreeMap<String, u64>,
    pub words: BTreeMap<String, u64>,
    /// Keyed "word|emotion" (word first).
    pub pairs: BTreeMap<String, PairOccurrence>,
}

impl OccurrenceDumps {
    /// Merge another dump set into this one (counts for the same term agree
    /// under a deterministic provider, so last-write-wins is safe).
    pub fn merge(&mut self, other: &OccurrenceDumps) {
        self.emotions.extend(other.emotions.iter().map(|(k, v)| (k.clone(), *v)));
        self.words.extend(other.words.iter().map(|(k, v)| (k.clone(), *v)));
        self.pairs.extend(other.pairs.iter().map(|(k, v)| (k.clone(), *v)));
    }
}

/// Lookup accounting for one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FetchStats {
    pub budget: QueryBudget,
    /// Lookups actually performed (memoized singles counted once; a pair
    /// query contributes what the provider reports, 1 or 2).
    pub lookups: usize,
}

#[derive(Debug)]
pub struct FetchResult {
    /// (word, emotion) -> triple, complete over kept words x model labels.
    pub triples: BTreeMap<(String, String), FrequencyTriple>,
    pub dumps: OccurrenceDumps,
    pub stats: FetchStats,
}

/// A provider failure with everything acquired up to that point, so the
/// caller can persist partial dumps before aborting.
#[derive(Debug, thiserror::Error)]
#[error("count acquisition failed at {failed_at}: {source}")]
pub struct FetchError {
    pub failed_at: String,
    #[source]
    pub source: ProviderError,
    pub partial: Box<OccurrenceDumps>,
}

/// Fetch all counts needed to score one sentence against a model.
///
/// Performs K single-emotion lookups, W single-word lookups, and one pair
/// query per (word, emotion). Singles are memoized so no term is queried
/// twice, even when a sentence word equals an emotion label.
pub fn fetch_triples(
    provider: &dyn CountProvider,
    words: &TokenList,
    model: &EmotionModel,
) -> Result<FetchResult, FetchError> {
    let mut dumps = OccurrenceDumps::default();
    let mut memo: BTreeMap<String, u64> = BTreeMap::new();
    let mut lookups = 0usize;
    let m = provider.corpus_size();

    let mut single = |term: &str, dumps: &mut OccurrenceDumps, is_emotion: bool| -> Result<u64, FetchError> {
        if let Some(&count) = memo.get(term) {
            // Already fetched; still record it in the other dump if needed.
            record_single(dumps, term, count, is_emotion);
            return Ok(count);
        }
        let count = provider.count_single(term).map_err(|source| FetchError {
            failed_at: format!("single `{term}`"),
            source,
            partial: Box::new(dumps.clone()),
        })?;
        lookups += 1;
        memo.insert(term.to_string(), count);
        record_single(dumps, term, count, is_emotion);
        Ok(count)
    };

    let mut emotion_counts: BTreeMap<String, u64> = BTreeMap::new();
    for emotion in &model.labels {
        let count = single(emotion, &mut dumps, true)?;
        emotion_counts.insert(emotion.clone(), count);
    }

    let mut word_counts: BTreeMap<String, u64> = BTreeMap::new();
    for word in &words.tokens {
        let count = single(word, &mut dumps, false)?;
        word_counts.insert(word.clone(), count);
    }

    if words.tokens.is_empty() {
        log::warn!("no content words left after preprocessing; skipping pair queries");
    }

    let mut triples = BTreeMap::new();
    for word in &words.tokens {
        for emotion in &model.labels {
            let pair: PairCount =
                provider.count_pair(word, emotion).map_err(|source| FetchError {
                    failed_at: format!("pair (`{word}`, `{emotion}`)"),
                    source,
                    partial: Box::new(dumps.clone()),
                })?;
            lookups += pair.lookups;
            dumps.pairs.insert(
                format!("{word}|{emotion}"),
                PairOccurrence {
                    fxy_wd_em: pair.forward,
                    fxy_em_wd: pair.backward,
                    used: pair.used(),
                },
            );
            let (triple, clamped) =
                FrequencyTriple::clamped(word_counts[word], emotion_counts[emotion], pair.used(), m);
            if clamped {
                log::warn!("inconsistent counts for (`{word}`, `{emotion}`) clamped to invariants");
            }
            triples.insert((word.clone(), emotion.clone()), triple);
        }
    }

    let stats = FetchStats {
        budget: QueryBudget::new(model.len(), words.tokens.len()),
        lookups,
    };
    Ok(FetchResult { triples, dumps, stats })
}

fn record_single(dumps: &mut OccurrenceDumps, term: &str, count: u64, is_emotion: bool) {
    if is_emotion {
        dumps.emotions.insert(term.to_string(), count);
    } else {
        dumps.words.insert(term.to_string(), count);
    }
}

/// Rebuild a fixture provider from persisted occurrence dumps, enabling
/// replay of a run without re-querying the original source.
pub fn fixture_from_dumps(
    dumps: &OccurrenceDumps,
    m: u64,
) -> Result<super::FixtureCounts, ProviderError> {
    let mut singles = dumps.emotions.clone();
    singles.extend(dumps.words.iter().map(|(k, v)| (k.clone(), *v)));
    let mut pairs = BTreeMap::new();
    for (key, occ) in &dumps.pairs {
        let (word, emotion) = key.split_once('|').ok_or_else(|| {
            ProviderError::FixtureFormat(format!("pair key `{key}` must be `word|emotion`"))
        })?;
        pairs.insert(super::pair_key(word, emotion), occ.used);
    }
    super::FixtureCounts::new(m, singles, pairs)
}
