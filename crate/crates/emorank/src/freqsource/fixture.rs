//! JSON count fixture: a replayable table of single and pair counts.
//!
//! Pair keys are canonical ("smaller|larger"), so lookups are symmetric.
//! Missing keys resolve to 0 with a warning by default; strict mode turns
//! them into errors for fixture authoring.

use super::{pair_key, CountProvider, PairCount, ProviderError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// What a fixture lookup does when the key is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingKeyPolicy {
    /// Treat the term as unseen (count 0) and log a warning.
    #[default]
    ZeroWithWarning,
    /// Fail the lookup.
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureCounts {
    m: u64,
    singles: BTreeMap<String, u64>,
    pairs: BTreeMap<String, u64>,
    #[serde(skip)]
    missing: MissingKeyPolicy,
}

impl FixtureCounts {
    pub fn new(
        m: u64,
        singles: BTreeMap<String, u64>,
        pairs: BTreeMap<String, u64>,
    ) -> Result<Self, ProviderError> {
        if m < 1 {
            return Err(ProviderError::FixtureFormat(format!(
                "corpus size m must be >= 1, got {m}"
            )));
        }
        // Canonicalize pair keys so authored fixtures may use either order.
        let mut canonical = BTreeMap::new();
        for (key, count) in pairs {
            let (x, y) = key.split_once('|').ok_or_else(|| {
                ProviderError::FixtureFormat(format!("pair key `{key}` must be `x|y`"))
            })?;
            canonical.insert(pair_key(x, y), count);
        }
        Ok(FixtureCounts { m, singles, pairs: canonical, missing: MissingKeyPolicy::default() })
    }

    pub fn from_json(document: &str) -> Result<Self, ProviderError> {
        let raw: FixtureCounts = serde_json::from_str(document)
            .map_err(|e| ProviderError::FixtureFormat(e.to_string()))?;
        FixtureCounts::new(raw.m, raw.singles, raw.pairs)
    }

    pub fn with_missing_key_policy(mut self, policy: MissingKeyPolicy) -> Self {
        self.missing = policy;
        self
    }

    fn resolve(&self, key: &str, value: Option<u64>) -> Result<u64, ProviderError> {
        match value {
            Some(v) => Ok(v),
            None => match self.missing {
                MissingKeyPolicy::ZeroWithWarning => {
                    log::warn!("fixture has no entry for `{key}`; counting 0");
                    Ok(0)
                }
                MissingKeyPolicy::Error => Err(ProviderError::FixtureMissingKey(key.to_string())),
            },
        }
    }
}

impl CountProvider for FixtureCounts {
    fn name(&self) -> &str {
        "fixture"
    }

    fn corpus_size(&self) -> u64 {
        self.m
    }

    fn count_single(&self, term: &str) -> Result<u64, ProviderError> {
        if term.is_empty() {
            return Err(ProviderError::EmptyTerm);
        }
        self.resolve(term, self.singles.get(term).copied())
    }

    fn count_pair(&self, x: &str, y: &str) -> Result<PairCount, ProviderError> {
        if x.is_empty() || y.is_empty() {
            return Err(ProviderError::EmptyTerm);
        }
        let key = pair_key(x, y);
        let count = self.resolve(&key, self.pairs.get(&key).copied())?;
        Ok(PairCount::symmetric(count))
    }
}
