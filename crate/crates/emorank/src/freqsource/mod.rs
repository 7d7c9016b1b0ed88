//! Document-count providers: the uniform source of f(x), f(y), f(x,y), M.
//!
//! Three implementations share one contract: a local inverted-index corpus,
//! a JSON count fixture, and a live search-engine hit-count client. All
//! proximity measures are computed from the triples these providers emit.

mod fetch;
mod fixture;
mod index;
mod live;

pub use fetch::{
    fetch_triples, fixture_from_dumps, FetchError, FetchResult, FetchStats, OccurrenceDumps,
    PairOccurrence,
};
pub use fixture::{FixtureCounts, MissingKeyPolicy};
pub use index::{build_index, load_corpus_ndjson, CorpusIndex};
pub use live::{EngineConfig, LiveProvider};

use std::sync::atomic::{AtomicUsize, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("duplicate document id `{0}` during ingestion")]
    DuplicateDocId(String),
    #[error("corpus is empty: need at least one document")]
    EmptyCorpus,
    #[error("corpus line {line}: {reason}")]
    CorpusFormat { line: usize, reason: String },
    #[error("empty term in count query")]
    EmptyTerm,
    #[error("fixture is invalid: {0}")]
    FixtureFormat(String),
    #[error("fixture has no entry for `{0}`")]
    FixtureMissingKey(String),
    #[error("engine config is invalid: {0}")]
    EngineConfig(String),
    #[error("request to `{url}` failed: {reason}")]
    Http { url: String, reason: String },
    #[error("result-count pattern did not match response for query `{query}`")]
    ScrapeFormat { query: String },
    #[error("ban detected and retry budget exhausted for query `{query}` (last status {last_status})")]
    Banned { query: String, last_status: u16 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The document counts a proximity measure consumes: f(x), f(y), f(x,y),
/// and the corpus size M. Constructed so that fxy <= min(fx, fy) <= m and
/// m >= 1 always hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyTriple {
    fx: u64,
    fy: u64,
    fxy: u64,
    m: u64,
}

impl FrequencyTriple {
    /// Build a triple, rejecting count combinations that violate the
    /// invariants.
    pub fn new(fx: u64, fy: u64, fxy: u64, m: u64) -> Result<Self, String> {
        if m < 1 {
            return Err(format!("corpus size must be >= 1, got {m}"));
        }
        if fx > m || fy > m {
            return Err(format!("single counts ({fx}, {fy}) exceed corpus size {m}"));
        }
        if fxy > fx.min(fy) {
            return Err(format!(
                "pair count {fxy} exceeds min of single counts ({fx}, {fy})"
            ));
        }
        Ok(FrequencyTriple { fx, fy, fxy, m })
    }

    /// Build a triple from possibly inconsistent raw counts (as live search
    /// engines return), clamping singles to M and the pair count to the
    /// smaller single. Returns the triple and whether clamping occurred.
    pub fn clamped(fx: u64, fy: u64, fxy: u64, m: u64) -> (Self, bool) {
        let m = m.max(1);
        let cfx = fx.min(m);
        let cfy = fy.min(m);
        let cfxy = fxy.min(cfx.min(cfy));
        let clamped = cfx != fx || cfy != fy || cfxy != fxy;
        (FrequencyTriple { fx: cfx, fy: cfy, fxy: cfxy, m }, clamped)
    }

    pub fn fx(&self) -> u64 {
        self.fx
    }
    pub fn fy(&self) -> u64 {
        self.fy
    }
    pub fn fxy(&self) -> u64 {
        self.fxy
    }
    pub fn m(&self) -> u64 {
        self.m
    }

    /// The same counts with x and y exchanged.
    pub fn swapped(&self) -> Self {
        FrequencyTriple { fx: self.fy, fy: self.fx, fxy: self.fxy, m: self.m }
    }
}

/// Raw outcome of one pair query: both directed counts and how many
/// provider lookups it took. Symmetric providers answer in one lookup;
/// the live client issues both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCount {
    pub forward: u64,
    pub backward: u64,
    pub lookups: usize,
}

impl PairCount {
    pub fn symmetric(count: u64) -> Self {
        PairCount { forward: count, backward: count, lookups: 1 }
    }

    /// The count used downstream: the minimum of the two directions
    /// (co-occurrence cannot exceed either).
    pub fn used(&self) -> u64 {
        self.forward.min(self.backward)
    }
}

/// Uniform contract over count sources.
pub trait CountProvider: Sync {
    /// Short identifier for metadata and logs.
    fn name(&self) -> &str;

    /// Corpus size M.
    fn corpus_size(&self) -> u64;

    /// Document frequency of a single term; unseen terms count 0.
    fn count_single(&self, term: &str) -> Result<u64, ProviderError>;

    /// Document count of co-presence of two terms.
    fn count_pair(&self, x: &str, y: &str) -> Result<PairCount, ProviderError>;
}

/// Expected lookup volume for one sentence: K emotions, W kept words, and
/// the paper's directed-pair accounting T = K + W + 2*K*W.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct QueryBudget {
    pub k: usize,
    pub w: usize,
    pub total: usize,
}

impl QueryBudget {
    pub fn new(k: usize, w: usize) -> Self {
        QueryBudget { k, w, total: k + w + 2 * k * w }
    }
}

/// Wrapper that counts every lookup going through a provider. Useful for
/// verifying memoization and query-budget accounting.
pub struct CountingProvider<P> {
    inner: P,
    singles: AtomicUsize,
    pairs: AtomicUsize,
    lookups: AtomicUsize,
}

impl<P: CountProvider> CountingProvider<P> {
    pub fn new(inner: P) -> Self {
        CountingProvider {
            inner,
            singles: AtomicUsize::new(0),
            pairs: AtomicUsize::new(0),
            lookups: AtomicUsize::new(0),
        }
    }

    pub fn single_queries(&self) -> usize {
        self.singles.load(Ordering::SeqCst)
    }

    pub fn pair_queries(&self) -> usize {
        self.pairs.load(Ordering::SeqCst)
    }

    /// Total underlying lookups (a dual-direction pair query counts as 2).
    pub fn lookups(&self) -> usize {
        self.lookups.load(Ordering::SeqCst)
    }
}

impl<P: CountProvider> CountProvider for CountingProvider<P> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn corpus_size(&self) -> u64 {
        self.inner.corpus_size()
    }

    fn count_single(&self, term: &str) -> Result<u64, ProviderError> {
        self.singles.fetch_add(1, Ordering::SeqCst);
        self.lookups.fetch_add(1, Ordering::SeqCst);
        self.inner.count_single(term)
    }

    fn count_pair(&self, x: &str, y: &str) -> Result<PairCount, ProviderError> {
        self.pairs.fetch_add(1, Ordering::SeqCst);
        let pair = self.inner.count_pair(x, y)?;
        self.lookups.fetch_add(pair.lookups, Ordering::SeqCst);
        Ok(pair)
    }
}

/// Canonical fixture key for an unordered pair: lexicographically smaller
/// term first, '|' separator.
pub(crate) fn pair_key(x: &str, y: &str) -> String {
    if x <= y {
        format!("{x}|{y}")
    } else {
        format!("{y}|{x}")
    }
}
