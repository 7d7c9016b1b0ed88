//! Local inverted-index corpus: a deterministic stand-in for a search
//! engine. Stores presence postings (document frequency semantics), so a
//! term repeated in one document counts once.

use super::{CountProvider, PairCount, ProviderError};
use crate::preprocess::tokenize;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

/// Inverted index over a document collection: term -> set of doc ids.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CorpusIndex {
    docs: u64,
    postings: BTreeMap<String, BTreeSet<String>>,
}

impl CorpusIndex {
    pub fn doc_count(&self) -> u64 {
        self.docs
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    /// Document frequency of a term.
    pub fn df(&self, term: &str) -> u64 {
        self.postings.get(term).map_or(0, |p| p.len() as u64)
    }

    /// Documents containing both terms.
    pub fn df_pair(&self, x: &str, y: &str) -> u64 {
        match (self.postings.get(x), self.postings.get(y)) {
            (Some(px), Some(py)) => px.intersection(py).count() as u64,
            _ => 0,
        }
    }
}

/// Index a document collection. Texts are run through the sentence
/// tokenizer but NOT filtered: the index keeps stop words so that any
/// query term still resolves.
pub fn build_index<I, S, T>(documents: I) -> Result<CorpusIndex, ProviderError>
where
    I: IntoIterator<Item = (S, T)>,
    S: Into<String>,
    T: AsRef<str>,
{
    let mut postings: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut docs: u64 = 0;
    for (id, text) in documents {
        let id = id.into();
        if !seen.insert(id.clone()) {
            return Err(ProviderError::DuplicateDocId(id));
        }
        docs += 1;
        for token in tokenize(text.as_ref()) {
            postings.entry(token).or_default().insert(id.clone());
        }
    }
    if docs == 0 {
        return Err(ProviderError::EmptyCorpus);
    }
    Ok(CorpusIndex { docs, postings })
}

/// Read a newline-delimited JSON corpus: one {"id": ..., "text": ...} per line.
pub fn load_corpus_ndjson<R: BufRead>(reader: R) -> Result<CorpusIndex, ProviderError> {
    #[derive(Deserialize)]
    struct Line {
        id: String,
        text: String,
    }
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| ProviderError::CorpusFormat {
            line: i + 1,
            reason: e.to_string(),
        })?;
        docs.push((parsed.id, parsed.text));
    }
    build_index(docs)
}

impl CountProvider for CorpusIndex {
    fn name(&self) -> &str {
        "index"
    }

    fn corpus_size(&self) -> u64 {
        self.docs
    }

    fn count_single(&self, term: &str) -> Result<u64, ProviderError> {
        if term.is_empty() {
            return Err(ProviderError::EmptyTerm);
        }
        Ok(self.df(term))
    }

    fn count_pair(&self, x: &str, y: &str) -> Result<PairCount, ProviderError> {
        if x.is_empty() || y.is_empty() {
            return Err(ProviderError::EmptyTerm);
        }
        Ok(PairCount::symmetric(self.df_pair(x, y)))
    }
}
