//! Emotion vector assembly and ranking: per-term vectors in the vector
//! space of a model's emotions, Average/Max aggregation to sentence level,
//! and the induced emotion rankings.

use crate::emomodel::EmotionModel;
use crate::freqsource::{fetch_triples, CountProvider, FetchStats, FrequencyTriple, OccurrenceDumps};
use crate::preprocess::{preprocess, LanguageProfile, TokenList};
use crate::proximity::{
    build_pming_context, measure_cell, MeasureCell, MeasureError, MeasureKind, PmingContext,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RankingError {
    #[error("no triple for emotion `{0}`")]
    MissingEmotion(String),
    #[error("cannot aggregate over zero vectors")]
    EmptyAggregation,
    #[error("vectors belong to different models (`{0}` vs `{1}`)")]
    ModelMismatch(String, String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("count acquisition failed: {0}")]
    Fetch(#[from] crate::freqsource::FetchError),
}

/// How term vectors combine into a sentence vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Average,
    Max,
}

impl Aggregate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregate::Average => "avg",
            Aggregate::Max => "max",
        }
    }
}

/// Nonnegative vector over a model's emotions, aligned to the model label
/// order. Unless it is all-zero (no co-occurrence evidence at all), the
/// components sum to 1.
#[derive(Debug, Clone, Serialize)]
pub struct EmotionVector {
    #[serde(skip)]
    model: Arc<EmotionModel>,
    values: Vec<f64>,
}

impl PartialEq for EmotionVector {
    fn eq(&self, other: &Self) -> bool {
        self.model.name == other.model.name && self.values == other.values
    }
}

impl EmotionVector {
    /// L1-normalize raw proximity scores into a vector; all-zero input
    /// stays all-zero.
    pub fn from_raw(model: Arc<EmotionModel>, raw: Vec<f64>) -> Result<Self, RankingError> {
        assert_eq!(raw.len(), model.len(), "raw scores must match model dimension");
        let sum: f64 = raw.iter().sum();
        let values = if sum > 0.0 { raw.iter().map(|v| v / sum).collect() } else { raw };
        Ok(EmotionVector { model, values })
    }

    pub fn zero(model: Arc<EmotionModel>) -> Self {
        let n = model.len();
        EmotionVector { model, values: vec![0.0; n] }
    }

    pub fn model(&self) -> &Arc<EmotionModel> {
        &self.model
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when the term carried no co-occurrence evidence.
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.model.index_of(label).map(|i| self.values[i])
    }
}

/// Build the emotion vector of one term from its per-emotion triples.
pub fn term_vector(
    term: &str,
    triples: &BTreeMap<(String, String), FrequencyTriple>,
    kind: MeasureKind,
    ctx: Option<&PmingContext>,
    model: &Arc<EmotionModel>,
) -> Result<EmotionVector, RankingError> {
    let mut raw = Vec::with_capacity(model.len());
    for emotion in &model.labels {
        let triple = triples
            .get(&(term.to_string(), emotion.clone()))
            .ok_or_else(|| RankingError::MissingEmotion(emotion.clone()))?;
        raw.push(crate::proximity::proximity(kind, triple, ctx)?);
    }
    if raw.iter().all(|v| *v == 0.0) {
        log::warn!("term `{term}` has no co-occurrence evidence; zero vector");
    }
    EmotionVector::from_raw(Arc::clone(model), raw)
}

/// Combine term vectors column-wise (mean or max), then renormalize.
/// All-zero vectors carry no evidence and are excluded; if nothing is
/// left the sentence vector is all-zero.
pub fn aggregate(vectors: &[EmotionVector], how: Aggregate) -> Result<EmotionVector, RankingError> {
    let model = vectors.first().map(|v| Arc::clone(&v.model)).ok_or(RankingError::EmptyAggregation)?;
    for v in vectors {
        if v.model.name != model.name {
            return Err(RankingError::ModelMismatch(model.name.clone(), v.model.name.clone()));
        }
    }
    let supported: Vec<&EmotionVector> = vectors.iter().filter(|v| !v.is_zero()).collect();
    if supported.is_empty() {
        return Ok(EmotionVector::zero(model));
    }
    let n = model.len();
    let mut raw = vec![0.0f64; n];
    match how {
        Aggregate::Average => {
            for v in &supported {
                for (acc, value) in raw.iter_mut().zip(&v.values) {
                    *acc += value;
                }
            }
            for acc in &mut raw {
                *acc /= supported.len() as f64;
            }
        }
        Aggregate::Max => {
            for v in &supported {
                for (acc, value) in raw.iter_mut().zip(&v.values) {
                    *acc = acc.max(*value);
                }
            }
        }
    }
    EmotionVector::from_raw(model, raw)
}

/// Emotion labels sorted by vector value, descending; ties (and the
/// all-zero vector) fall back to model label order, so the ranking is
/// always a deterministic permutation of the labels.
pub fn rank(vector: &EmotionVector) -> Vec<String> {
    let mut order: Vec<usize> = (0..vector.values.len()).collect();
    order.sort_by(|&a, &b| {
        vector.values[b].partial_cmp(&vector.values[a]).unwrap_or(std::cmp::Ordering::Equal)
    });
    order.into_iter().map(|i| vector.model.labels[i].clone()).collect()
}

/// Everything computed for one sentence.
#[derive(Debug, Clone, Serialize)]
pub struct SentenceResult {
    pub sentence_id: String,
    pub tokens: TokenList,
    pub term_vectors: BTreeMap<String, EmotionVector>,
    pub avg_vector: EmotionVector,
    pub max_vector: EmotionVector,
    pub ranking_avg: Vec<String>,
    pub ranking_max: Vec<String>,
    /// word -> emotion -> all measure values (provenance of the vectors).
    pub measures: BTreeMap<String, BTreeMap<String, MeasureCell>>,
    /// PMING context of this sentence's pair set, when defined.
    pub context: Option<PmingContext>,
    pub dumps: OccurrenceDumps,
    pub stats: FetchStats,
    /// True when no term carried any evidence (e.g. all words filtered).
    pub degenerate: bool,
}

/// Run the full per-sentence pipeline: preprocess, acquire counts, build
/// the PMING context over this sentence's pairs, assemble term vectors,
/// aggregate, and rank. Deterministic given a deterministic provider.
pub fn process_sentence(
    sentence_id: &str,
    sentence: &str,
    provider: &dyn CountProvider,
    kind: MeasureKind,
    model: &Arc<EmotionModel>,
    profile: &LanguageProfile,
    rho: f64,
) -> Result<SentenceResult, RankingError> {
    let (tokens, fetched) = fetch_sentence(sentence_id, sentence, provider, model, profile)?;
    // The PMING context W is this sentence's word-emotion pair set,
    // evaluated in a first pass before any PMING value.
    let context = build_pming_context(fetched.triples.values(), rho).ok();
    assemble_result(sentence_id, tokens, fetched, kind, model, context)
}

/// Phase one of the pipeline: preprocessing and count acquisition. Split
/// out so a caller can build a dataset-wide PMING context over several
/// sentences before scoring any of them.
pub fn fetch_sentence(
    sentence_id: &str,
    sentence: &str,
    provider: &dyn CountProvider,
    model: &Arc<EmotionModel>,
    profile: &LanguageProfile,
) -> Result<(TokenList, crate::freqsource::FetchResult), RankingError> {
    let tokens = preprocess(sentence, profile);
    if tokens.is_empty() {
        log::warn!("sentence `{sentence_id}` has no content words after preprocessing");
    }
    let fetched = fetch_triples(provider, &tokens, model)?;
    Ok((tokens, fetched))
}

/// Phase two: vectors, aggregates, and rankings from acquired counts,
/// under a given PMING context.
pub fn assemble_result(
    sentence_id: &str,
    tokens: TokenList,
    fetched: crate::freqsource::FetchResult,
    kind: MeasureKind,
    model: &Arc<EmotionModel>,
    context: Option<PmingContext>,
) -> Result<SentenceResult, RankingError> {
    let mut term_vectors = BTreeMap::new();
    let mut measures: BTreeMap<String, BTreeMap<String, MeasureCell>> = BTreeMap::new();
    for term in &tokens.tokens {
        let vector = term_vector(term, &fetched.triples, kind, context.as_ref(), model)?;
        term_vectors.insert(term.clone(), vector);
        let row = measures.entry(term.clone()).or_default();
        for emotion in &model.labels {
            let triple = &fetched.triples[&(term.clone(), emotion.clone())];
            row.insert(emotion.clone(), measure_cell(kind, triple, context.as_ref())?);
        }
    }

    let ordered: Vec<EmotionVector> =
        tokens.tokens.iter().map(|t| term_vectors[t].clone()).collect();
    let (avg_vector, max_vector) = if ordered.is_empty() {
        (EmotionVector::zero(Arc::clone(model)), EmotionVector::zero(Arc::clone(model)))
    } else {
        (aggregate(&ordered, Aggregate::Average)?, aggregate(&ordered, Aggregate::Max)?)
    };
    let degenerate = avg_vector.is_zero();

    Ok(SentenceResult {
        sentence_id: sentence_id.to_string(),
        ranking_avg: rank(&avg_vector),
        ranking_max: rank(&max_vector),
        avg_vector,
        max_vector,
        tokens,
        term_vectors,
        measures,
        context,
        dumps: fetched.dumps,
        stats: fetched.stats,
        degenerate,
    })
}

impl SentenceResult {
    /// The aggregate vector selected by name.
    pub fn vector(&self, how: Aggregate) -> &EmotionVector {
        match how {
            Aggregate::Average => &self.avg_vector,
            Aggregate::Max => &self.max_vector,
        }
    }

    pub fn ranking(&self, how: Aggregate) -> &[String] {
        match how {
            Aggregate::Average => &self.ranking_avg,
            Aggregate::Max => &self.ranking_max,
        }
    }
}
