//! Batch orchestration: configuration, provider construction, worker
//! fan-out, output files, and run metadata. The whole batch is
//! deterministic for the index and fixture providers: same inputs, same
//! bytes out.

use crate::assets::{assets_dir, load_profile, resolve_model, AssetError};
use crate::emomodel::EmotionModel;
use crate::evaluate::{
    kendall, load_ground_truth, pearson, score_sentence, spearman, summarize, CorrelationReport,
    EvalError, EvaluationSummary, GroundTruthRecord, SEMEVAL_LABELS,
};
use crate::freqsource::{
    CorpusIndex, CountProvider, FixtureCounts, LiveProvider, OccurrenceDumps, ProviderError,
};
use crate::output::{
    evaluation_csv, load_dumps, measures_json, sentences_csv, words_csv, write_dumps, write_json,
};
use crate::preprocess::{LanguageProfile, ProfileError, TokenList};
use crate::proximity::{build_pming_context, MeasureKind, PmingContext};
use crate::radar::render_radar;
use crate::ranking::{
    assemble_result, fetch_sentence, Aggregate, EmotionVector, RankingError, SentenceResult,
};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sentences file line {line}: {reason}")]
    Sentences { line: usize, reason: String },
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Exactly one count source per run.
#[derive(Debug, Clone)]
pub enum ProviderSpec {
    /// NDJSON corpus or a prebuilt index file.
    Corpus(PathBuf),
    /// JSON count fixture.
    Fixture(PathBuf),
    /// Live engine config.
    Engine(PathBuf),
}

impl ProviderSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProviderSpec::Corpus(_) => "corpus",
            ProviderSpec::Fixture(_) => "fixture",
            ProviderSpec::Engine(_) => "engine",
        }
    }

    pub fn path(&self) -> &Path {
        match self {
            ProviderSpec::Corpus(p) | ProviderSpec::Fixture(p) | ProviderSpec::Engine(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateChoice {
    Avg,
    Max,
    Both,
}

impl AggregateChoice {
    pub fn list(&self) -> Vec<Aggregate> {
        match self {
            AggregateChoice::Avg => vec![Aggregate::Average],
            AggregateChoice::Max => vec![Aggregate::Max],
            AggregateChoice::Both => vec![Aggregate::Average, Aggregate::Max],
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            AggregateChoice::Avg => "avg",
            AggregateChoice::Max => "max",
            AggregateChoice::Both => "both",
        }
    }
}

/// Which pair set forms the PMING evaluation context W.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PmingScope {
    /// All word-emotion pairs of one sentence (the per-sentence two-pass).
    #[default]
    Sentence,
    /// All pairs of the whole batch share one context.
    Dataset,
}

impl PmingScope {
    pub fn as_str(&self) -> &'static str {
        match self {
            PmingScope::Sentence => "sentence",
            PmingScope::Dataset => "dataset",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: String,
    pub measure: MeasureKind,
    pub rho: f64,
    pub profile: String,
    pub provider: ProviderSpec,
    pub sentences: PathBuf,
    pub truth: Option<(PathBuf, PathBuf)>,
    pub out_dir: PathBuf,
    pub aggregate: AggregateChoice,
    pub workers: Option<usize>,
    pub fail_fast: bool,
    pub assets_dir: Option<PathBuf>,
    pub pming_scope: PmingScope,
}

#[derive(Debug)]
pub struct BatchOutcome {
    pub processed: usize,
    /// sentence id -> error message for every failed sentence.
    pub failures: BTreeMap<String, String>,
    pub out_dir: PathBuf,
}

impl BatchOutcome {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }
}

fn read_file(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path)
        .map_err(|source| PipelineError::Read { path: path.to_path_buf(), source })
}

/// Parse "id@text" lines; blank lines are skipped.
pub fn parse_sentences(text: &str) -> Result<Vec<(String, String)>, PipelineError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut sentences = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, body) = line.split_once('@').ok_or_else(|| PipelineError::Sentences {
            line: i + 1,
            reason: "expected `id@text`".into(),
        })?;
        let id = id.trim().to_string();
        if id.is_empty() {
            return Err(PipelineError::Sentences { line: i + 1, reason: "empty id".into() });
        }
        if !seen.insert(id.clone()) {
            return Err(PipelineError::Sentences {
                line: i + 1,
                reason: format!("duplicate sentence id `{id}`"),
            });
        }
        sentences.push((id, body.to_string()));
    }
    Ok(sentences)
}

fn build_provider(
    spec: &ProviderSpec,
) -> Result<(Box<dyn CountProvider>, String), PipelineError> {
    let content = read_file(spec.path())?;
    let provider: Box<dyn CountProvider> = match spec {
        ProviderSpec::Corpus(_) => {
            // Accept either a prebuilt index file or raw NDJSON.
            match serde_json::from_str::<CorpusIndex>(&content) {
                Ok(index) => Box::new(index),
                Err(_) => {
                    Box::new(crate::freqsource::load_corpus_ndjson(content.as_bytes())?)
                }
            }
        }
        ProviderSpec::Fixture(_) => Box::new(FixtureCounts::from_json(&content)?),
        ProviderSpec::Engine(_) => Box::new(LiveProvider::from_json(&content)?),
    };
    Ok((provider, content))
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

fn default_workers(spec: &ProviderSpec) -> usize {
    match spec {
        // one in-flight request is the whole point of the live rate contract
        ProviderSpec::Engine(_) => 1,
        _ => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    }
}

type SentenceFailure = (String, Option<OccurrenceDumps>);
type Fetched = (TokenList, crate::freqsource::FetchResult);

fn fetch_one(
    id: &str,
    text: &str,
    provider: &dyn CountProvider,
    model: &Arc<EmotionModel>,
    profile: &LanguageProfile,
) -> Result<Fetched, SentenceFailure> {
    fetch_sentence(id, text, provider, model, profile).map_err(|e| match e {
        RankingError::Fetch(fetch) => (fetch.to_string(), Some((*fetch.partial).clone())),
        other => (other.to_string(), None),
    })
}

/// Run the full batch pipeline and write every output file.
pub fn run_batch(config: &RunConfig) -> Result<BatchOutcome, PipelineError> {
    if !(0.0..=1.0).contains(&config.rho) {
        return Err(PipelineError::Config(format!("rho {} outside [0, 1]", config.rho)));
    }
    let assets = assets_dir(config.assets_dir.as_deref());
    let model = resolve_model(&config.model, assets.as_deref())?;
    let profile = load_profile(&config.profile, assets.as_deref())?;

    // Validate every input before creating any output.
    let (provider, provider_content) = build_provider(&config.provider)?;
    let sentences_text = read_file(&config.sentences)?;
    let sentences = parse_sentences(&sentences_text)?;
    if sentences.is_empty() {
        log::warn!("sentence input is empty; outputs will contain headers only");
    }
    let truth_data = match &config.truth {
        Some((headlines_path, scores_path)) => {
            let headlines = read_file(headlines_path)?;
            let scores = read_file(scores_path)?;
            let records = load_ground_truth(&headlines, &scores)?;
            Some((records, headlines, scores))
        }
        None => None,
    };

    let workers = config.workers.unwrap_or_else(|| default_workers(&config.provider)).max(1);
    let mut failures: BTreeMap<String, String> = BTreeMap::new();
    let mut failure_dumps = OccurrenceDumps::default();

    // Phase one: acquire counts for every sentence.
    let mut fetched_slots: Vec<Option<Fetched>> = Vec::with_capacity(sentences.len());
    if workers == 1 || config.fail_fast {
        for (id, text) in &sentences {
            match fetch_one(id, text, provider.as_ref(), &model, &profile) {
                Ok(fetched) => fetched_slots.push(Some(fetched)),
                Err((message, partial)) => {
                    if let Some(partial) = partial {
                        failure_dumps.merge(&partial);
                    }
                    failures.insert(id.clone(), message);
                    fetched_slots.push(None);
                    if config.fail_fast {
                        break;
                    }
                }
            }
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| PipelineError::Config(format!("worker pool: {e}")))?;
        let outcomes: Vec<Result<Fetched, SentenceFailure>> = pool.install(|| {
            sentences
                .par_iter()
                .map(|(id, text)| fetch_one(id, text, provider.as_ref(), &model, &profile))
                .collect()
        });
        for ((id, _), outcome) in sentences.iter().zip(outcomes) {
            match outcome {
                Ok(fetched) => fetched_slots.push(Some(fetched)),
                Err((message, partial)) => {
                    if let Some(partial) = partial {
                        failure_dumps.merge(&partial);
                    }
                    failures.insert(id.clone(), message);
                    fetched_slots.push(None);
                }
            }
        }
    }

    // With dataset scope, one context spans every pair in the batch.
    let shared_context: Option<PmingContext> = match config.pming_scope {
        PmingScope::Dataset => build_pming_context(
            fetched_slots
                .iter()
                .flatten()
                .flat_map(|(_, fetched)| fetched.triples.values()),
            config.rho,
        )
        .ok(),
        PmingScope::Sentence => None,
    };

    // Phase two: vectors, aggregates, rankings.
    let mut slots: Vec<Option<SentenceResult>> = Vec::with_capacity(fetched_slots.len());
    for (slot, (id, _)) in fetched_slots.into_iter().zip(&sentences) {
        match slot {
            Some((tokens, fetched)) => {
                let context = match config.pming_scope {
                    PmingScope::Dataset => shared_context,
                    PmingScope::Sentence => {
                        build_pming_context(fetched.triples.values(), config.rho).ok()
                    }
                };
                match assemble_result(id, tokens, fetched, config.measure, &model, context) {
                    Ok(result) => slots.push(Some(result)),
                    Err(e) => {
                        failures.insert(id.clone(), e.to_string());
                        slots.push(None);
                    }
                }
            }
            None => slots.push(None),
        }
    }

    let results: Vec<&SentenceResult> = slots.iter().flatten().collect();
    let aggregates = config.aggregate.list();

    // Outputs are written by this single writer after workers complete.
    std::fs::create_dir_all(&config.out_dir)?;
    let out = &config.out_dir;

    let mut dumps = failure_dumps;
    for result in &results {
        dumps.merge(&result.dumps);
    }
    write_dumps(out, &dumps)?;
    write_json(
        &out.join("measures.json"),
        &measures_json(&results, config.measure, config.rho, provider.corpus_size()),
    )?;
    std::fs::write(out.join("words.csv"), words_csv(&results, &model.labels)?)?;
    std::fs::write(
        out.join("sentences.csv"),
        sentences_csv(&results, &model.labels, &aggregates)?,
    )?;

    let mut truth_files: Option<(String, String)> = None;
    if let Some((records, headlines_text, scores_text)) = truth_data {
        let by_id: BTreeMap<&str, &GroundTruthRecord> =
            records.iter().map(|r| (r.sentence_id.as_str(), r)).collect();
        let mut reports: Vec<CorrelationReport> = Vec::new();
        for result in &results {
            match by_id.get(result.sentence_id.as_str()) {
                Some(record) => {
                    for how in &aggregates {
                        match score_sentence(result, record, *how) {
                            Ok(report) => reports.push(report),
                            Err(e) => {
                                failures.insert(result.sentence_id.clone(), e.to_string());
                            }
                        }
                    }
                }
                None => {
                    failures.insert(
                        result.sentence_id.clone(),
                        "no ground truth record for this sentence".into(),
                    );
                }
            }
        }
        std::fs::write(out.join("evaluation.csv"), evaluation_csv(&reports)?)?;
        let mut summaries: BTreeMap<&'static str, EvaluationSummary> = BTreeMap::new();
        for how in &aggregates {
            let subset: Vec<CorrelationReport> =
                reports.iter().filter(|r| r.aggregate == *how).cloned().collect();
            summaries.insert(how.as_str(), summarize(&subset));
        }
        write_json(&out.join("summary.json"), &summaries)?;
        truth_files = Some((headlines_text, scores_text));
    }

    let metadata = run_metadata(
        config,
        &model,
        &profile,
        provider.corpus_size(),
        workers,
        &provider_content,
        &sentences_text,
        truth_files.as_ref(),
        &slots,
        &sentences,
        &failures,
    );
    write_json(&out.join("run-metadata.json"), &metadata)?;

    if !failures.is_empty() {
        write_json(&out.join("errors.json"), &failures)?;
    }

    Ok(BatchOutcome { processed: results.len(), failures, out_dir: out.clone() })
}

#[allow(clippy::too_many_arguments)]
fn run_metadata(
    config: &RunConfig,
    model: &Arc<EmotionModel>,
    profile: &LanguageProfile,
    corpus_size: u64,
    workers: usize,
    provider_content: &str,
    sentences_text: &str,
    truth_files: Option<&(String, String)>,
    slots: &[Option<SentenceResult>],
    sentences: &[(String, String)],
    failures: &BTreeMap<String, String>,
) -> Value {
    let mut checksums = BTreeMap::new();
    checksums.insert(
        "model".to_string(),
        json!({
            "name": model.name,
            "sha256": sha256_hex(serde_json::to_string(model.as_ref()).unwrap().as_bytes()),
        }),
    );
    // canonical profile digest: name, rules, and the sorted stop-word list
    let profile_canonical = serde_json::to_string(&json!({
        "name": profile.name,
        "min_keep_length": profile.min_keep_length,
        "ordinal_pattern": profile.ordinal_pattern,
        "stopwords": profile.stopwords_sorted(),
    }))
    .unwrap();
    checksums.insert(
        "profile".to_string(),
        json!({
            "name": profile.name,
            "sha256": sha256_hex(profile_canonical.as_bytes()),
        }),
    );
    checksums.insert(
        "provider".to_string(),
        json!({
            "path": config.provider.path().display().to_string(),
            "sha256": sha256_hex(provider_content.as_bytes()),
        }),
    );
    checksums.insert(
        "sentences".to_string(),
        json!({
            "path": config.sentences.display().to_string(),
            "sha256": sha256_hex(sentences_text.as_bytes()),
        }),
    );
    if let (Some((headlines_path, scores_path)), Some((headlines, scores))) =
        (&config.truth, truth_files)
    {
        checksums.insert(
            "truth_headlines".to_string(),
            json!({
                "path": headlines_path.display().to_string(),
                "sha256": sha256_hex(headlines.as_bytes()),
            }),
        );
        checksums.insert(
            "truth_scores".to_string(),
            json!({
                "path": scores_path.display().to_string(),
                "sha256": sha256_hex(scores.as_bytes()),
            }),
        );
    }

    let mut per_sentence: BTreeMap<String, Value> = BTreeMap::new();
    for (slot, (id, text)) in slots.iter().zip(sentences) {
        match slot {
            Some(result) => {
                per_sentence.insert(
                    id.clone(),
                    json!({
                        "text": text,
                        "tokens": result.tokens.tokens,
                        "k": result.stats.budget.k,
                        "w": result.stats.budget.w,
                        "budget_total": result.stats.budget.total,
                        "lookups": result.stats.lookups,
                        "mu1": result.context.map(|c| c.mu1),
                        "mu2": result.context.map(|c| c.mu2),
                        "degenerate": result.degenerate,
                    }),
                );
            }
            None => {
                per_sentence.insert(
                    id.clone(),
                    json!({
                        "text": text,
                        "error": failures.get(id),
                    }),
                );
            }
        }
    }

    json!({
        "tool": {"name": "emorank", "version": env!("CARGO_PKG_VERSION")},
        "model": {"name": model.name, "labels": model.labels},
        "profile": {
            "name": profile.name,
            "stopword_count": profile.stopword_count(),
            "stopwords": profile.stopwords_sorted(),
            "min_keep_length": profile.min_keep_length,
            "ordinal_pattern": profile.ordinal_pattern,
        },
        "measure": config.measure.as_str(),
        "rho": config.rho,
        "pming_scope": config.pming_scope.as_str(),
        "m": corpus_size,
        "provider": {"kind": config.provider.kind(), "path": config.provider.path().display().to_string()},
        "aggregate": config.aggregate.as_str(),
        "workers": workers,
        "fail_fast": config.fail_fast,
        "kendall_variant": "tau_b",
        "asset_checksums": checksums,
        "per_sentence": per_sentence,
    })
}

/// Build an index from an NDJSON corpus and write it as a reusable file.
pub fn build_index_file(corpus: &Path, out: &Path) -> Result<CorpusIndex, PipelineError> {
    let content = read_file(corpus)?;
    let index = crate::freqsource::load_corpus_ndjson(content.as_bytes())?;
    write_json(out, &index)?;
    Ok(index)
}

fn load_run_metadata(run_dir: &Path) -> Result<Value, PipelineError> {
    let text = read_file(&run_dir.join("run-metadata.json"))?;
    serde_json::from_str(&text).map_err(|e| {
        PipelineError::Config(format!("run-metadata.json is not valid JSON: {e}"))
    })
}

fn model_from_metadata(metadata: &Value) -> Result<Arc<EmotionModel>, PipelineError> {
    let name = metadata["model"]["name"]
        .as_str()
        .ok_or_else(|| PipelineError::Config("run metadata lacks model.name".into()))?;
    let labels: Vec<String> = metadata["model"]["labels"]
        .as_array()
        .ok_or_else(|| PipelineError::Config("run metadata lacks model.labels".into()))?
        .iter()
        .filter_map(|v| v.as_str().map(str::to_string))
        .collect();
    EmotionModel::new(name, labels)
        .map(Arc::new)
        .map_err(|e| PipelineError::Config(format!("run metadata model invalid: {e}")))
}

/// Rebuild one sentence's aggregate vector from a prior run's measures.json
/// and render it as a radar SVG.
pub fn radar_from_run(
    run_dir: &Path,
    sentence_id: &str,
    how: Aggregate,
) -> Result<String, PipelineError> {
    let metadata = load_run_metadata(run_dir)?;
    let model = model_from_metadata(&metadata)?;
    let measures: Value = serde_json::from_str(&read_file(&run_dir.join("measures.json"))?)
        .map_err(|e| PipelineError::Config(format!("measures.json is not valid JSON: {e}")))?;

    let sentence = measures.get(sentence_id).and_then(Value::as_object).ok_or_else(|| {
        PipelineError::Config(format!("sentence `{sentence_id}` not found in measures.json"))
    })?;
    let info = &metadata["per_sentence"][sentence_id];
    let title = info["text"].as_str().unwrap_or(sentence_id).to_string();
    let terms: Vec<String> = info["tokens"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
        .unwrap_or_else(|| sentence.keys().cloned().collect());

    let mut vectors = Vec::new();
    for term in &terms {
        let cells = sentence.get(term).and_then(Value::as_object).ok_or_else(|| {
            PipelineError::Config(format!("term `{term}` missing from measures.json"))
        })?;
        let raw: Vec<f64> = model
            .labels
            .iter()
            .map(|emotion| {
                cells
                    .get(emotion)
                    .and_then(|c| c["proximity"].as_f64())
                    .unwrap_or(0.0)
            })
            .collect();
        vectors.push(
            EmotionVector::from_raw(Arc::clone(&model), raw)
                .map_err(|e| PipelineError::Config(e.to_string()))?,
        );
    }
    let vector = if vectors.is_empty() {
        EmotionVector::zero(Arc::clone(&model))
    } else {
        crate::ranking::aggregate(&vectors, how)
            .map_err(|e| PipelineError::Config(e.to_string()))?
    };
    Ok(render_radar(sentence_id, &title, &terms, &vector, how))
}

/// Re-score a prior run's sentences.csv against ground truth, writing
/// evaluation.csv and summary.json into `out_dir`.
pub fn eval_from_run(
    run_dir: &Path,
    headlines_path: &Path,
    scores_path: &Path,
    aggregate: AggregateChoice,
    out_dir: &Path,
) -> Result<usize, PipelineError> {
    let records = load_ground_truth(&read_file(headlines_path)?, &read_file(scores_path)?)?;
    let by_id: BTreeMap<&str, &GroundTruthRecord> =
        records.iter().map(|r| (r.sentence_id.as_str(), r)).collect();

    let csv_text = read_file(&run_dir.join("sentences.csv"))?;
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().map_err(|e| PipelineError::Config(e.to_string()))?.clone();
    let labels: Vec<&str> = headers.iter().skip(2).take(headers.len() - 3).collect();
    if labels != SEMEVAL_LABELS {
        return Err(PipelineError::Eval(EvalError::ModelMismatch(format!("{labels:?}"))));
    }

    let wanted = aggregate.list();
    let mut reports = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| PipelineError::Config(e.to_string()))?;
        let id = row.get(0).unwrap_or("").to_string();
        let how = match row.get(1) {
            Some("avg") => Aggregate::Average,
            Some("max") => Aggregate::Max,
            other => {
                return Err(PipelineError::Config(format!("unknown aggregate {other:?}")))
            }
        };
        if !wanted.contains(&how) {
            continue;
        }
        let values: Vec<f64> = (2..2 + labels.len())
            .map(|i| row.get(i).unwrap_or("0").parse::<f64>().unwrap_or(0.0))
            .collect();
        let record = by_id
            .get(id.as_str())
            .ok_or_else(|| PipelineError::Eval(EvalError::Orphans(vec![id.clone()])))?;
        let truth: Vec<f64> = record.scores.iter().map(|s| *s as f64).collect();
        let degenerate = values.iter().all(|v| *v == 0.0);
        let (p, s, k) = if degenerate {
            (None, None, None)
        } else {
            (pearson(&values, &truth)?, spearman(&values, &truth)?, kendall(&values, &truth)?)
        };
        reports.push(CorrelationReport {
            sentence_id: id,
            aggregate: how,
            pearson: p,
            spearman: s,
            kendall: k,
            degenerate,
        });
    }

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("evaluation.csv"), evaluation_csv(&reports)?)?;
    let mut summaries: BTreeMap<&'static str, EvaluationSummary> = BTreeMap::new();
    for how in &wanted {
        let subset: Vec<CorrelationReport> =
            reports.iter().filter(|r| r.aggregate == *how).cloned().collect();
        summaries.insert(how.as_str(), summarize(&subset));
    }
    write_json(&out_dir.join("summary.json"), &summaries)?;
    Ok(reports.len())
}

/// Rebuild a fixture provider from a run's persisted occurrence dumps.
pub fn fixture_from_run(run_dir: &Path) -> Result<FixtureCounts, PipelineError> {
    let metadata = load_run_metadata(run_dir)?;
    let m = metadata["m"]
        .as_u64()
        .ok_or_else(|| PipelineError::Config("run metadata lacks m".into()))?;
    let dumps = load_dumps(run_dir)?;
    Ok(crate::freqsource::fixture_from_dumps(&dumps, m)?)
}
