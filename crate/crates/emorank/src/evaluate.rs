//! Evaluation against human ground truth: affective-text dataset loading
//! and rank-correlation scoring (Pearson r, Spearman rho, Kendall tau-b).
//!
//! Correlations with zero variance on either side are reported as
//! undefined (None), never as 0: zero is a meaningful correlation value.

use crate::ranking::{Aggregate, SentenceResult};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Label order of the six-emotion annotation format (matches the Ekman
/// model order).
pub const SEMEVAL_LABELS: [&str; 6] = ["anger", "disgust", "fear", "joy", "sadness", "surprise"];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("{file} line {line}: {reason}")]
    Parse { file: &'static str, line: usize, reason: String },
    #[error("duplicate sentence id `{0}`")]
    DuplicateId(String),
    #[error("ids present in only one file: {0:?}")]
    Orphans(Vec<String>),
    #[error("score {score} for id `{id}` outside [0, 100]")]
    ScoreRange { id: String, score: i64 },
    #[error("result model `{0}` does not match the 6-emotion annotation order")]
    ModelMismatch(String),
    #[error("ground truth for `{0}` has {1} scores, expected 6")]
    ScoreArity(String, usize),
}

/// One annotated headline: id, text, and six 0-100 emotion intensities in
/// the [`SEMEVAL_LABELS`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundTruthRecord {
    pub sentence_id: String,
    pub text: String,
    pub scores: Vec<u32>,
}

/// Parse and join the two ground-truth files: headlines as "id@text"
/// lines, scores as "id s1 s2 s3 s4 s5 s6" lines.
pub fn load_ground_truth(
    headlines: &str,
    scores: &str,
) -> Result<Vec<GroundTruthRecord>, EvalError> {
    let headline_lines: Vec<&str> =
        headlines.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.trim().is_empty()).collect();
    let score_lines: Vec<&str> =
        scores.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.trim().is_empty()).collect();

    if headline_lines.is_empty() || score_lines.is_empty() {
        log::warn!("ground truth is empty (headlines: {}, scores: {}); no records loaded",
            headline_lines.len(), score_lines.len());
        return Ok(Vec::new());
    }

    let mut texts: BTreeMap<String, String> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (i, line) in headline_lines.iter().enumerate() {
        let (id, text) = line.split_once('@').ok_or_else(|| EvalError::Parse {
            file: "headlines",
            line: i + 1,
            reason: "expected `id@headline`".into(),
        })?;
        let id = id.trim().to_string();
        if texts.insert(id.clone(), text.to_string()).is_some() {
            return Err(EvalError::DuplicateId(id));
        }
        order.push(id);
    }

    let mut score_map: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for (i, line) in score_lines.iter().enumerate() {
        let mut fields = line.split_whitespace();
        let id = fields
            .next()
            .ok_or_else(|| EvalError::Parse {
                file: "scores",
                line: i + 1,
                reason: "empty line".into(),
            })?
            .to_string();
        let values: Vec<i64> = fields
            .map(|f| {
                f.parse::<i64>().map_err(|_| EvalError::Parse {
                    file: "scores",
                    line: i + 1,
                    reason: format!("`{f}` is not an integer"),
                })
            })
            .collect::<Result<_, _>>()?;
        if values.len() != 6 {
            return Err(EvalError::Parse {
                file: "scores",
                line: i + 1,
                reason: format!("expected 6 scores, got {}", values.len()),
            });
        }
        let mut scores = Vec::with_capacity(6);
        for v in values {
            if !(0..=100).contains(&v) {
                return Err(EvalError::ScoreRange { id, score: v });
            }
            scores.push(v as u32);
        }
        if score_map.insert(id.clone(), scores).is_some() {
            return Err(EvalError::DuplicateId(id));
        }
    }

    let mut orphans: Vec<String> = texts.keys().filter(|id| !score_map.contains_key(*id)).cloned().collect();
    orphans.extend(score_map.keys().filter(|id| !texts.contains_key(*id)).cloned());
    if !orphans.is_empty() {
        orphans.sort();
        return Err(EvalError::Orphans(orphans));
    }

    Ok(order
        .into_iter()
        .map(|id| {
            let text = texts[&id].clone();
            let scores = score_map[&id].clone();
            GroundTruthRecord { sentence_id: id, text, scores }
        })
        .collect())
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<(), EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(EvalError::TooShort(x.len()));
    }
    Ok(())
}

/// Product-moment correlation via a two-pass mean/covariance computation.
/// Constant input on either side is undefined.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, EvalError> {
    check_lengths(x, y)?;
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut covariance = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        covariance += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Ok(None);
    }
    Ok(Some((covariance / (var_x * var_y).sqrt()).clamp(-1.0, 1.0)))
}

/// Fractional ranks with ties receiving the average of their positions.
pub fn average_ranks(data: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data[a].total_cmp(&data[b]));
    let mut ranks = vec![0.0; data.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && data[order[j + 1]] == data[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average 1-based rank
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rho: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<f64>, EvalError> {
    check_lengths(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall tau-b with tie correction:
/// (C - D) / sqrt((n0 - n1)(n0 - n2)).
///
/// Computed by sorting on x and merge-counting y swaps, so the discordant
/// count never enumerates pairs explicitly.
pub fn kendall(x: &[f64], y: &[f64]) -> Result<Option<f64>, EvalError> {
    check_lengths(x, y)?;
    let n = x.len();
    // collapse -0.0 to 0.0 so the total order agrees with `==` tie runs
    let canon = |v: &f64| if *v == 0.0 { 0.0 } else { *v };
    let mut pairs: Vec<(f64, f64)> = x.iter().map(canon).zip(y.iter().map(canon)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let pairs_of = |run: usize| run * (run - 1) / 2;

    // Runs of equal x (and equal x,y) in the x-sorted order.
    let mut tied_x = 0usize;
    let mut tied_xy = 0usize;
    let mut run_x = 1usize;
    let mut run_xy = 1usize;
    for i in 1..n {
        if pairs[i].0 == pairs[i - 1].0 {
            run_x += 1;
            if pairs[i].1 == pairs[i - 1].1 {
                run_xy += 1;
            } else {
                tied_xy += pairs_of(run_xy);
                run_xy = 1;
            }
        } else {
            tied_x += pairs_of(run_x);
            run_x = 1;
            tied_xy += pairs_of(run_xy);
            run_xy = 1;
        }
    }
    tied_x += pairs_of(run_x);
    tied_xy += pairs_of(run_xy);

    // Bottom-up merge sort on y, counting swaps: each swap moves a smaller
    // y past a block of larger ys, i.e. counts one discordant pair each.
    let mut swaps = 0usize;
    let mut source = pairs;
    let mut buffer = source.clone();
    let mut width = 1usize;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut left, mut right) = (start, mid);
            let mut out = start;
            while left < mid || right < end {
                if left < mid
                    && (right >= end || source[left].1.total_cmp(&source[right].1) != std::cmp::Ordering::Greater)
                {
                    buffer[out] = source[left];
                    left += 1;
                } else {
                    buffer[out] = source[right];
                    swaps += mid - left;
                    right += 1;
                }
                out += 1;
            }
            start = end;
        }
        std::mem::swap(&mut source, &mut buffer);
        width *= 2;
    }

    // Runs of equal y in the y-sorted order.
    let mut tied_y = 0usize;
    let mut run_y = 1usize;
    for i in 1..n {
        if source[i].1 == source[i - 1].1 {
            run_y += 1;
        } else {
            tied_y += pairs_of(run_y);
            run_y = 1;
        }
    }
    tied_y += pairs_of(run_y);

    let total = pairs_of(n);
    if total == tied_x || total == tied_y {
        return Ok(None);
    }
    let concordant_minus_discordant =
        (total as f64) - (tied_x as f64) - (tied_y as f64) + (tied_xy as f64)
            - 2.0 * (swaps as f64);
    let denominator = ((total - tied_x) as f64 * (total - tied_y) as f64).sqrt();
    Ok(Some((concordant_minus_discordant / denominator).clamp(-1.0, 1.0)))
}

/// Per-sentence correlation between a result vector and the ground truth.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub sentence_id: String,
    pub aggregate: Aggregate,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub kendall: Option<f64>,
    /// True when the result vector was all-zero (no evidence).
    pub degenerate: bool,
}

/// Correlate a sentence's aggregate vector against its ground truth scores
/// with all three coefficients.
pub fn score_sentence(
    result: &SentenceResult,
    truth: &GroundTruthRecord,
    how: Aggregate,
) -> Result<CorrelationReport, EvalError> {
    let vector = result.vector(how);
    let labels = &vector.model().labels;
    if labels.len() != SEMEVAL_LABELS.len()
        || labels.iter().zip(SEMEVAL_LABELS).any(|(a, b)| a != b)
    {
        return Err(EvalError::ModelMismatch(vector.model().name.clone()));
    }
    if truth.scores.len() != labels.len() {
        return Err(EvalError::ScoreArity(truth.sentence_id.clone(), truth.scores.len()));
    }
    if vector.is_zero() {
        log::warn!("sentence `{}` has a degenerate vector; correlations undefined", result.sentence_id);
        return Ok(CorrelationReport {
            sentence_id: result.sentence_id.clone(),
            aggregate: how,
            pearson: None,
            spearman: None,
            kendall: None,
            degenerate: true,
        });
    }
    let x = vector.values();
    let y: Vec<f64> = truth.scores.iter().map(|s| *s as f64).collect();
    Ok(CorrelationReport {
        sentence_id: result.sentence_id.clone(),
        aggregate: how,
        pearson: pearson(x, &y)?,
        spearman: spearman(x, &y)?,
        kendall: kendall(x, &y)?,
        degenerate: false,
    })
}

/// Mean/min/max over the defined values of one coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSummary {
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub undefined: usize,
}

fn summarize_coefficient(values: impl Iterator<Item = Option<f64>>) -> CoefficientSummary {
    let mut defined = Vec::new();
    let mut undefined = 0;
    for v in values {
        match v {
            Some(v) => defined.push(v),
            None => undefined += 1,
        }
    }
    if defined.is_empty() {
        return CoefficientSummary { mean: None, min: None, max: None, undefined };
    }
    let mean = defined.iter().sum::<f64>() / defined.len() as f64;
    let min = defined.iter().copied().fold(f64::INFINITY, f64::min);
    let max = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CoefficientSummary { mean: Some(mean), min: Some(min), max: Some(max), undefined }
}

/// Dataset-level summary over a batch of correlation reports.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationSummary {
    pub sentences: usize,
    pub kendall_variant: &'static str,
    pub pearson: CoefficientSummary,
    pub spearman: CoefficientSummary,
    pub kendall: CoefficientSummary,
}

pub fn summarize(reports: &[CorrelationReport]) -> EvaluationSummary {
    EvaluationSummary {
        sentences: reports.len(),
        kendall_variant: "tau_b",
        pearson: summarize_coefficient(reports.iter().map(|r| r.pearson)),
        spearman: summarize_coefficient(reports.iter().map(|r| r.spearman)),
        kendall: summarize_coefficient(reports.iter().map(|r| r.kendall)),
    }
}
