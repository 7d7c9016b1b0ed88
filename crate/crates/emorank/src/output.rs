//! Batch output files: occurrence dumps, the measures dictionary, and the
//! word/sentence/evaluation CSVs. Everything here is deterministic:
//! sorted map keys, fixed row order, fixed 6-decimal numeric formatting.

use crate::evaluate::CorrelationReport;
use crate::freqsource::OccurrenceDumps;
use crate::proximity::MeasureKind;
use crate::ranking::{rank, Aggregate, SentenceResult};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

pub fn fixed6(v: f64) -> String {
    format!("{v:.6}")
}

fn csv_line<W: Write>(writer: &mut csv::Writer<W>, fields: &[String]) -> std::io::Result<()> {
    writer.write_record(fields).map_err(std::io::Error::other)
}

/// words.csv: one row per kept term per sentence, emotion columns in model
/// order, then the term's top-ranked emotion (blank for zero-evidence terms).
pub fn words_csv(results: &[&SentenceResult], labels: &[String]) -> std::io::Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["sentence_id".to_string(), "term".to_string()];
    header.extend(labels.iter().cloned());
    header.push("top_emotion".to_string());
    csv_line(&mut writer, &header)?;

    for result in results {
        for term in &result.tokens.tokens {
            let vector = &result.term_vectors[term];
            let mut row = vec![result.sentence_id.clone(), term.clone()];
            row.extend(vector.values().iter().map(|v| fixed6(*v)));
            row.push(if vector.is_zero() { String::new() } else { rank(vector)[0].clone() });
            csv_line(&mut writer, &row)?;
        }
    }
    writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))
}

/// sentences.csv: one row per sentence per aggregate, emotion columns in
/// model order, then the induced ranking as "a>b>c".
pub fn sentences_csv(
    results: &[&SentenceResult],
    labels: &[String],
    aggregates: &[Aggregate],
) -> std::io::Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["sentence_id".to_string(), "aggregate".to_string()];
    header.extend(labels.iter().cloned());
    header.push("rank".to_string());
    csv_line(&mut writer, &header)?;

    for result in results {
        for how in aggregates {
            let vector = result.vector(*how);
            let mut row = vec![result.sentence_id.clone(), how.as_str().to_string()];
            row.extend(vector.values().iter().map(|v| fixed6(*v)));
            row.push(result.ranking(*how).join(">"));
            csv_line(&mut writer, &row)?;
        }
    }
    writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))
}

/// evaluation.csv: sentence_id, aggregate, pearson, spearman, kendall;
/// undefined coefficients are empty cells.
pub fn evaluation_csv(reports: &[CorrelationReport]) -> std::io::Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    csv_line(
        &mut writer,
        &["sentence_id", "aggregate", "pearson", "spearman", "kendall"]
            .map(str::to_string),
    )?;
    let cell = |v: Option<f64>| v.map(fixed6).unwrap_or_default();
    for r in reports {
        csv_line(
            &mut writer,
            &[
                r.sentence_id.clone(),
                r.aggregate.as_str().to_string(),
                cell(r.pearson),
                cell(r.spearman),
                cell(r.kendall),
            ],
        )?;
    }
    writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))
}

/// The measures dictionary: sentence id -> word -> emotion -> all measure
/// values, plus a `_meta` entry carrying the run parameters and the
/// per-sentence context maxima.
pub fn measures_json(results: &[&SentenceResult], kind: MeasureKind, rho: f64, m: u64) -> Value {
    let mut root = Map::new();
    let mut mu1 = Map::new();
    let mut mu2 = Map::new();
    for result in results {
        root.insert(
            result.sentence_id.clone(),
            serde_json::to_value(&result.measures).expect("measure cells serialize"),
        );
        mu1.insert(result.sentence_id.clone(), json!(result.context.map(|c| c.mu1)));
        mu2.insert(result.sentence_id.clone(), json!(result.context.map(|c| c.mu2)));
    }
    root.insert(
        "_meta".into(),
        json!({
            "measure": kind.as_str(),
            "rho": rho,
            "m": m,
            "mu1": mu1,
            "mu2": mu2,
        }),
    );
    Value::Object(root)
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// Write the three occurrence dumps into a directory.
pub fn write_dumps(dir: &Path, dumps: &OccurrenceDumps) -> std::io::Result<()> {
    write_json(&dir.join("emotions.json"), &dumps.emotions)?;
    write_json(&dir.join("words.json"), &dumps.words)?;
    write_json(&dir.join("pairs.json"), &dumps.pairs)
}

/// Reload occurrence dumps previously written by [`write_dumps`].
pub fn load_dumps(dir: &Path) -> std::io::Result<OccurrenceDumps> {
    let read = |name: &str| std::fs::read_to_string(dir.join(name));
    Ok(OccurrenceDumps {
        emotions: serde_json::from_str(&read("emotions.json")?)?,
        words: serde_json::from_str(&read("words.json")?)?,
        pairs: serde_json::from_str(&read("pairs.json")?)?,
    })
}
