//! Basic-emotion models: named, ordered sets of emotion labels.
//!
//! A model fixes the dimension order of every emotion vector built against
//! it, so label order is authoritative and stable. Models are loaded from
//! JSON asset files; three well-known models ship built in.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::sync::Arc;
use thiserror::Error;

const EKMAN_JSON: &str = include_str!("../assets/models/ekman.json");
const PLUTCHIK_JSON: &str = include_str!("../assets/models/plutchik.json");
const LOVHEIM_JSON: &str = include_str!("../assets/models/lovheim.json");

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model field `{field}` is invalid: {reason}")]
    Schema { field: &'static str, reason: String },
    #[error("duplicate label `{0}` in model")]
    DuplicateLabel(String),
    #[error("invalid label `{label}`: {reason}")]
    InvalidLabel { label: String, reason: &'static str },
}

/// An ordered list of lowercase emotion words under a model name.
///
/// Invariants enforced at load time: at least two labels, all unique,
/// lowercase, non-empty, single words (no whitespace).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionModel {
    pub name: String,
    pub labels: Vec<String>,
}

impl EmotionModel {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Self, ModelError> {
        let model = EmotionModel { name: name.into(), labels };
        model.validate()?;
        Ok(model)
    }

    /// Number of emotions, i.e. the dimension of vectors built on this model.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Position of a label in the model order.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.name.trim().is_empty() {
            return Err(ModelError::Schema {
                field: "name",
                reason: "must be a non-empty string".into(),
            });
        }
        if self.labels.len() < 2 {
            return Err(ModelError::Schema {
                field: "labels",
                reason: format!("need at least 2 labels, got {}", self.labels.len()),
            });
        }
        let mut seen = HashSet::new();
        for label in &self.labels {
            if label.is_empty() {
                return Err(ModelError::InvalidLabel {
                    label: label.clone(),
                    reason: "empty label",
                });
            }
            if label.chars().any(|c| c.is_whitespace()) {
                // Multi-word expressions are rejected: every label must be a
                // single queryable term.
                return Err(ModelError::InvalidLabel {
                    label: label.clone(),
                    reason: "labels must be single words without whitespace",
                });
            }
            if label.chars().any(|c| c.is_uppercase()) {
                return Err(ModelError::InvalidLabel {
                    label: label.clone(),
                    reason: "labels must be lowercase",
                });
            }
            if !seen.insert(label.as_str()) {
                return Err(ModelError::DuplicateLabel(label.clone()));
            }
        }
        Ok(())
    }
}

/// Parse and validate a model-definition document (JSON).
pub fn load_model(document: &str) -> Result<EmotionModel, ModelError> {
    #[derive(Deserialize)]
    struct Raw {
        name: Option<String>,
        labels: Option<Vec<String>>,
    }
    let raw: Raw = serde_json::from_str(document)?;
    let name = raw.name.ok_or(ModelError::Schema {
        field: "name",
        reason: "missing".into(),
    })?;
    let labels = raw.labels.ok_or(ModelError::Schema {
        field: "labels",
        reason: "missing".into(),
    })?;
    EmotionModel::new(name, labels)
}

/// The three built-in models: Ekman (6), Plutchik (8), Lovheim (8).
pub fn builtin_models() -> Vec<Arc<EmotionModel>> {
    [EKMAN_JSON, PLUTCHIK_JSON, LOVHEIM_JSON]
        .iter()
        .map(|doc| Arc::new(load_model(doc).expect("builtin model assets are valid")))
        .collect()
}

/// Look up a built-in model by name.
pub fn builtin_model(name: &str) -> Option<Arc<EmotionModel>> {
    builtin_models().into_iter().find(|m| m.name == name)
}
