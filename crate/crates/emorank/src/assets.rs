//! Asset discovery: models, language profiles, engine configs, and count
//! fixtures are JSON files in an assets directory, so new ones need no
//! code change. Built-in models and the English profile are always
//! available.

use crate::emomodel::{builtin_models, load_model, EmotionModel};
use crate::freqsource::{FixtureCounts, LiveProvider};
use crate::preprocess::{LanguageProfile, ProfileError};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

/// Environment variable overriding the default assets directory.
pub const ASSETS_ENV: &str = "EMORANK_ASSETS";

#[derive(Debug, Error)]
pub enum AssetError {
    #[error("unknown model `{0}` (not builtin, not found in assets)")]
    UnknownModel(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("asset `{path}` is invalid: {reason}")]
    Invalid { path: PathBuf, reason: String },
}

/// Resolve the active assets directory: explicit override, then the
/// `EMORANK_ASSETS` environment variable, then `./assets` when present.
pub fn assets_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(dir) = explicit {
        return Some(dir.to_path_buf());
    }
    if let Ok(dir) = std::env::var(ASSETS_ENV) {
        if !dir.trim().is_empty() {
            return Some(PathBuf::from(dir));
        }
    }
    let default = PathBuf::from("assets");
    default.is_dir().then_some(default)
}

fn json_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map(|entries| {
            entries
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

/// Find a model by name: assets directory first (so users can override),
/// then the builtins.
pub fn resolve_model(name: &str, assets: Option<&Path>) -> Result<Arc<EmotionModel>, AssetError> {
    if let Some(dir) = assets {
        for path in json_files(&dir.join("models")) {
            let text = std::fs::read_to_string(&path)
                .map_err(|source| AssetError::Io { path: path.clone(), source })?;
            if let Ok(model) = load_model(&text) {
                if model.name == name {
                    return Ok(Arc::new(model));
                }
            }
        }
    }
    crate::emomodel::builtin_model(name).ok_or_else(|| AssetError::UnknownModel(name.to_string()))
}

/// Find a language profile by name: assets directory first, then the
/// bundled English profile.
pub fn load_profile(name: &str, assets: Option<&Path>) -> Result<LanguageProfile, ProfileError> {
    if let Some(dir) = assets {
        for path in json_files(&dir.join("profiles")) {
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Ok(profile) = LanguageProfile::from_json(&text) {
                    if profile.name == name {
                        return Ok(profile);
                    }
                }
            }
        }
    }
    if name == "english" {
        return Ok(LanguageProfile::english());
    }
    Err(ProfileError::Unknown(name.to_string()))
}

/// One discovered asset file (or builtin) with its validation outcome.
#[derive(Debug, Clone, Serialize)]
pub struct AssetEntry {
    pub source: String,
    pub name: Option<String>,
    pub valid: bool,
    pub status: String,
}

impl AssetEntry {
    fn builtin(name: &str) -> Self {
        AssetEntry {
            source: "builtin".into(),
            name: Some(name.to_string()),
            valid: true,
            status: "ok".into(),
        }
    }

    fn from_file<T>(path: &Path, parse: impl Fn(&str) -> Result<T, String>, name_of: impl Fn(&T) -> Option<String>) -> Self {
        let source = path.display().to_string();
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                return AssetEntry { source, name: None, valid: false, status: e.to_string() }
            }
        };
        match parse(&text) {
            Ok(asset) => AssetEntry { source, name: name_of(&asset), valid: true, status: "ok".into() },
            Err(reason) => AssetEntry { source, name: None, valid: false, status: reason },
        }
    }
}

/// Inventory of everything discoverable, builtins included.
#[derive(Debug, Default, Serialize)]
pub struct AssetInventory {
    pub models: Vec<AssetEntry>,
    pub profiles: Vec<AssetEntry>,
    pub engines: Vec<AssetEntry>,
    pub fixtures: Vec<AssetEntry>,
}

/// Enumerate models, profiles, engine configs, and fixtures under an
/// assets directory. Invalid files are listed with their error, never
/// fatal.
pub fn list_assets(dir: Option<&Path>) -> AssetInventory {
    let mut inventory = AssetInventory::default();
    for model in builtin_models() {
        inventory.models.push(AssetEntry::builtin(&model.name));
    }
    inventory.profiles.push(AssetEntry::builtin("english"));

    let Some(dir) = dir else { return inventory };

    for path in json_files(&dir.join("models")) {
        inventory.models.push(AssetEntry::from_file(
            &path,
            |text| load_model(text).map_err(|e| e.to_string()),
            |m| Some(m.name.clone()),
        ));
    }
    for path in json_files(&dir.join("profiles")) {
        inventory.profiles.push(AssetEntry::from_file(
            &path,
            |text| LanguageProfile::from_json(text).map_err(|e| e.to_string()),
            |p| Some(p.name.clone()),
        ));
    }
    for path in json_files(&dir.join("engines")) {
        inventory.engines.push(AssetEntry::from_file(
            &path,
            |text| LiveProvider::from_json(text).map_err(|e| e.to_string()),
            |p| Some(p.engine_name().to_string()),
        ));
    }
    for path in json_files(&dir.join("fixtures")) {
        inventory.fixtures.push(AssetEntry::from_file(
            &path,
            |text| FixtureCounts::from_json(text).map_err(|e| e.to_string()),
            |_| None,
        ));
    }
    inventory
}
