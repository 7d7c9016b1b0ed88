//! Live hit-count client: queries a search engine over HTTP and scrapes
//! the reported result count out of the response body.
//!
//! Every lookup uses a fresh cookie-free session so results are not skewed
//! by history or personalization. Lookups are strictly serialized through
//! an internal gate, and randomized delays separate queries; on ban
//! detection the client backs off and retries until the budget runs out.

use super::{CountProvider, PairCount, ProviderError};
use rand::Rng;
use regex::Regex;
use serde::Deserialize;
use std::sync::Mutex;
use std::time::Duration;

/// Search-engine description loaded from a JSON asset.
#[derive(Debug, Clone, Deserialize)]
pub struct EngineConfig {
    pub name: String,
    /// Full URL with a `{query}` placeholder.
    pub url_template: String,
    /// Regex with one capture group matching the result count
    /// (digit grouping allowed, e.g. "About ([0-9.,]+) results").
    pub count_pattern: String,
    /// Body patterns that identify a block page.
    #[serde(default)]
    pub ban_patterns: Vec<String>,
    /// Random delay bounds in milliseconds, [min, max].
    #[serde(default = "default_delay")]
    pub delay_ms: [u64; 2],
    /// Total attempts allowed per lookup.
    #[serde(default = "default_retries")]
    pub retries: u32,
    /// Corpus size M to report, since live engines do not expose their
    /// index size.
    pub m: u64,
    /// Counts below this value are treated as a soft ban (0 disables).
    #[serde(default)]
    pub implausible_below: u64,
}

fn default_delay() -> [u64; 2] {
    [2000, 8000]
}

fn default_retries() -> u32 {
    3
}

pub struct LiveProvider {
    config: EngineConfig,
    count_re: Regex,
    ban_res: Vec<Regex>,
    /// Single-flight gate: one in-flight request at a time, so the rate
    /// contract holds even with concurrent callers.
    gate: Mutex<()>,
}

impl LiveProvider {
    pub fn new(config: EngineConfig) -> Result<Self, ProviderError> {
        if !config.url_template.contains("{query}") {
            return Err(ProviderError::EngineConfig(
                "url_template must contain a {query} placeholder".into(),
            ));
        }
        if config.m < 1 {
            return Err(ProviderError::EngineConfig("m must be >= 1".into()));
        }
        if config.retries < 1 {
            return Err(ProviderError::EngineConfig("retries must be >= 1".into()));
        }
        if config.delay_ms[0] > config.delay_ms[1] {
            return Err(ProviderError::EngineConfig("delay_ms must be [min, max]".into()));
        }
        let count_re = Regex::new(&config.count_pattern)
            .map_err(|e| ProviderError::EngineConfig(format!("count_pattern: {e}")))?;
        if count_re.captures_len() < 2 {
            return Err(ProviderError::EngineConfig(
                "count_pattern needs one capture group".into(),
            ));
        }
        let ban_res = config
            .ban_patterns
            .iter()
            .map(|p| {
                Regex::new(p).map_err(|e| ProviderError::EngineConfig(format!("ban_patterns: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LiveProvider { config, count_re, ban_res, gate: Mutex::new(()) })
    }

    pub fn from_json(document: &str) -> Result<Self, ProviderError> {
        let config: EngineConfig = serde_json::from_str(document)
            .map_err(|e| ProviderError::EngineConfig(e.to_string()))?;
        Self::new(config)
    }

    pub fn engine_name(&self) -> &str {
        &self.config.name
    }

    fn request_url(&self, query: &str) -> String {
        let encoded: String = url::form_urlencoded::byte_serialize(query.as_bytes()).collect();
        self.config.url_template.replace("{query}", &encoded)
    }

    fn random_delay(&self) {
        let [min, max] = self.config.delay_ms;
        if max == 0 {
            return;
        }
        let ms = rand::thread_rng().gen_range(min..=max);
        std::thread::sleep(Duration::from_millis(ms));
    }

    fn parse_count(&self, body: &str, query: &str) -> Result<u64, ProviderError> {
        let captures = self
            .count_re
            .captures(body)
            .ok_or_else(|| ProviderError::ScrapeFormat { query: query.to_string() })?;
        let digits: String = captures
            .get(1)
            .map(|m| m.as_str())
            .unwrap_or("")
            .chars()
            .filter(|c| c.is_ascii_digit())
            .collect();
        digits
            .parse::<u64>()
            .map_err(|_| ProviderError::ScrapeFormat { query: query.to_string() })
    }

    /// Issue one count query, with ban backoff and retries.
    pub fn live_lookup(&self, query: &str) -> Result<u64, ProviderError> {
        let _flight = self.gate.lock().expect("live provider gate poisoned");
        let url = self.request_url(query);
        let mut last_status: u16 = 0;

        for attempt in 1..=self.config.retries {
            // A fresh client per attempt: blank session, no cookies carried
            // across lookups.
            let client = reqwest::blocking::Client::builder()
                .build()
                .map_err(|e| ProviderError::Http { url: url.clone(), reason: e.to_string() })?;

            let banned_reason: String = match client.get(&url).send() {
                Err(e) => {
                    last_status = 0;
                    format!("transport error: {e}")
                }
                Ok(response) => {
                    let status = response.status();
                    last_status = status.as_u16();
                    let body = response.text().map_err(|e| ProviderError::Http {
                        url: url.clone(),
                        reason: e.to_string(),
                    })?;
                    if status.as_u16() == 429 || !status.is_success() {
                        format!("blocked with HTTP {status}")
                    } else if let Some(re) = self.ban_res.iter().find(|re| re.is_match(&body)) {
                        format!("block page matched pattern `{re}`")
                    } else {
                        let count = self.parse_count(&body, query)?;
                        if self.config.implausible_below > 0 && count < self.config.implausible_below
                        {
                            format!("implausibly low count {count}")
                        } else {
                            // Mimic a human pause between successful queries.
                            self.random_delay();
                            return Ok(count);
                        }
                    }
                }
            };

            log::warn!(
                "ban warning for query `{query}` (attempt {attempt}/{}): {banned_reason}",
                self.config.retries
            );
            if attempt < self.config.retries {
                self.random_delay();
            }
        }

        Err(ProviderError::Banned { query: query.to_string(), last_status })
    }
}

impl CountProvider for LiveProvider {
    fn name(&self) -> &str {
        "live"
    }

    fn corpus_size(&self) -> u64 {
        self.config.m
    }

    fn count_single(&self, term: &str) -> Result<u64, ProviderError> {
        if term.is_empty() {
            return Err(ProviderError::EmptyTerm);
        }
        self.live_lookup(term)
    }

    /// Pair queries go out in both directions ("x y" and "y x", bare
    /// conjunction); both raw values are kept and the minimum is used.
    fn count_pair(&self, x: &str, y: &str) -> Result<PairCount, ProviderError> {
        if x.is_empty() || y.is_empty() {
            return Err(ProviderError::EmptyTerm);
        }
        let forward = self.live_lookup(&format!("{x} {y}"))?;
        let backward = self.live_lookup(&format!("{y} {x}"))?;
        Ok(PairCount { forward, backward, lookups: 2 })
    }
}
