//! Provider-agnostic chat-completions client with deterministic
//! configuration, bounded retries and an on-disk record/replay cache.
//!
//! The wire format is the de-facto chat-completions HTTP schema with a
//! configurable base URL, so any compatible provider or a local stub works.
//! Replay mode never touches the network: two corpus runs over the same
//! cache produce identical response sequences.

pub mod cache;

use crate::corpus::tokens::estimate_tokens;
use crate::prompt::ChatTranscript;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use std::time::{Duration, Instant};
use thiserror::Error;

pub use cache::{CacheEntry, CacheError, CacheRequest, CorruptEntry, ResponseCache, StoredResponse};

/// Sampling and sizing configuration for the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub model_id: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_output_tokens: u32,
    pub context_window: u32,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            model_id: "gpt-3.5-turbo-16k".into(),
            temperature: 0.0,
            top_p: 1.0,
            max_output_tokens: 512,
            context_window: 16_384,
        }
    }
}

/// Why the model stopped generating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinishReason {
    Stop,
    /// Output hit `max_tokens`; the text may be truncated, a known
    /// hallucination symptom (endless repetition of one name).
    Length,
    Other,
}

impl FinishReason {
    fn from_api(s: &str) -> Self {
        match s {
            "stop" => FinishReason::Stop,
            "length" => FinishReason::Length,
            _ => FinishReason::Other,
        }
    }
}

/// Where a response came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseSource {
    Live,
    Cache,
}

/// One model answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawResponse {
    pub text: String,
    pub finish_reason: FinishReason,
    pub source: ResponseSource,
    pub latency_ms: Option<u64>,
}

/// Network behavior of [`HttpChatClient::complete`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Call the endpoint; nothing is persisted.
    Live,
    /// Call the endpoint unless the cache already holds the answer, and
    /// persist every fresh answer.
    Record,
    /// Serve answers from the cache only; a miss is an error.
    Replay,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Live => "live",
            Mode::Record => "record",
            Mode::Replay => "replay",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "live" => Ok(Mode::Live),
            "record" => Ok(Mode::Record),
            "replay" => Ok(Mode::Replay),
            other => Err(format!("unknown mode \"{other}\" (live|record|replay)")),
        }
    }
}

/// Retry schedule for transient failures: up to `max_attempts` tries with
/// exponential backoff starting at `base_delay`.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
        }
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transcript needs ~{estimated} tokens plus {reserved} output tokens, exceeding the {window}-token context window")]
    TokenBudgetExceeded {
        estimated: usize,
        reserved: u32,
        window: u32,
    },
    #[error("replay cache has no entry for key {key}")]
    CacheMiss { key: String },
    #[error("no API key found; set the KERNDETECT_API_KEY (or OPENAI_API_KEY) environment variable")]
    AuthMissing,
    #[error("endpoint returned HTTP {status} after {attempts} attempt(s): {body}")]
    Http {
        status: u16,
        attempts: u32,
        body: String,
    },
    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint returned an unusable response: {0}")]
    MalformedResponse(String),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

/// Anything that can answer a chat transcript. The HTTP client is the real
/// implementation; tests substitute scripted ones.
pub trait ChatClient: Send + Sync {
    fn complete(&self, transcript: &ChatTranscript) -> Result<RawResponse, ClientError>;
    fn config(&self) -> &ModelConfig;
}

/// Chat-completions client over HTTP with a record/replay cache.
///
/// Safe to share across worker threads; the in-flight request count is
/// bounded by the caller's worker pool (see the pipeline's fan-out).
pub struct HttpChatClient {
    config: ModelConfig,
    base_url: String,
    api_key: Option<String>,
    mode: Mode,
    cache: Option<ResponseCache>,
    retry: RetryPolicy,
    http: OnceLock<reqwest::blocking::Client>,
}

/// Default public endpoint; override with `--base-url` for any compatible
/// provider or a local stub.
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";

impl HttpChatClient {
    pub fn new(
        config: ModelConfig,
        base_url: impl Into<String>,
        api_key: Option<String>,
        mode: Mode,
        cache: Option<ResponseCache>,
        retry: RetryPolicy,
    ) -> Self {
        Self {
            config,
            base_url: base_url.into(),
            api_key,
            mode,
            cache,
            retry,
            http: OnceLock::new(),
        }
    }

    /// Read the API key from the environment (`KERNDETECT_API_KEY`, falling
    /// back to `OPENAI_API_KEY`).
    pub fn api_key_from_env() -> Option<String> {
        std::env::var("KERNDETECT_API_KEY")
            .or_else(|_| std::env::var("OPENAI_API_KEY"))
            .ok()
            .filter(|k| !k.is_empty())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn http(&self) -> &reqwest::blocking::Client {
        self.http.get_or_init(|| {
            reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("default TLS-less client builds")
        })
    }

    fn check_budget(&self, transcript: &ChatTranscript) -> Result<(), ClientError> {
        let estimated = estimate_tokens(&transcript.combined_text());
        if estimated + self.config.max_output_tokens as usize > self.config.context_window as usize
        {
            return Err(ClientError::TokenBudgetExceeded {
                estimated,
                reserved: self.config.max_output_tokens,
                window: self.config.context_window,
            });
        }
        Ok(())
    }

    fn cached(&self, key: &str) -> Result<Option<RawResponse>, ClientError> {
        let Some(cache) = &self.cache else {
            return Ok(None);
        };
        Ok(cache.get(key)?.map(|entry| RawResponse {
            text: entry.response.text,
            finish_reason: entry.response.finish_reason,
            source: ResponseSource::Cache,
            latency_ms: entry.response.latency_ms,
        }))
    }

    fn live_call(&self, request: &CacheRequest) -> Result<RawResponse, ClientError> {
        let key = self.api_key.as_deref().ok_or(ClientError::AuthMissing)?;
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let body = serde_json::json!({
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_tokens,
        });

        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let started = Instant::now();
            let result = self
                .http()
                .post(&url)
                .bearer_auth(key)
                .json(&body)
                .send();
            match result {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let latency = started.elapsed().as_millis() as u64;
                        let payload: ApiResponse = resp
                            .json()
                            .map_err(|e| ClientError::MalformedResponse(e.to_string()))?;
                        let choice = payload
                            .choices
                            .into_iter()
                            .next()
                            .ok_or_else(|| ClientError::MalformedResponse("no choices".into()))?;
                        return Ok(RawResponse {
                            text: choice.message.content,
                            finish_reason: FinishReason::from_api(
                                choice.finish_reason.as_deref().unwrap_or("other"),
                            ),
                            source: ResponseSource::Live,
                            latency_ms: Some(latency),
                        });
                    }
                    let retryable = status.as_u16() == 429 || status.is_server_error();
                    if !retryable || attempt >= self.retry.max_attempts {
                        return Err(ClientError::Http {
                            status: status.as_u16(),
                            attempts: attempt,
                            body: resp.text().unwrap_or_default().chars().take(400).collect(),
                        });
                    }
                }
                Err(e) => {
                    if attempt >= self.retry.max_attempts {
                        return Err(ClientError::Transport {
                            attempts: attempt,
                            message: e.to_string(),
                        });
                    }
                }
            }
            std::thread::sleep(self.retry.base_delay * 2u32.pow(attempt - 1));
        }
    }

    fn now_rfc3339() -> String {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        unix_to_rfc3339(secs)
    }
}

/// Render UNIX seconds as a UTC RFC 3339 timestamp.
pub fn unix_to_rfc3339(secs: u64) -> String {
    let days = secs / 86_400;
    let rem = secs % 86_400;
    let (h, m, s) = (rem / 3600, (rem % 3600) / 60, rem % 60);
    // civil-from-days (Howard Hinnant's algorithm)
    let z = days as i64 + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let mo = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if mo <= 2 { y + 1 } else { y };
    format!("{y:04}-{mo:02}-{d:02}T{h:02}:{m:02}:{s:02}Z")
}

impl ChatClient for HttpChatClient {
    /// One completion under the configured mode.
    ///
    /// Preconditions are checked before any network activity: the transcript
    /// plus reserved output must fit the context window, and replay mode
    /// requires a recorded entry.
    fn complete(&self, transcript: &ChatTranscript) -> Result<RawResponse, ClientError> {
        self.check_budget(transcript)?;
        let request = CacheRequest::new(&self.config, transcript);
        let key = request.key();
        match self.mode {
            Mode::Replay => self
                .cached(&key)?
                .ok_or(ClientError::CacheMiss { key }),
            Mode::Record => {
                if let Some(hit) = self.cached(&key)? {
                    return Ok(hit);
                }
                let response = self.live_call(&request)?;
                if let Some(cache) = &self.cache {
                    cache.put(&CacheEntry::new(
                        request,
                        StoredResponse {
                            text: response.text.clone(),
                            finish_reason: response.finish_reason,
                            latency_ms: response.latency_ms,
                        },
                        Self::now_rfc3339(),
                    ))?;
                }
                Ok(response)
            }
            Mode::Live => self.live_call(&request),
        }
    }

    fn config(&self) -> &ModelConfig {
        &self.config
    }
}

#[derive(Deserialize)]
struct ApiResponse {
    choices: Vec<ApiChoice>,
}

#[derive(Deserialize)]
struct ApiChoice {
    message: ApiMessage,
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ApiMessage {
    content: String,
}

/// Deterministic in-process stand-in for the HTTP client: answers each
/// transcript by applying a scripting function to it. Used by tests and by
/// the fixture generator.
pub struct ScriptedClient<F>
where
    F: Fn(&ChatTranscript) -> String + Send + Sync,
{
    config: ModelConfig,
    script: F,
}

impl<F> ScriptedClient<F>
where
    F: Fn(&ChatTranscript) -> String + Send + Sync,
{
    pub fn new(config: ModelConfig, script: F) -> Self {
        Self { config, script }
    }
}

impl<F> ChatClient for ScriptedClient<F>
where
    F: Fn(&ChatTranscript) -> String + Send + Sync,
{
    fn complete(&self, transcript: &ChatTranscript) -> Result<RawResponse, ClientError> {
        Ok(RawResponse {
            text: (self.script)(transcript),
            finish_reason: FinishReason::Stop,
            source: ResponseSource::Live,
            latency_ms: None,
        })
    }

    fn config(&self) -> &ModelConfig {
        &self.config
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt::ChatTranscript;

    fn replay_client(cache: ResponseCache) -> HttpChatClient {
        HttpChatClient::new(
            ModelConfig::default(),
            "http://127.0.0.1:1",
            None,
            Mode::Replay,
            Some(cache),
            RetryPolicy::default(),
        )
    }

    #[test]
    fn replay_returns_recorded_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let transcript = ChatTranscript::from_user("question");
        let request = CacheRequest::new(&ModelConfig::default(), &transcript);
        cache
            .put(&CacheEntry::new(
                request,
                StoredResponse {
                    text: "Yes: matmul".into(),
                    finish_reason: FinishReason::Stop,
                    latency_ms: Some(42),
                },
                "2026-01-01T00:00:00Z".into(),
            ))
            .unwrap();

        let client = replay_client(cache);
        let resp = client.complete(&transcript).unwrap();
        assert_eq!(resp.text, "Yes: matmul");
        assert_eq!(resp.source, ResponseSource::Cache);
    }

    #[test]
    fn replay_miss_names_the_key() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let client = replay_client(cache);
        let transcript = ChatTranscript::from_user("unseen");
        let expected = CacheRequest::new(&ModelConfig::default(), &transcript).key();
        match client.complete(&transcript).unwrap_err() {
            ClientError::CacheMiss { key } => assert_eq!(key, expected),
            other => panic!("expected cache miss, got {other}"),
        }
    }

    #[test]
    fn oversized_transcript_fails_before_any_network() {
        // no cache, no key, unroutable base URL: an error other than
        // TokenBudgetExceeded would mean the network was touched
        let client = HttpChatClient::new(
            ModelConfig::default(),
            "http://127.0.0.1:1",
            None,
            Mode::Live,
            None,
            RetryPolicy::default(),
        );
        let transcript = ChatTranscript::from_user("x".repeat(17_000 * 4));
        assert!(matches!(
            client.complete(&transcript).unwrap_err(),
            ClientError::TokenBudgetExceeded { .. }
        ));
    }

    #[test]
    fn live_without_key_is_an_auth_error() {
        let client = HttpChatClient::new(
            ModelConfig::default(),
            "http://127.0.0.1:1",
            None,
            Mode::Live,
            None,
            RetryPolicy::default(),
        );
        assert!(matches!(
            client.complete(&ChatTranscript::from_user("q")).unwrap_err(),
            ClientError::AuthMissing
        ));
    }

    #[test]
    fn rfc3339_rendering() {
        assert_eq!(unix_to_rfc3339(0), "1970-01-01T00:00:00Z");
        assert_eq!(unix_to_rfc3339(1_767_225_600), "2026-01-01T00:00:00Z");
    }
}
