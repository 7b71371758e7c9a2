//! On-disk record/replay cache: one JSON file per entry, named by the
//! request key, human-inspectable. Shipping recorded entries makes CI runs
//! network-free.

use crate::prompt::{ChatTranscript, Message};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

use super::{FinishReason, ModelConfig};

/// Everything that determines a model answer; the cache key is a pure
/// function of these fields, so identical requests map to identical keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRequest {
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub messages: Vec<Message>,
}

impl CacheRequest {
    pub fn new(config: &ModelConfig, transcript: &ChatTranscript) -> Self {
        Self {
            model: config.model_id.clone(),
            temperature: config.temperature,
            top_p: config.top_p,
            max_tokens: config.max_output_tokens,
            messages: transcript.messages().to_vec(),
        }
    }

    /// Content hash of the request: hex SHA-256 over its canonical JSON.
    pub fn key(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("request always serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

/// Model answer as stored on disk (the live/cache provenance marker is
/// added when the entry is read back).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredResponse {
    pub text: String,
    pub finish_reason: FinishReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_ms: Option<u64>,
}

/// One recorded exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub request: CacheRequest,
    pub response: StoredResponse,
    pub created_at: String,
    /// Integrity checksum over every other field; `verify` recomputes it.
    pub checksum: String,
}

impl CacheEntry {
    pub fn new(request: CacheRequest, response: StoredResponse, created_at: String) -> Self {
        let key = request.key();
        let checksum = entry_checksum(&key, &request, &response, &created_at);
        Self {
            key,
            request,
            response,
            created_at,
            checksum,
        }
    }
}

fn entry_checksum(
    key: &str,
    request: &CacheRequest,
    response: &StoredResponse,
    created_at: &str,
) -> String {
    let mut hasher = Sha256::new();
    hasher.update(key.as_bytes());
    hasher.update([0x1f]);
    hasher.update(serde_json::to_vec(request).expect("request always serializes"));
    hasher.update([0x1f]);
    hasher.update(serde_json::to_vec(response).expect("response always serializes"));
    hasher.update([0x1f]);
    hasher.update(created_at.as_bytes());
    hex::encode(hasher.finalize())
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache directory {path} is not accessible: {source}")]
    Dir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read cache entry {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write cache entry {path}: {source}")]
    WriteEntry {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache entry {path} is malformed: {message}")]
    Malformed { path: PathBuf, message: String },
}

/// A problem found by [`ResponseCache::verify`].
#[derive(Debug, Clone)]
pub struct CorruptEntry {
    pub file: PathBuf,
    pub key: String,
    pub reason: String,
}

/// Directory of one JSON file per cache entry, keyed by request hash.
/// Writes go through a temp file plus rename, so concurrent recorders
/// never leave a torn entry behind.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    /// Open (creating if needed) a cache directory.
    pub fn open(dir: &Path) -> Result<Self, CacheError> {
        std::fs::create_dir_all(dir).map_err(|source| CacheError::Dir {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    /// Open an existing cache directory; unlike [`ResponseCache::open`] this
    /// refuses to create one, which replay mode relies on.
    pub fn open_existing(dir: &Path) -> Result<Self, CacheError> {
        if !dir.is_dir() {
            return Err(CacheError::Dir {
                path: dir.to_path_buf(),
                source: std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    "cache directory does not exist",
                ),
            });
        }
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entry_path(key).is_file()
    }

    pub fn get(&self, key: &str) -> Result<Option<CacheEntry>, CacheError> {
        let path = self.entry_path(key);
        let raw = match std::fs::read_to_string(&path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Read { path, source }),
        };
        let entry: CacheEntry =
            serde_json::from_str(&raw).map_err(|e| CacheError::Malformed {
                path,
                message: e.to_string(),
            })?;
        Ok(Some(entry))
    }

    /// Persist an entry atomically (write-temp-then-rename).
    pub fn put(&self, entry: &CacheEntry) -> Result<(), CacheError> {
        let path = self.entry_path(&entry.key);
        let json = serde_json::to_string_pretty(entry).expect("entry always serializes");
        let mut tmp =
            tempfile::NamedTempFile::new_in(&self.dir).map_err(|source| CacheError::WriteEntry {
                path: path.clone(),
                source,
            })?;
        tmp.write_all(json.as_bytes())
            .map_err(|source| CacheError::WriteEntry {
                path: path.clone(),
                source,
            })?;
        tmp.persist(&path).map_err(|e| CacheError::WriteEntry {
            path,
            source: e.error,
        })?;
        Ok(())
    }

    /// Keys present in the cache, sorted.
    pub fn keys(&self) -> Result<Vec<String>, CacheError> {
        let mut keys = Vec::new();
        let entries = std::fs::read_dir(&self.dir).map_err(|source| CacheError::Dir {
            path: self.dir.clone(),
            source,
        })?;
        for entry in entries {
            let entry = entry.map_err(|source| CacheError::Dir {
                path: self.dir.clone(),
                source,
            })?;
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    keys.push(stem.to_string());
                }
            }
        }
        keys.sort();
        Ok(keys)
    }

    /// Check every entry: parseable JSON, key field matching the file name,
    /// key recomputable from the stored request, checksum intact.
    pub fn verify(&self) -> Result<Vec<CorruptEntry>, CacheError> {
        let mut corrupt = Vec::new();
        for key in self.keys()? {
            let path = self.entry_path(&key);
            match self.get(&key) {
                Err(CacheError::Malformed { message, .. }) => corrupt.push(CorruptEntry {
                    file: path,
                    key,
                    reason: format!("unparseable entry: {message}"),
                }),
                Err(e) => return Err(e),
                Ok(None) => corrupt.push(CorruptEntry {
                    file: path,
                    key,
                    reason: "entry disappeared during verification".into(),
                }),
                Ok(Some(entry)) => {
                    let reason = if entry.key != key {
                        Some(format!("file name does not match stored key {}", entry.key))
                    } else if entry.request.key() != key {
                        Some("stored request does not hash to the entry key".into())
                    } else if entry_checksum(
                        &entry.key,
                        &entry.request,
                        &entry.response,
                        &entry.created_at,
                    ) != entry.checksum
                    {
                        Some("checksum mismatch".into())
                    } else {
                        None
                    };
                    if let Some(reason) = reason {
                        corrupt.push(CorruptEntry {
                            file: path,
                            key,
                            reason,
                        });
                    }
                }
            }
        }
        Ok(corrupt)
    }

    /// Delete entries whose key is not in `keep`. Returns (kept, removed).
    pub fn prune(&self, keep: &std::collections::HashSet<String>) -> Result<(usize, usize), CacheError> {
        let mut kept = 0usize;
        let mut removed = 0usize;
        for key in self.keys()? {
            if keep.contains(&key) {
                kept += 1;
            } else {
                let path = self.entry_path(&key);
                std::fs::remove_file(&path)
                    .map_err(|source| CacheError::WriteEntry { path, source })?;
                removed += 1;
            }
        }
        Ok((kept, removed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt::ChatTranscript;
    use proptest::prelude::*;

    fn sample_request(content: &str) -> CacheRequest {
        CacheRequest::new(
            &ModelConfig::default(),
            &ChatTranscript::from_user(content),
        )
    }

    fn sample_entry(content: &str, answer: &str) -> CacheEntry {
        CacheEntry::new(
            sample_request(content),
            StoredResponse {
                text: answer.into(),
                finish_reason: FinishReason::Stop,
                latency_ms: Some(10),
            },
            "2026-01-01T00:00:00Z".into(),
        )
    }

    #[test]
    fn identical_requests_share_a_key() {
        assert_eq!(sample_request("hi").key(), sample_request("hi").key());
        assert_ne!(sample_request("hi").key(), sample_request("ho").key());
    }

    #[test]
    fn put_get_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let entry = sample_entry("question", "Yes: f");
        cache.put(&entry).unwrap();
        let back = cache.get(&entry.key).unwrap().unwrap();
        assert_eq!(back, entry);
        assert_eq!(cache.keys().unwrap(), vec![entry.key.clone()]);
    }

    #[test]
    fn verify_flags_flipped_byte() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let entry = sample_entry("question", "Yes: f");
        cache.put(&entry).unwrap();
        assert!(cache.verify().unwrap().is_empty());

        let path = dir.path().join(format!("{}.json", entry.key));
        let mut raw = std::fs::read_to_string(&path).unwrap();
        raw = raw.replacen("Yes: f", "Yes: g", 1);
        std::fs::write(&path, raw).unwrap();

        let corrupt = cache.verify().unwrap();
        assert_eq!(corrupt.len(), 1);
        assert_eq!(corrupt[0].key, entry.key);
    }

    #[test]
    fn prune_keeps_only_referenced_keys() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let keep_entry = sample_entry("keep", "No");
        let drop_entry = sample_entry("drop", "No");
        cache.put(&keep_entry).unwrap();
        cache.put(&drop_entry).unwrap();

        let keep: std::collections::HashSet<String> = [keep_entry.key.clone()].into();
        let (kept, removed) = cache.prune(&keep).unwrap();
        assert_eq!((kept, removed), (1, 1));
        assert!(cache.contains(&keep_entry.key));
        assert!(!cache.contains(&drop_entry.key));
    }

    proptest! {
        /// Perturbing any config field or any message byte must change the key.
        #[test]
        fn key_is_sensitive_to_every_field(
            content in "[a-zA-Z0-9 ]{1,40}",
            temp_bump in 0.001f64..2.0,
            tokens_bump in 1u32..100,
            byte in 0usize..40,
        ) {
            let base = sample_request(&content);
            let base_key = base.key();

            let mut m = base.clone();
            m.model.push('x');
            prop_assert_ne!(m.key(), base_key.clone());

            let mut t = base.clone();
            t.temperature += temp_bump;
            prop_assert_ne!(t.key(), base_key.clone());

            let mut p = base.clone();
            p.top_p -= 0.5;
            prop_assert_ne!(p.key(), base_key.clone());

            let mut mt = base.clone();
            mt.max_tokens += tokens_bump;
            prop_assert_ne!(mt.key(), base_key.clone());

            let mut msg = base.clone();
            let text = &mut msg.messages[0].content;
            if byte < text.len() && text.is_char_boundary(byte) {
                let mut chars: Vec<char> = text.chars().collect();
                let idx = byte.min(chars.len() - 1);
                chars[idx] = if chars[idx] == 'z' { 'a' } else { 'z' };
                *text = chars.into_iter().collect();
                if msg != base {
                    prop_assert_ne!(msg.key(), base_key.clone());
                }
            }
        }
    }
}
