//! One detection = choose strategy, render prompts, call the client, parse
//! the final answer, and keep an auditable record.
//!
//! Per-unit failures never abort a corpus run: over-budget units are
//! skipped before any network call, and client errors become `Failed`
//! records that scoring later reports as not-scored.

use crate::client::{ChatClient, ModelConfig};
use crate::corpus::tokens::reduce_tokens;
use crate::corpus::{Corpus, SourceUnit};
use crate::parser::{parse_verdict, Verdict};
use crate::prompt::{Algorithm, AlgorithmQuery, ChatTranscript};
use crate::strategy::DetectionStrategy;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Terminal state of one detection attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectionStatus {
    Completed,
    /// The unit still exceeded the code budget after token reduction; no
    /// request was made.
    SkippedOverBudget { token_estimate: usize, budget: usize },
    Failed { reason: String },
}

/// Self-contained audit record of one detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub unit_id: String,
    pub query: Algorithm,
    pub strategy: String,
    pub status: DetectionStatus,
    pub transcripts: Vec<ChatTranscript>,
    pub responses: Vec<crate::client::RawResponse>,
    /// Present exactly when `status` is `Completed`; its `raw` field equals
    /// the final response text.
    pub verdict: Option<Verdict>,
    pub config: ModelConfig,
    pub started_at: String,
    pub finished_at: String,
}

impl DetectionRecord {
    pub fn is_scored(&self) -> bool {
        self.status == DetectionStatus::Completed
    }
}

/// Run one detection. Never fails: operational problems are captured in
/// the record's status.
pub fn detect(
    unit: &SourceUnit,
    algorithm: Algorithm,
    strategy: &dyn DetectionStrategy,
    client: &dyn ChatClient,
) -> DetectionRecord {
    let started_at = now();
    let query = AlgorithmQuery::new(algorithm);
    let config = client.config().clone();

    let overhead = strategy.overhead_tokens(&query, &config);
    let budget = (config.context_window as usize)
        .saturating_sub(config.max_output_tokens as usize)
        .saturating_sub(overhead)
        .max(1);
    let reduced = reduce_tokens(unit, budget);

    let mut record = DetectionRecord {
        unit_id: unit.id.clone(),
        query: algorithm,
        strategy: strategy.name().to_string(),
        status: DetectionStatus::Completed,
        transcripts: Vec::new(),
        responses: Vec::new(),
        verdict: None,
        config,
        started_at,
        finished_at: String::new(),
    };

    if reduced.over_budget {
        record.status = DetectionStatus::SkippedOverBudget {
            token_estimate: reduced.unit.token_estimate,
            budget,
        };
    } else {
        match strategy.execute(client, &query, &reduced.unit.text) {
            Ok(run) => {
                debug_assert_eq!(run.responses.len(), strategy.turns());
                let final_text = run
                    .responses
                    .last()
                    .map(|r| r.text.clone())
                    .unwrap_or_default();
                record.verdict = Some(parse_verdict(&final_text));
                record.transcripts = run.transcripts;
                record.responses = run.responses;
            }
            Err(e) => {
                record.status = DetectionStatus::Failed {
                    reason: e.to_string(),
                };
            }
        }
    }
    record.finished_at = now();
    record
}

/// Run every (unit x query) detection with at most `parallelism` in-flight
/// requests. Results come back sorted by (unit id, query), so concurrency
/// never changes downstream output.
pub fn run_corpus(
    corpus: &Corpus,
    queries: &[Algorithm],
    strategy: &dyn DetectionStrategy,
    client: &dyn ChatClient,
    parallelism: usize,
) -> Vec<DetectionRecord> {
    let jobs: Vec<(&SourceUnit, Algorithm)> = corpus
        .units()
        .iter()
        .flat_map(|u| queries.iter().map(move |q| (u, *q)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("worker pool builds");
    let mut records: Vec<DetectionRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|(unit, query)| detect(unit, *query, strategy, client))
            .collect()
    });
    records.sort_by(|a, b| (&a.unit_id, a.query).cmp(&(&b.unit_id, b.query)));
    records
}

/// Identity of the corpus a run was produced from: SHA-256 over unit ids
/// and text hashes in manifest order.
pub fn corpus_hash(corpus: &Corpus) -> String {
    let mut hasher = Sha256::new();
    for unit in corpus.units() {
        hasher.update(unit.id.as_bytes());
        hasher.update([0x1f]);
        hasher.update(Sha256::digest(unit.text.as_bytes()));
        hasher.update([0x1e]);
    }
    hex::encode(hasher.finalize())
}

/// Top-level description of a corpus run, stored as `run.json` in the run
/// directory next to `records/` and the reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub strategy: String,
    pub mode: String,
    pub config: ModelConfig,
    pub queries: Vec<Algorithm>,
    pub corpus_hash: String,
    pub unit_count: usize,
    pub record_count: usize,
}

#[derive(Debug, Error)]
pub enum RunDirError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Persist the run manifest and one structured record file per detection
/// under `out_dir` (`run.json`, `records/<unit>__<query>.json`).
pub fn write_run(
    out_dir: &Path,
    manifest: &RunManifest,
    records: &[DetectionRecord],
) -> Result<(), RunDirError> {
    let records_dir = out_dir.join("records");
    std::fs::create_dir_all(&records_dir).map_err(|source| RunDirError::Write {
        path: records_dir.clone(),
        source,
    })?;
    write_json(&out_dir.join("run.json"), manifest)?;
    for record in records {
        let name = format!(
            "{}__{}.json",
            sanitize_component(&record.unit_id),
            record.query.key()
        );
        write_json(&records_dir.join(name), record)?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunDirError> {
    let mut text = serde_json::to_string_pretty(value).expect("run data always serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| RunDirError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Make a unit id safe as a file-name component. Ids that need rewriting
/// get a short hash suffix so distinct ids cannot collide.
fn sanitize_component(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if safe == id {
        safe
    } else {
        let digest = hex::encode(Sha256::digest(id.as_bytes()));
        format!("{safe}-{}", &digest[..8])
    }
}

fn now() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    crate::client::unix_to_rfc3339(secs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::{ClientError, ModelConfig, RawResponse, ScriptedClient};
    use crate::corpus::Language;
    use crate::parser::VerdictKind;
    use crate::strategy::{DirectStrategy, ExplainThenAskStrategy};

    fn unit(id: &str, text: &str) -> SourceUnit {
        SourceUnit {
            id: id.into(),
            path: PathBuf::from(format!("{id}.c")),
            language: Language::C,
            text: text.into(),
            token_estimate: crate::corpus::tokens::estimate_tokens(text),
            suite: "gemm".into(),
        }
    }

    #[test]
    fn direct_detection_produces_one_pair() {
        let client = ScriptedClient::new(ModelConfig::default(), |_| "Yes: gemm".to_string());
        let record = detect(
            &unit("g1", "void gemm(){}"),
            Algorithm::Gemm,
            &DirectStrategy,
            &client,
        );
        assert_eq!(record.status, DetectionStatus::Completed);
        assert_eq!(record.transcripts.len(), 1);
        assert_eq!(record.responses.len(), 1);
        let verdict = record.verdict.unwrap();
        assert_eq!(verdict.kind, VerdictKind::Positive);
        assert_eq!(verdict.functions, vec!["gemm"]);
        assert_eq!(verdict.raw, record.responses[0].text);
    }

    #[test]
    fn explain_then_ask_produces_two_pairs_and_parses_only_the_second() {
        let client = ScriptedClient::new(ModelConfig::default(), |t| {
            if t.len() == 1 {
                "Yes: misleading_first_turn".to_string()
            } else {
                "No".to_string()
            }
        });
        let record = detect(
            &unit("c1", "void conv(){}"),
            Algorithm::Gemm,
            &ExplainThenAskStrategy,
            &client,
        );
        assert_eq!(record.responses.len(), 2);
        let verdict = record.verdict.unwrap();
        assert_eq!(verdict.kind, VerdictKind::Negative);
        assert_eq!(verdict.raw, record.responses[1].text);
    }

    #[test]
    fn over_budget_unit_is_skipped_without_any_call() {
        struct PanicClient(ModelConfig);
        impl ChatClient for PanicClient {
            fn complete(&self, _: &ChatTranscript) -> Result<RawResponse, ClientError> {
                panic!("over-budget unit must not reach the client");
            }
            fn config(&self) -> &ModelConfig {
                &self.0
            }
        }
        let config = ModelConfig {
            context_window: 700,
            ..ModelConfig::default()
        };
        let big = unit("big", &"int aaaaaaaa;\n".repeat(400));
        let record = detect(&big, Algorithm::Fft, &DirectStrategy, &PanicClient(config));
        assert!(matches!(
            record.status,
            DetectionStatus::SkippedOverBudget { .. }
        ));
        assert!(record.responses.is_empty());
        assert!(record.verdict.is_none());
    }

    #[test]
    fn client_failure_is_recorded_not_propagated() {
        struct FailingClient(ModelConfig);
        impl ChatClient for FailingClient {
            fn complete(&self, _: &ChatTranscript) -> Result<RawResponse, ClientError> {
                Err(ClientError::AuthMissing)
            }
            fn config(&self) -> &ModelConfig {
                &self.0
            }
        }
        let record = detect(
            &unit("u", "void f(){}"),
            Algorithm::Conv,
            &DirectStrategy,
            &FailingClient(ModelConfig::default()),
        );
        assert!(matches!(record.status, DetectionStatus::Failed { .. }));
    }

    #[test]
    fn replaying_a_record_reproduces_its_verdict() {
        let client = ScriptedClient::new(ModelConfig::default(), |_| "Yes: a, b".to_string());
        let record = detect(
            &unit("u", "void a(){} void b(){}"),
            Algorithm::Gemm,
            &DirectStrategy,
            &client,
        );
        let reparsed = parse_verdict(&record.responses.last().unwrap().text);
        assert_eq!(Some(reparsed), record.verdict);
    }

    #[test]
    fn record_serialization_round_trips() {
        let client = ScriptedClient::new(ModelConfig::default(), |_| "No".to_string());
        let record = detect(
            &unit("u", "void f(){}"),
            Algorithm::Fft,
            &DirectStrategy,
            &client,
        );
        let json = serde_json::to_string(&record).unwrap();
        let back: DetectionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);
    }

    #[test]
    fn sanitized_ids_stay_distinct() {
        let a = sanitize_component("a/b");
        let b = sanitize_component("a?b");
        assert_ne!(a, b);
        assert_eq!(sanitize_component("plain-id_1.c"), "plain-id_1.c");
    }
}
