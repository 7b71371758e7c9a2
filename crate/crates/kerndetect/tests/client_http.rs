//! HTTP client behavior against a local stub endpoint: retry schedule,
//! non-retryable failures, and credential hygiene.

use kerndetect::client::{
    ChatClient, ClientError, HttpChatClient, Mode, ModelConfig, ResponseCache, RetryPolicy,
};
use kerndetect::prompt::ChatTranscript;
use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

/// Stub that answers each request with the next status in `plan` (the last
/// entry repeats). 200 responses carry a fixed chat-completion payload.
fn spawn_stub(plan: Vec<u16>, answer: &'static str) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&hits);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let n = counter.fetch_add(1, Ordering::SeqCst);
            let status = *plan.get(n).or(plan.last()).unwrap_or(&200);

            let mut buf = Vec::new();
            let mut chunk = [0u8; 4096];
            let mut body_len = 0usize;
            let mut header_end = 0usize;
            loop {
                match stream.read(&mut chunk) {
                    Ok(0) => break,
                    Ok(n) => buf.extend_from_slice(&chunk[..n]),
                    Err(_) => break,
                }
                if header_end == 0 {
                    if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
                        header_end = pos + 4;
                        let headers = String::from_utf8_lossy(&buf[..pos]).to_ascii_lowercase();
                        for line in headers.lines() {
                            if let Some(v) = line.strip_prefix("content-length:") {
                                body_len = v.trim().parse().unwrap_or(0);
                            }
                        }
                    }
                }
                if header_end > 0 && buf.len() >= header_end + body_len {
                    break;
                }
            }

            let response = if status == 200 {
                let body = serde_json::json!({
                    "choices": [{
                        "message": {"role": "assistant", "content": answer},
                        "finish_reason": "stop"
                    }]
                })
                .to_string();
                format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                )
            } else {
                let body = "busy";
                format!(
                    "HTTP/1.1 {status} X\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                )
            };
            let _ = stream.write_all(response.as_bytes());
        }
    });
    (format!("http://{addr}/v1"), hits)
}

fn fast_retry() -> RetryPolicy {
    RetryPolicy {
        max_attempts: 5,
        base_delay: Duration::from_millis(5),
    }
}

fn live_client(base_url: String, key: &str) -> HttpChatClient {
    HttpChatClient::new(
        ModelConfig::default(),
        base_url,
        Some(key.into()),
        Mode::Live,
        None,
        fast_retry(),
    )
}

#[test]
fn transient_failures_are_retried_until_success() {
    let (base_url, hits) = spawn_stub(vec![429, 500, 200], "Yes: f");
    let client = live_client(base_url, "k");
    let response = client.complete(&ChatTranscript::from_user("q")).unwrap();
    assert_eq!(response.text, "Yes: f");
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn retry_budget_is_bounded() {
    let (base_url, hits) = spawn_stub(vec![429], "unused");
    let client = live_client(base_url, "k");
    let err = client
        .complete(&ChatTranscript::from_user("q"))
        .unwrap_err();
    match err {
        ClientError::Http {
            status, attempts, ..
        } => {
            assert_eq!(status, 429);
            assert_eq!(attempts, 5);
        }
        other => panic!("expected http error, got {other}"),
    }
    assert_eq!(hits.load(Ordering::SeqCst), 5);
}

#[test]
fn client_errors_are_not_retried() {
    let (base_url, hits) = spawn_stub(vec![400], "unused");
    let client = live_client(base_url, "k");
    let err = client
        .complete(&ChatTranscript::from_user("q"))
        .unwrap_err();
    assert!(matches!(err, ClientError::Http { status: 400, attempts: 1, .. }), "{err}");
    assert_eq!(hits.load(Ordering::SeqCst), 1);
}

#[test]
fn credential_never_lands_in_cache_entries() {
    let secret = "sk-very-secret-credential";
    let (base_url, _) = spawn_stub(vec![200], "No");
    let dir = tempfile::tempdir().unwrap();
    let cache = ResponseCache::open(dir.path()).unwrap();
    let client = HttpChatClient::new(
        ModelConfig::default(),
        base_url,
        Some(secret.into()),
        Mode::Record,
        Some(cache),
        fast_retry(),
    );
    client.complete(&ChatTranscript::from_user("q")).unwrap();

    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let raw = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(!raw.contains(secret), "credential leaked into cache entry");
    }
}
