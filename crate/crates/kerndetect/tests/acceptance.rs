//! Acceptance suite: each test checks one release criterion at its stated
//! tolerance and prints a pass line (run with `--nocapture` to see them).
//!
//! The benchmark numbers come from replaying the shipped fixture caches;
//! live model output is not reproducible at desk scale, so acceptance
//! rests on fixture replay plus property checks.

use kerndetect::client::{
    CacheRequest, ChatClient, HttpChatClient, Mode, ModelConfig, ResponseCache, ResponseSource,
    RetryPolicy, ScriptedClient,
};
use kerndetect::corpus::{Corpus, GroundTruth, Label, Language, SourceUnit};
use kerndetect::evaluation::report::trunc1;
use kerndetect::evaluation::{
    accuracy, classify, confusion_matrices, error_breakdown, pool_for_query, score_records,
    ConfusionMatrix, Outcome, OutcomeClass,
};
use kerndetect::parser::{normalize_negative, normalize_positive, parse_verdict, VerdictKind};
use kerndetect::pipeline::{run_corpus, DetectionRecord, DetectionStatus};
use kerndetect::prompt::{
    render_direct, render_explain, render_followup, Algorithm, AlgorithmQuery, ChatTranscript,
};
use kerndetect::strategy::DirectStrategy;
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn outcomes_for(query: Algorithm, tp: usize, fn_count: usize, fp: usize, tn: usize) -> Vec<Outcome> {
    let mut outcomes = Vec::new();
    let mut push = |class: OutcomeClass, n: usize, tag: &str| {
        for i in 0..n {
            outcomes.push(Outcome {
                unit_id: format!("{tag}_{i}"),
                query,
                class,
                fn_error: if class == OutcomeClass::FalseNegative {
                    Some(kerndetect::evaluation::FnError::Missed)
                } else {
                    None
                },
            });
        }
    };
    push(OutcomeClass::TruePositive, tp, "tp");
    push(OutcomeClass::FalseNegative, fn_count, "fn");
    push(OutcomeClass::FalsePositive, fp, "fp");
    push(OutcomeClass::TrueNegative, tn, "tn");
    outcomes
}

#[test]
fn criterion_1_confusion_matrix_arithmetic() {
    // (query, tp, fn, fp, tn, published accuracy %)
    let cases = [
        (Algorithm::Gemm, 119, 9, 111, 146, 68.8),
        (Algorithm::Conv, 15, 0, 299, 71, 22.3),
        (Algorithm::Fft, 15, 0, 80, 290, 79.2),
        (Algorithm::Gemm, 109, 19, 15, 242, 91.1),
        (Algorithm::Conv, 13, 2, 6, 364, 97.9),
        (Algorithm::Fft, 14, 1, 0, 370, 99.7),
    ];
    for (query, tp, fn_count, fp, tn, expected) in cases {
        let outcomes = outcomes_for(query, tp, fn_count, fp, tn);
        let matrices = confusion_matrices(&outcomes);
        let matrix = matrices[&query];
        assert_eq!(
            (matrix.tp, matrix.fn_count, matrix.fp, matrix.tn),
            (tp, fn_count, fp, tn)
        );
        let reported = trunc1(100.0 * accuracy(&matrix).unwrap());
        assert!(
            (reported - expected).abs() <= 0.05,
            "{query}: reported {reported}, expected {expected}"
        );
    }
    println!("criterion 1 (confusion-matrix arithmetic): PASS");
}

#[test]
fn criterion_2_pooling_counts() {
    let fixtures = fixtures_dir();
    let corpus = Corpus::load(&fixtures.join("manifest.toml"), &fixtures).unwrap();
    assert_eq!(corpus.len(), 385, "fixture corpus replicates the published sizes");

    let expectations = [
        (Algorithm::Gemm, 128, 257),
        (Algorithm::Conv, 15, 370),
        (Algorithm::Fft, 15, 370),
    ];
    for (query, positives, negatives) in expectations {
        let (pos, neg) = pool_for_query(&corpus, query);
        assert_eq!((pos.len(), neg.len()), (positives, negatives), "{query}");
        assert!(pos.is_disjoint(&neg));
        assert_eq!(pos.len() + neg.len(), corpus.len());
    }
    println!("criterion 2 (pooling counts): PASS");
}

#[test]
fn criterion_3_parser_golden_suite() {
    // normalization goldens: exact string equality
    let positive_norm: &[(&str, &str)] = &[
        // removal of "." then "()"
        ("Yes: gemm_nn().", "Yes: gemm_nn"),
        // removal of "\nNo"
        ("Yes: fft\nNo", "Yes: fft"),
        // removal of lone newline
        ("Yes: a\nb", "Yes: ab"),
        // nothing listed present
        ("Yes: a, b", "Yes: a, b"),
        // removal order: "." first exposes "()" for the later pass
        ("Yes: f(.)", "Yes: f"),
        // whitespace trim
        ("  Yes: f  ", "Yes: f"),
        ("", ""),
    ];
    for (input, expected) in positive_norm {
        assert_eq!(&normalize_positive(input), expected, "input {input:?}");
        let once = normalize_positive(input);
        assert_eq!(normalize_positive(&once), once, "idempotence on {input:?}");
    }

    let negative_norm: &[(&str, &str)] = &[
        ("No. The code does not contain any function", "No"),
        ("No", "No"),
        ("No, there is no function performing it", "No, performing it"),
        ("no, THERE IS NO FUNCTION", "no"),
        ("No.", "No"),
        ("No, there is no function", "No"),
        ("There is no function", ""),
    ];
    for (input, expected) in negative_norm {
        assert_eq!(&normalize_negative(input), expected, "input {input:?}");
        let once = normalize_negative(input);
        assert_eq!(normalize_negative(&once), once, "idempotence on {input:?}");
    }

    // verdict goldens
    let positive: &[(&str, &[&str])] = &[
        ("Yes: f", &["f"]),
        ("Yes: matmul, matmul_tiled", &["matmul", "matmul_tiled"]),
        ("Yes: matmul and helper", &["matmul", "helper"]),
        ("Yes: a, b, and c", &["a", "b", "c"]),
        ("yes: lower_case", &["lower_case"]),
        ("Yes: `ticked`", &["ticked"]),
        ("Yes: with_parens().", &["with_parens"]),
        ("Yes: dup, dup", &["dup"]),
        ("Yes: Conv<float>::forward_cpu", &["Conv<float>::forward_cpu"]),
        ("Yes: fft\nNo", &["fft"]),
    ];
    for (input, functions) in positive {
        let v = parse_verdict(input);
        assert_eq!(v.kind, VerdictKind::Positive, "input {input:?}");
        assert_eq!(&v.functions, functions, "input {input:?}");
        assert_eq!(v.raw, *input);
    }

    let negative: &[&str] = &[
        "No",
        "no",
        "No.",
        "No, there is no function",
        "No. The code does not contain any function",
        "  No  ",
    ];
    for input in negative {
        let v = parse_verdict(input);
        assert_eq!(v.kind, VerdictKind::Negative, "input {input:?}");
        assert!(v.functions.is_empty());
    }

    let unparseable: &[&str] = &[
        "Yes: the function `Conv<float>::forward_cpu` performs a convolution",
        "Yes: it depends on the input",
        "Yes",
        "Maybe",
        "The code contains a matrix multiplication",
        "No, performing it",
        "",
    ];
    for input in unparseable {
        let v = parse_verdict(input);
        assert_eq!(v.kind, VerdictKind::Unparseable, "input {input:?}");
        assert!(v.functions.is_empty());
    }

    let total = positive_norm.len() + negative_norm.len() + positive.len() + negative.len()
        + unparseable.len();
    assert!(total >= 20, "golden suite has {total} cases");
    println!("criterion 3 (parser golden suite, {total} cases): PASS");
}

fn synthetic_positive_record(id: &str, query: Algorithm, answer: &str) -> (DetectionRecord, GroundTruth) {
    let record = DetectionRecord {
        unit_id: id.to_string(),
        query,
        strategy: "direct".into(),
        status: DetectionStatus::Completed,
        transcripts: Vec::new(),
        responses: Vec::new(),
        verdict: Some(parse_verdict(answer)),
        config: ModelConfig::default(),
        started_at: String::new(),
        finished_at: String::new(),
    };
    let truth = GroundTruth {
        unit_id: id.to_string(),
        algorithm: Label::from(query),
        variant: None,
        outermost_function: Some(format!("outer_{id}")),
    };
    (record, truth)
}

#[test]
fn criterion_4_error_taxonomy_tables() {
    // (missed, wrong function, unparseable) per published table row
    for (tag, (e1, e2, e3)) in [("first", (2usize, 2usize, 5usize)), ("second", (1, 11, 7))] {
        let mut outcomes = Vec::new();
        for i in 0..(e1 + e2 + e3) {
            let id = format!("{tag}_{i}");
            let answer = if i < e1 {
                "No".to_string()
            } else if i < e1 + e2 {
                "Yes: not_the_outermost".to_string()
            } else {
                "Yes: the method `K<T>::run` performs it".to_string()
            };
            let (record, truth) = synthetic_positive_record(&id, Algorithm::Gemm, &answer);
            outcomes.push(classify(&record, &truth).unwrap());
        }
        let breakdown = error_breakdown(&outcomes)[&Algorithm::Gemm];
        assert_eq!(
            (breakdown.missed, breakdown.wrong_function, breakdown.unparseable),
            (e1, e2, e3),
            "{tag} table"
        );
        let matrix = confusion_matrices(&outcomes)[&Algorithm::Gemm];
        assert_eq!(breakdown.total(), matrix.fn_count);
    }
    println!("criterion 4 (error-taxonomy tables): PASS");
}

#[test]
fn criterion_4_error_taxonomy_property() {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, TestRunner};

    let mut runner = TestRunner::new(Config {
        cases: 1000,
        ..Config::default()
    });
    let strategy = proptest::collection::vec((0u8..8, 0u8..3, proptest::bool::ANY), 1..60);
    runner
        .run(&strategy, |runs| {
            let mut outcomes = Vec::new();
            for (i, (style, query_idx, positive_unit)) in runs.iter().enumerate() {
                let query = Algorithm::ALL[*query_idx as usize];
                let id = format!("u{i}");
                let answer = match style {
                    0 => format!("Yes: outer_{id}"),
                    1 => "Yes: wrong_function".to_string(),
                    2 => "No".to_string(),
                    3 => "Yes: the member `A<B>::f` does this".to_string(),
                    4 => "unclear output".to_string(),
                    5 => "No, there is no function".to_string(),
                    6 => format!("Yes: helper, outer_{id}"),
                    _ => "Yes: ".to_string(),
                };
                let (mut record, mut truth) = synthetic_positive_record(&id, query, &answer);
                if !positive_unit {
                    truth.algorithm = Label::None;
                    truth.outermost_function = None;
                    record.verdict = Some(parse_verdict(&answer));
                }
                outcomes.push(classify(&record, &truth).unwrap());
            }
            let matrices = confusion_matrices(&outcomes);
            let breakdowns = error_breakdown(&outcomes);
            for (query, matrix) in &matrices {
                let total = breakdowns.get(query).map(|b| b.total()).unwrap_or(0);
                prop_assert_eq!(total, matrix.fn_count, "query {}", query);
            }
            Ok(())
        })
        .unwrap();
    println!("criterion 4 (error1+error2+error3 == fn, 1000 cases): PASS");
}

#[test]
fn criterion_5_replay_determinism() {
    let fixtures = fixtures_dir();
    let started = std::time::Instant::now();
    let out_dirs = [
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    ];
    for out in &out_dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_kerndetect"))
            .args([
                "bench",
                "--manifest",
                fixtures.join("manifest.toml").to_str().unwrap(),
                "--cache-dir",
                fixtures.join("cache-direct").to_str().unwrap(),
                "--strategy",
                "direct",
                "--mode",
                "replay",
                "--out-dir",
                out.path().to_str().unwrap(),
            ])
            .env_remove("KERNDETECT_API_KEY")
            .env_remove("OPENAI_API_KEY")
            .status()
            .unwrap();
        assert!(status.success(), "bench exit: {status}");
    }
    let elapsed = started.elapsed();

    for name in ["report.json", "report.txt"] {
        let a = std::fs::read(out_dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(out_dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between replay runs");
    }
    assert!(
        elapsed.as_secs() < 60,
        "two 385-unit x 3-query replay benches took {elapsed:?}"
    );
    println!(
        "criterion 5 (replay determinism, 2 runs in {:.1}s): PASS",
        elapsed.as_secs_f64()
    );
}

/// Small deterministic generator for randomized trials.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Independent naive recount over raw records: one linear tally per query,
/// straight from verdicts and truths, sharing nothing with the scoring fold.
fn brute_force_recount(
    records: &[DetectionRecord],
    corpus: &Corpus,
) -> BTreeMap<Algorithm, ConfusionMatrix> {
    let mut out = BTreeMap::new();
    for query in Algorithm::ALL {
        let mut matrix = ConfusionMatrix::default();
        for record in records {
            if record.query != query {
                continue;
            }
            let Some(verdict) = &record.verdict else {
                continue;
            };
            let truth = corpus.truth(&record.unit_id).unwrap();
            let unit_is_positive = match truth.algorithm {
                Label::Gemm => query == Algorithm::Gemm,
                Label::Conv => query == Algorithm::Conv,
                Label::Fft => query == Algorithm::Fft,
                Label::None => false,
            };
            let claimed = verdict.kind == VerdictKind::Positive;
            if unit_is_positive {
                let expected = truth.outermost_function.as_deref().unwrap();
                let tail = |s: &str| s.rsplit("::").next().unwrap_or(s).to_string();
                let found = claimed
                    && verdict
                        .functions
                        .iter()
                        .any(|f| f == expected || tail(f) == tail(expected));
                if found {
                    matrix.tp += 1;
                } else {
                    matrix.fn_count += 1;
                }
            } else if claimed {
                matrix.fp += 1;
            } else {
                matrix.tn += 1;
            }
        }
        out.insert(query, matrix);
    }
    out
}

#[test]
fn criterion_6_oracle_equivalence() {
    let suites: [(&str, Label); 5] = [
        ("gemm", Label::Gemm),
        ("conv", Label::Conv),
        ("fft", Label::Fft),
        ("caffe", Label::None),
        ("cpufetch", Label::None),
    ];

    for trial in 0..100u64 {
        let mut rng = Lcg(trial * 7919 + 17);
        let unit_count = 3 + rng.below(48) as usize; // <= 50
        let mut units = Vec::new();
        let mut truths = Vec::new();
        let mut answers: BTreeMap<(String, Algorithm), String> = BTreeMap::new();

        for i in 0..unit_count {
            let (suite, label) = suites[rng.below(suites.len() as u64) as usize];
            let id = format!("t{trial}_u{i}");
            let marker = format!("unit_marker_{id}");
            let text = format!("/* {marker} */\nvoid outer_{id}(void) {{ }}\n");
            units.push(SourceUnit {
                id: id.clone(),
                path: PathBuf::from(format!("{id}.c")),
                language: Language::C,
                token_estimate: kerndetect::estimate_tokens(&text),
                text,
                suite: suite.to_string(),
            });
            truths.push(GroundTruth {
                unit_id: id.clone(),
                algorithm: label,
                variant: None,
                outermost_function: match label {
                    Label::None => None,
                    _ => Some(format!("outer_{id}")),
                },
            });
            for query in Algorithm::ALL {
                let answer = match rng.below(9) {
                    0 => format!("Yes: outer_{id}"),
                    1 => format!("Yes: outer_{id}()."),
                    2 => format!("Yes: helper, outer_{id}"),
                    3 => "Yes: some_other_function".to_string(),
                    4 => "No".to_string(),
                    5 => "No. The code does not contain any function".to_string(),
                    6 => "Yes: the routine `X<Y>::go` handles it".to_string(),
                    7 => "hard to say".to_string(),
                    _ => "Yes: a and b".to_string(),
                };
                answers.insert((marker.clone(), query), answer);
            }
        }

        let corpus = Corpus::from_parts(units, truths).unwrap();
        let lookup = answers.clone();
        let client = ScriptedClient::new(ModelConfig::default(), move |t: &ChatTranscript| {
            let content = &t.messages()[0].content;
            let marker_start = content.find("unit_marker_").expect("marker present");
            let marker_end = content[marker_start..].find(' ').unwrap() + marker_start;
            let marker = &content[marker_start..marker_end];
            let query = Algorithm::ALL
                .into_iter()
                .find(|a| content.contains(AlgorithmQuery::new(*a).display_name()))
                .expect("query name present");
            lookup[&(marker.to_string(), query)].clone()
        });

        let records = run_corpus(&corpus, &Algorithm::ALL, &DirectStrategy, &client, 4);
        let scored = score_records(&records, &corpus, &Algorithm::ALL).unwrap();
        let expected = brute_force_recount(&records, &corpus);
        for query in Algorithm::ALL {
            let fold = scored.matrices.get(&query).copied().unwrap_or_default();
            let naive = expected.get(&query).copied().unwrap_or_default();
            assert_eq!(fold, naive, "trial {trial}, query {query}");
        }
    }
    println!("criterion 6 (oracle equivalence, 100 trials): PASS");
}

#[test]
fn criterion_7_prompt_fidelity() {
    let resources = Path::new(env!("CARGO_MANIFEST_DIR")).join("resources/prompts");
    let read = |name: &str| {
        let raw = std::fs::read_to_string(resources.join(name)).unwrap();
        raw.strip_suffix('\n').map(String::from).unwrap_or(raw)
    };
    let direct_template = read("direct.txt");
    let explain_template = read("explain.txt");
    let followup_template = read("followup.txt");

    let code = "void f(void) { }";
    let explanation = "It does nothing.";
    for algorithm in Algorithm::ALL {
        let query = AlgorithmQuery::new(algorithm);
        let name = query.display_name();

        let expected_direct = direct_template
            .replace("*algorithm*", name)
            .replace("*code*", code);
        let rendered = render_direct(&query, code);
        assert_eq!(rendered.messages()[0].content, expected_direct, "{algorithm} direct");

        let expected_explain = explain_template.replace("*code*", code);
        let explain = render_explain(code);
        assert_eq!(explain.messages()[0].content, expected_explain);

        let expected_followup = followup_template.replace("*algorithm*", name);
        let followup = render_followup(&query, &explain, explanation).unwrap();
        assert_eq!(followup.messages()[2].content, expected_followup, "{algorithm} follow-up");
        assert_eq!(followup.messages()[1].content, explanation);
    }
    println!("criterion 7 (prompt fidelity): PASS");
}

/// Minimal counting chat-completions stub over a raw TCP listener.
fn spawn_stub(answer: &'static str) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&hits);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            counter.fetch_add(1, Ordering::SeqCst);
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
            let body = serde_json::json!({
                "choices": [{
                    "message": {"role": "assistant", "content": answer},
                    "finish_reason": "stop"
                }]
            })
            .to_string();
            let response = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                body.len(),
                body
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    (format!("http://{addr}/v1"), hits)
}

#[test]
fn criterion_8_record_mode_single_network_call() {
    let (base_url, hits) = spawn_stub("Yes: matmul");
    let cache_dir = tempfile::tempdir().unwrap();
    let cache = ResponseCache::open(cache_dir.path()).unwrap();
    let client = HttpChatClient::new(
        ModelConfig::default(),
        base_url,
        Some("stub-key".into()),
        Mode::Record,
        Some(cache),
        RetryPolicy {
            max_attempts: 2,
            base_delay: std::time::Duration::from_millis(10),
        },
    );

    let transcript = render_direct(
        &AlgorithmQuery::new(Algorithm::Gemm),
        "void matmul(void) { }",
    );
    let first = client.complete(&transcript).unwrap();
    assert_eq!(first.text, "Yes: matmul");
    assert_eq!(first.source, ResponseSource::Live);

    let second = client.complete(&transcript).unwrap();
    assert_eq!(second.text, "Yes: matmul");
    assert_eq!(second.source, ResponseSource::Cache);

    assert_eq!(
        hits.load(Ordering::SeqCst),
        1,
        "identical record-mode request must hit the network exactly once"
    );

    // the recorded entry replays byte-identically
    let replay_cache = ResponseCache::open_existing(cache_dir.path()).unwrap();
    let key = CacheRequest::new(&ModelConfig::default(), &transcript).key();
    let entry = replay_cache.get(&key).unwrap().unwrap();
    assert_eq!(entry.response.text, "Yes: matmul");
    println!("criterion 8 (record-mode cache behavior): PASS");
}
