//! End-to-end CLI behavior: verdict and error exit codes, config-file
//! precedence, cache maintenance.

use kerndetect::client::{CacheRequest, ModelConfig};
use kerndetect::prompt::{render_direct, Algorithm, AlgorithmQuery};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kerndetect"));
    // keep host credentials and config out of the tests
    cmd.env_remove("KERNDETECT_API_KEY")
        .env_remove("OPENAI_API_KEY")
        .current_dir(env!("CARGO_MANIFEST_DIR"));
    cmd
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn detect_positive_exits_zero() {
    let output = bin()
        .args([
            "detect",
            fixtures().join("corpus/gemm/gemm_020.c").to_str().unwrap(),
            "--algorithm",
            "gemm",
            "--strategy",
            "direct",
            "--mode",
            "replay",
            "--cache-dir",
            fixtures().join("cache-direct").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert_eq!(stdout(&output).trim(), "Positive: matmul_20");
}

#[test]
fn detect_negative_exits_one() {
    let output = bin()
        .args([
            "detect",
            fixtures()
                .join("corpus/cpufetch/cpufetch_010.c")
                .to_str()
                .unwrap(),
            "--algorithm",
            "gemm",
            "--mode",
            "replay",
            "--cache-dir",
            fixtures().join("cache-direct").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    assert_eq!(stdout(&output).trim(), "Negative");
}

#[test]
fn detect_unparseable_exits_two() {
    // gemm_005 is scripted as a wrong-format answer under the gemm query
    let output = bin()
        .args([
            "detect",
            fixtures().join("corpus/gemm/gemm_005.c").to_str().unwrap(),
            "--algorithm",
            "gemm",
            "--mode",
            "replay",
            "--cache-dir",
            fixtures().join("cache-direct").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    assert_eq!(stdout(&output).trim(), "Unparseable");
}

#[test]
fn detect_two_stage_replay_works() {
    let output = bin()
        .args([
            "detect",
            fixtures().join("corpus/fft/fft_003.c").to_str().unwrap(),
            "--algorithm",
            "fft",
            "--strategy",
            "explain-then-ask",
            "--mode",
            "replay",
            "--cache-dir",
            fixtures().join("cache-explain").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert_eq!(stdout(&output).trim(), "Positive: fft_3");
}

#[test]
fn live_mode_without_credential_exits_four() {
    let output = bin()
        .args([
            "detect",
            fixtures().join("corpus/gemm/gemm_000.c").to_str().unwrap(),
            "--algorithm",
            "gemm",
            "--mode",
            "live",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4), "{output:?}");
}

#[test]
fn replay_cache_miss_exits_five() {
    let empty_cache = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "detect",
            fixtures().join("corpus/gemm/gemm_000.c").to_str().unwrap(),
            "--algorithm",
            "gemm",
            "--mode",
            "replay",
            "--cache-dir",
            empty_cache.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(5), "{output:?}");
}

#[test]
fn replay_without_cache_dir_exits_three() {
    let output = bin()
        .args([
            "detect",
            fixtures().join("corpus/gemm/gemm_000.c").to_str().unwrap(),
            "--algorithm",
            "gemm",
            "--mode",
            "replay",
            "--cache-dir",
            "/nonexistent/cache/dir",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn oversized_unit_exits_six() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.c");
    std::fs::write(&big, format!("int x;\n{}", "int aaaaaaaaaaaaaaaaaa;\n".repeat(400))).unwrap();
    let cache = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "detect",
            big.to_str().unwrap(),
            "--algorithm",
            "fft",
            "--mode",
            "replay",
            "--cache-dir",
            cache.path().to_str().unwrap(),
            "--context-window",
            "600",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(6), "{output:?}");
}

#[test]
fn unknown_strategy_exits_three() {
    let output = bin()
        .args([
            "detect",
            fixtures().join("corpus/gemm/gemm_000.c").to_str().unwrap(),
            "--algorithm",
            "gemm",
            "--strategy",
            "tree-of-thoughts",
            "--mode",
            "replay",
            "--cache-dir",
            fixtures().join("cache-direct").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn bench_summary_matches_report_and_config_file_drives_it() {
    let out_dir = tempfile::tempdir().unwrap();
    let config_path = out_dir.path().join("kerndetect.toml");
    std::fs::write(
        &config_path,
        format!(
            r#"
manifest = "{manifest}"
cache_dir = "{cache}"
strategy = "explain-then-ask"
mode = "replay"
out_dir = "{out}"
"#,
            manifest = fixtures().join("manifest.toml").display(),
            cache = fixtures().join("cache-explain").display(),
            out = out_dir.path().join("run").display()
        ),
    )
    .unwrap();

    let output = bin()
        .args(["bench", "--config", config_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let text = stdout(&output);
    assert!(
        text.contains("accuracy: GEMM 91.1%, CONV 97.9%, FFT 99.7%"),
        "summary line missing:\n{text}"
    );

    // stdout numbers equal the machine-readable report's numbers
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.path().join("run/report.json")).unwrap(),
    )
    .unwrap();
    let accuracies: Vec<f64> = report["queries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|q| q["accuracy_pct"].as_f64().unwrap())
        .collect();
    assert_eq!(accuracies, vec![91.1, 97.9, 99.7]);
    let gemm_fp = report["queries"][0]["matrix"]["fp"].as_u64().unwrap();
    assert!(text.contains(&format!("fp {gemm_fp} ")));

    // run directory holds one self-contained record per detection
    let records_dir = out_dir.path().join("run/records");
    let record_files: Vec<_> = std::fs::read_dir(&records_dir).unwrap().collect();
    assert_eq!(record_files.len(), 1155);
    let sample: kerndetect::pipeline::DetectionRecord = serde_json::from_str(
        &std::fs::read_to_string(records_dir.join("gemm_020__gemm.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(sample.transcripts.len(), 2);
    assert_eq!(sample.responses.len(), 2);
    let reparsed = kerndetect::parse_verdict(&sample.responses.last().unwrap().text);
    assert_eq!(Some(reparsed), sample.verdict);
}

#[test]
fn bench_flag_overrides_config_file() {
    let out_dir = tempfile::tempdir().unwrap();
    let config_path = out_dir.path().join("kerndetect.toml");
    std::fs::write(
        &config_path,
        format!(
            r#"
manifest = "{manifest}"
cache_dir = "{cache}"
strategy = "explain-then-ask"
mode = "replay"
out_dir = "{out}"
queries = ["gemm"]
"#,
            manifest = fixtures().join("manifest.toml").display(),
            cache = fixtures().join("cache-direct").display(),
            out = out_dir.path().join("run").display()
        ),
    )
    .unwrap();

    // flag flips the strategy back to direct; cache-direct then resolves
    let output = bin()
        .args([
            "bench",
            "--config",
            config_path.to_str().unwrap(),
            "--strategy",
            "direct",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let text = stdout(&output);
    assert!(text.contains("accuracy: GEMM 68.8%"), "{text}");
    assert!(!text.contains("CONV"), "config-file query subset applies: {text}");
}

#[test]
fn bench_empty_manifest_reports_no_scored_units() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.toml");
    std::fs::write(&manifest, "").unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir(&cache).unwrap();
    let out = dir.path().join("out");

    let output = bin()
        .args([
            "bench",
            "--manifest",
            manifest.to_str().unwrap(),
            "--cache-dir",
            cache.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
            "--mode",
            "replay",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(stdout(&output).contains("no scored units"));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("no scored units"));
}

#[test]
fn bench_with_missing_cache_entries_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.toml");
    std::fs::write(
        &manifest,
        r#"
[[unit]]
id = "one"
path = "one.c"
language = "c"
suite = "gemm"
algorithm = "gemm"
outermost_function = "f"
"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("one.c"), "void f(void) { }\n").unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir(&cache).unwrap();
    let out = dir.path().join("out");

    let output = bin()
        .args([
            "bench",
            "--manifest",
            manifest.to_str().unwrap(),
            "--cache-dir",
            cache.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
            "--mode",
            "replay",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    assert!(stdout(&output).contains("not scored: 3"));
}

#[test]
fn cache_list_empty_dir_is_ok() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["cache", "list", "--cache-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(stdout(&output).contains("0 entries"));
}

#[test]
fn cache_verify_names_corrupt_entry() {
    let dir = tempfile::tempdir().unwrap();
    // seed with two real fixture entries
    let mut keys = Vec::new();
    for entry in std::fs::read_dir(fixtures().join("cache-direct")).unwrap().take(2) {
        let path = entry.unwrap().path();
        keys.push(path.file_stem().unwrap().to_str().unwrap().to_string());
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }

    let ok = bin()
        .args(["cache", "verify", "--cache-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    assert!(stdout(&ok).contains("ok, 2 entries"));

    // flip one byte of the first entry's stored response
    let victim = dir.path().join(format!("{}.json", keys[0]));
    let mut raw = std::fs::read(&victim).unwrap();
    let pos = raw.windows(8).position(|w| w == b"\"text\": ").unwrap() + 9;
    raw[pos] ^= 0x01;
    std::fs::write(&victim, raw).unwrap();

    let bad = bin()
        .args(["cache", "verify", "--cache-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1), "{bad:?}");
    assert!(
        stdout(&bad).contains(&keys[0]),
        "corrupt key not named: {}",
        stdout(&bad)
    );
}

#[test]
fn cache_prune_drops_unreferenced_entries() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.toml");
    std::fs::write(
        &manifest,
        r#"
[[unit]]
id = "gemm_000"
path = "gemm_000.c"
language = "c"
suite = "gemm"
algorithm = "gemm"
variant = "naive"
outermost_function = "matmul_0"
"#,
    )
    .unwrap();
    let text =
        std::fs::read_to_string(fixtures().join("corpus/gemm/gemm_000.c")).unwrap();
    std::fs::write(dir.path().join("gemm_000.c"), &text).unwrap();

    // cache: the unit's three direct entries plus one foreign entry
    let cache_dir = dir.path().join("cache");
    std::fs::create_dir(&cache_dir).unwrap();
    let config = ModelConfig::default();
    for algorithm in Algorithm::ALL {
        let transcript = render_direct(&AlgorithmQuery::new(algorithm), &text);
        let key = CacheRequest::new(&config, &transcript).key();
        let source = fixtures().join(format!("cache-direct/{key}.json"));
        std::fs::copy(&source, cache_dir.join(format!("{key}.json"))).unwrap();
    }
    let foreign_text =
        std::fs::read_to_string(fixtures().join("corpus/conv/conv_001.c")).unwrap();
    let foreign = render_direct(&AlgorithmQuery::new(Algorithm::Gemm), &foreign_text);
    let foreign_key = CacheRequest::new(&config, &foreign).key();
    std::fs::copy(
        fixtures().join(format!("cache-direct/{foreign_key}.json")),
        cache_dir.join(format!("{foreign_key}.json")),
    )
    .unwrap();

    let output = bin()
        .args([
            "cache",
            "prune",
            "--cache-dir",
            cache_dir.to_str().unwrap(),
            "--manifest",
            manifest.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(stdout(&output).contains("kept 3, removed 1"), "{}", stdout(&output));
    assert!(!cache_dir.join(format!("{foreign_key}.json")).exists());
}

#[test]
fn help_exits_zero() {
    let output = bin().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    for sub in ["detect", "bench", "cache"] {
        assert!(text.contains(sub), "help lists {sub}");
    }
}

#[test]
fn bad_flag_exits_three() {
    let output = bin().args(["bench", "--frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(3));
}
