//! Desk-scale validation of the two approximations the corpus subsystem
//! leans on: the chars/4 token estimate (against a reference BPE
//! tokenizer) and comment stripping (the stripped file must still compile
//! with a real C/C++ front end).

use kerndetect::corpus::tokens::{reduce_tokens, strip_comments};
use kerndetect::corpus::{Language, SourceUnit};
use kerndetect::estimate_tokens;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture_sources() -> Vec<(PathBuf, String)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let mut files = Vec::new();
    let mut stack = vec![root];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).expect("fixtures are generated and checked in") {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if let Ok(text) = std::fs::read_to_string(&path) {
                files.push((path, text));
            }
        }
    }
    files.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    files
}

/// The chars/4 heuristic must stay within 1.5x of a reference BPE
/// tokenizer on the ten largest corpus files.
#[test]
fn token_estimate_tracks_reference_tokenizer() {
    let bpe = tiktoken_rs::cl100k_base().expect("bundled encoder loads");
    let files = fixture_sources();
    assert!(files.len() >= 10, "need at least 10 corpus files");
    for (path, text) in files.iter().take(10) {
        let estimate = estimate_tokens(text);
        let reference = bpe.encode_ordinary(text).len();
        let ratio = estimate as f64 / reference as f64;
        assert!(
            (1.0 / 1.5..=1.5).contains(&ratio),
            "{}: estimate {estimate} vs reference {reference} (ratio {ratio:.3})",
            path.display()
        );
    }
}

const COMMENT_HEAVY_C: &str = r#"/* block comment with code inside: int bogus(void); */
#include <string.h>

// line comment \
   spliced onto a second physical line
static const char *markers[] = {
    "// not a comment",           /* trailing note */
    "/* also not a comment */",   // another note
    "quote \" and backslash \\",
};

/* multi
   line
   comment */
int count_markers(void) {
    int n = 0; // per-line tally
    for (unsigned i = 0; i < sizeof(markers) / sizeof(markers[0]); i++) {
        n += (int)strlen(markers[i]); /* accumulate */
    }
    return n;
}
"#;

const COMMENT_HEAVY_CPP: &str = r#"// raw strings keep comment-looking text
#include <string>

static const std::string doc = R"(slashes // and /* stars */ stay)";

/* the divisor below must not fuse with the comment */
int halve(int x) {
    return x /* keep the slash apart */ / 2;
}

int describe() {
    // char literals with quotes
    char q = '\'';
    return doc.size() + (q == '\'' ? halve(10) : 0);
}
"#;

fn syntax_check(compiler: &str, std_flag: Option<&str>, source: &str, name: &str) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    std::fs::write(&path, source).unwrap();
    let mut cmd = Command::new(compiler);
    cmd.arg("-fsyntax-only").arg("-Wall");
    if let Some(flag) = std_flag {
        cmd.arg(flag);
    }
    let output = cmd.arg(&path).output().unwrap_or_else(|e| {
        panic!("{compiler} unavailable: {e}");
    });
    assert!(
        output.status.success(),
        "{name} failed {compiler} syntax check:\n{}",
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Comment stripping must preserve compilability: both hand-written
/// comment-heavy files still pass a front-end syntax check afterwards, and
/// stripping is what brings the C file under its budget.
#[test]
fn stripped_sources_still_compile() {
    syntax_check("cc", None, COMMENT_HEAVY_C, "original.c");
    syntax_check("c++", Some("-std=c++17"), COMMENT_HEAVY_CPP, "original.cpp");

    let unit = SourceUnit {
        id: "comment_heavy".into(),
        path: PathBuf::from("comment_heavy.c"),
        language: Language::C,
        token_estimate: estimate_tokens(COMMENT_HEAVY_C),
        text: COMMENT_HEAVY_C.into(),
        suite: "adhoc".into(),
    };
    let budget = estimate_tokens(&strip_comments(COMMENT_HEAVY_C));
    let reduced = reduce_tokens(&unit, budget);
    assert!(!reduced.over_budget, "comment stripping reaches the budget");
    assert!(!reduced.unit.text.contains("per-line tally"));
    assert!(reduced.unit.text.contains("// not a comment"));
    syntax_check("cc", None, &reduced.unit.text, "stripped.c");

    let stripped_cpp = strip_comments(COMMENT_HEAVY_CPP);
    assert!(stripped_cpp.contains("R\"(slashes // and /* stars */ stay)\""));
    assert!(!stripped_cpp.contains("divisor"));
    syntax_check("c++", Some("-std=c++17"), &stripped_cpp, "stripped.cpp");
}

/// A sample of generated corpus files must be real compilable C/C++, before
/// and after comment stripping.
#[test]
fn fixture_corpus_samples_compile() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let samples = [
        ("gemm/gemm_003.c", "cc", None),
        ("gemm/gemm_005.c", "cc", None),
        ("conv/conv_002.c", "cc", None),
        ("fft/fft_001.c", "cc", None),
        ("caffe/caffe_000.cpp", "c++", Some("-std=c++17")),
    ];
    for (rel, compiler, std_flag) in samples {
        let path = fixtures.join(rel);
        let text = std::fs::read_to_string(&path).unwrap();
        syntax_check(compiler, std_flag, &text, path.file_name().unwrap().to_str().unwrap());
        let stripped = strip_comments(&text);
        syntax_check(compiler, std_flag, &stripped, "stripped_sample.c");
    }
}
