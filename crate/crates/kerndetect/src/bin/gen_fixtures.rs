//! Regenerates the checked-in benchmark fixtures: a synthetic 385-unit
//! C/C++ corpus (128 gemm, 15 conv, 15 fft, 10 parboil, 182 caffe,
//! 13 acotsp, 22 cpufetch) plus scripted response caches for both
//! strategies. The scripted answers reproduce the published confusion
//! matrices and false-negative breakdowns, so a replay bench over these
//! fixtures exercises the whole pipeline deterministically.
//!
//! Usage: `cargo run --bin gen-fixtures [OUT_DIR]` (default:
//! `crates/kerndetect/fixtures`). Output is byte-stable across runs.

use kerndetect::client::{CacheEntry, CacheRequest, ModelConfig, ResponseCache, StoredResponse};
use kerndetect::corpus::{Corpus, GroundTruth, Label, Language, SourceUnit};
use kerndetect::prompt::{
    render_direct, render_explain, render_followup, Algorithm, AlgorithmQuery,
};
use std::path::{Path, PathBuf};

const CREATED_AT: &str = "2026-01-01T00:00:00Z";

struct Suite {
    name: &'static str,
    label: Label,
    count: usize,
    language: Language,
}

const SUITES: [Suite; 7] = [
    Suite { name: "gemm", label: Label::Gemm, count: 128, language: Language::C },
    Suite { name: "conv", label: Label::Conv, count: 15, language: Language::C },
    Suite { name: "fft", label: Label::Fft, count: 15, language: Language::C },
    Suite { name: "parboil", label: Label::None, count: 10, language: Language::C },
    Suite { name: "caffe", label: Label::None, count: 182, language: Language::Cpp },
    Suite { name: "acotsp", label: Label::None, count: 13, language: Language::C },
    Suite { name: "cpufetch", label: Label::None, count: 22, language: Language::C },
];

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    let (units, truths) = build_units();

    for unit in &units {
        let path = out.join(&unit.path);
        std::fs::create_dir_all(path.parent().unwrap()).expect("create corpus dir");
        std::fs::write(&path, &unit.text).expect("write corpus file");
    }
    let corpus =
        Corpus::from_parts(units.clone(), truths.clone()).expect("fixture corpus is valid");
    corpus
        .save_manifest(&out.join("manifest.toml"))
        .expect("write manifest");

    let config = ModelConfig::default();
    let direct_cache =
        ResponseCache::open(&out.join("cache-direct")).expect("open direct cache dir");
    let explain_cache =
        ResponseCache::open(&out.join("cache-explain")).expect("open explain cache dir");

    let mut direct_entries = 0usize;
    let mut explain_entries = 0usize;
    for (idx, unit) in units.iter().enumerate() {
        let truth = &truths[idx];
        let explanation = explanation_for(unit, truth);
        let explain_transcript = render_explain(&unit.text);
        put(
            &explain_cache,
            &config,
            &explain_transcript,
            &explanation,
        );
        explain_entries += 1;

        for algorithm in Algorithm::ALL {
            let query = AlgorithmQuery::new(algorithm);

            let direct_answer = direct_answer(unit, truth, algorithm);
            put(
                &direct_cache,
                &config,
                &render_direct(&query, &unit.text),
                &direct_answer,
            );
            direct_entries += 1;

            let followup = render_followup(&query, &explain_transcript, &explanation)
                .expect("fixture explanation is never empty");
            let eta_answer = explain_then_ask_answer(unit, truth, algorithm);
            put(&explain_cache, &config, &followup, &eta_answer);
            explain_entries += 1;
        }
    }

    println!(
        "wrote {} units, {} direct entries, {} explain entries under {}",
        units.len(),
        direct_entries,
        explain_entries,
        out.display()
    );
}

fn put(
    cache: &ResponseCache,
    config: &ModelConfig,
    transcript: &kerndetect::prompt::ChatTranscript,
    text: &str,
) {
    let request = CacheRequest::new(config, transcript);
    let entry = CacheEntry::new(
        request,
        StoredResponse {
            text: text.to_string(),
            finish_reason: kerndetect::client::FinishReason::Stop,
            latency_ms: None,
        },
        CREATED_AT.to_string(),
    );
    cache.put(&entry).expect("write cache entry");
}

fn build_units() -> (Vec<SourceUnit>, Vec<GroundTruth>) {
    let mut units = Vec::new();
    let mut truths = Vec::new();
    for suite in &SUITES {
        for i in 0..suite.count {
            let id = format!("{}_{i:03}", suite.name);
            let (text, variant, outermost) = synthesize(suite.name, i);
            let ext = match suite.language {
                Language::C => "c",
                Language::Cpp => "cpp",
            };
            let path = PathBuf::from(format!("corpus/{}/{id}.{ext}", suite.name));
            units.push(SourceUnit {
                id: id.clone(),
                path,
                language: suite.language,
                token_estimate: kerndetect::estimate_tokens(&text),
                text,
                suite: suite.name.to_string(),
            });
            truths.push(GroundTruth {
                unit_id: id,
                algorithm: suite.label,
                variant,
                outermost_function: outermost,
            });
        }
    }
    (units, truths)
}

// ---------------------------------------------------------------------------
// scripted answers
//
// Quotas below reproduce the published first- and second-prompt confusion
// matrices (row totals per suite) and false-negative breakdowns. Cells that
// were never published individually are distributed deterministically.
// ---------------------------------------------------------------------------

fn suite_index(unit: &SourceUnit) -> usize {
    unit.id[unit.id.len() - 3..].parse().expect("fixture ids end in an index")
}

/// (missed, wrong_function, unparseable) false negatives per query, applied
/// to the lowest-indexed units of the matching suite.
fn direct_fn_quota(query: Algorithm) -> (usize, usize, usize) {
    match query {
        Algorithm::Gemm => (2, 2, 5),
        Algorithm::Conv => (0, 0, 0),
        Algorithm::Fft => (0, 0, 0),
    }
}

fn explain_fn_quota(query: Algorithm) -> (usize, usize, usize) {
    match query {
        Algorithm::Gemm => (1, 11, 7),
        Algorithm::Conv => (1, 1, 0),
        Algorithm::Fft => (0, 1, 0),
    }
}

/// False-positive count per (query, suite) for the direct strategy.
fn direct_fp_quota(query: Algorithm, suite: &str) -> usize {
    match query {
        Algorithm::Gemm => match suite {
            "conv" => 15,
            "fft" => 15,
            "parboil" => 5,
            "caffe" => 60,
            "acotsp" => 8,
            "cpufetch" => 8,
            _ => 0,
        },
        Algorithm::Conv => match suite {
            "gemm" => 123,
            "fft" => 10,
            "parboil" => 7,
            "caffe" => 130,
            "acotsp" => 13,
            "cpufetch" => 16,
            _ => 0,
        },
        Algorithm::Fft => match suite {
            "gemm" => 30,
            "conv" => 5,
            "parboil" => 3,
            "caffe" => 30,
            "acotsp" => 6,
            "cpufetch" => 6,
            _ => 0,
        },
    }
}

fn explain_fp_quota(query: Algorithm, suite: &str) -> usize {
    match query {
        Algorithm::Gemm => match suite {
            "conv" => 5,
            "caffe" => 10,
            _ => 0,
        },
        Algorithm::Conv => match suite {
            "caffe" => 6,
            _ => 0,
        },
        Algorithm::Fft => 0,
    }
}

/// Name the model "hallucinates" for a false positive: caffe units blame
/// the declared-but-undefined gemm call, everything else blames its own
/// top-level function.
fn fp_function(unit: &SourceUnit, truth: &GroundTruth) -> String {
    if unit.suite == "caffe" {
        "caffe_cpu_gemm".to_string()
    } else {
        truth
            .outermost_function
            .clone()
            .unwrap_or_else(|| primary_function(unit))
    }
}

fn primary_function(unit: &SourceUnit) -> String {
    let idx = suite_index(unit);
    match unit.suite.as_str() {
        "parboil" => format!("kernel_main_{idx}"),
        "caffe" => format!("forward_cpu_{idx}"),
        "acotsp" => format!("construct_tour_{idx}"),
        "cpufetch" => format!("decode_cpu_name_{idx}"),
        _ => format!("f_{idx}"),
    }
}

fn inner_function(unit: &SourceUnit) -> String {
    let idx = suite_index(unit);
    match unit.suite.as_str() {
        "gemm" => format!("gemm_inner_{idx}"),
        "conv" => format!("conv_tap_{idx}"),
        "fft" => format!("fft_stage_{idx}"),
        _ => primary_function(unit),
    }
}

fn unparseable_answer(unit: &SourceUnit) -> String {
    format!(
        "Yes: the function `Kernel<float>::run_{}` performs the requested operation",
        suite_index(unit)
    )
}

fn positive_answer(unit: &SourceUnit, truth: &GroundTruth) -> String {
    let name = truth
        .outermost_function
        .clone()
        .expect("positive units name their outermost function");
    // every ninth affirmative answer carries trailing garbage the output
    // rules must scrub
    if suite_index(unit) % 9 == 8 {
        format!("Yes: {name}().")
    } else {
        format!("Yes: {name}")
    }
}

fn negative_answer(unit: &SourceUnit) -> String {
    // occasional boilerplate phrasings exercise the negative rules
    match suite_index(unit) % 37 {
        7 => "No. The code does not contain any function".to_string(),
        19 => "No, there is no function".to_string(),
        _ => "No".to_string(),
    }
}

fn scripted_answer(
    unit: &SourceUnit,
    truth: &GroundTruth,
    query: Algorithm,
    fn_quota: (usize, usize, usize),
    fp_quota: fn(Algorithm, &str) -> usize,
) -> String {
    let idx = suite_index(unit);
    if truth.algorithm.algorithm() == Some(query) {
        let (missed, wrong, unparseable) = fn_quota;
        if idx < missed {
            "No".to_string()
        } else if idx < missed + wrong {
            format!("Yes: {}", inner_function(unit))
        } else if idx < missed + wrong + unparseable {
            unparseable_answer(unit)
        } else {
            positive_answer(unit, truth)
        }
    } else if idx < fp_quota(query, &unit.suite) {
        format!("Yes: {}", fp_function(unit, truth))
    } else {
        negative_answer(unit)
    }
}

fn direct_answer(unit: &SourceUnit, truth: &GroundTruth, query: Algorithm) -> String {
    scripted_answer(unit, truth, query, direct_fn_quota(query), direct_fp_quota)
}

fn explain_then_ask_answer(unit: &SourceUnit, truth: &GroundTruth, query: Algorithm) -> String {
    scripted_answer(
        unit,
        truth,
        query,
        explain_fn_quota(query),
        explain_fp_quota,
    )
}

fn explanation_for(unit: &SourceUnit, truth: &GroundTruth) -> String {
    let idx = suite_index(unit);
    match unit.suite.as_str() {
        "gemm" => format!(
            "This code multiplies two square matrices. The function {} iterates over rows and \
             columns accumulating dot products{}.",
            truth.outermost_function.as_deref().unwrap_or("matmul"),
            variant_note(truth)
        ),
        "conv" => format!(
            "This code applies a filter over an input signal. The function {} slides the kernel \
             across the input and accumulates weighted taps{}.",
            truth.outermost_function.as_deref().unwrap_or("conv2d"),
            variant_note(truth)
        ),
        "fft" => format!(
            "This code computes a discrete Fourier transform. The function {} combines \
             even- and odd-indexed terms with twiddle factors{}.",
            truth.outermost_function.as_deref().unwrap_or("fft"),
            variant_note(truth)
        ),
        "parboil" => format!(
            "This code is a throughput benchmark kernel (variant {idx}); it streams over arrays \
             and accumulates per-element results."
        ),
        "caffe" => format!(
            "This code defines a neural-network layer class (unit {idx}). Its forward method \
             delegates the heavy lifting to an external BLAS-style routine that is declared but \
             not defined here."
        ),
        "acotsp" => format!(
            "This code implements part of an ant-colony tour construction (unit {idx}); it \
             selects cities by pheromone-weighted probabilities."
        ),
        "cpufetch" => format!(
            "This code decodes CPU identification strings (unit {idx}) using lookup tables and \
             bit masks; it performs no numeric kernels."
        ),
        other => format!("This code belongs to the {other} suite."),
    }
}

fn variant_note(truth: &GroundTruth) -> String {
    truth
        .variant
        .as_deref()
        .map(|v| format!(" using a {v} formulation"))
        .unwrap_or_default()
}

// ---------------------------------------------------------------------------
// synthetic source files
// ---------------------------------------------------------------------------

/// Produce (text, variant, outermost_function) for one unit.
fn synthesize(suite: &str, idx: usize) -> (String, Option<String>, Option<String>) {
    match suite {
        "gemm" => {
            let variants = [
                "naive",
                "unrolled",
                "function_calls",
                "tiled",
                "goto",
                "strassen",
                "intrinsics",
            ];
            let variant = variants[idx % variants.len()];
            let outermost = format!("matmul_{idx}");
            (
                gemm_code(idx, variant),
                Some(variant.to_string()),
                Some(outermost),
            )
        }
        "conv" => {
            let variants = ["winograd", "direct", "im2col"];
            let variant = variants[idx % variants.len()];
            (
                conv_code(idx, variant),
                Some(variant.to_string()),
                Some(format!("conv2d_{idx}")),
            )
        }
        "fft" => {
            let variants = ["dft", "radix2", "recursive"];
            let variant = variants[idx % variants.len()];
            (
                fft_code(idx, variant),
                Some(variant.to_string()),
                Some(format!("fft_{idx}")),
            )
        }
        "parboil" => (parboil_code(idx), None, None),
        "caffe" => (caffe_code(idx), None, None),
        "acotsp" => (acotsp_code(idx), None, None),
        "cpufetch" => (cpufetch_code(idx), None, None),
        other => panic!("unknown suite {other}"),
    }
}

fn gemm_code(i: usize, variant: &str) -> String {
    let body = match variant {
        "unrolled" => format!(
            r#"void matmul_{i}(const double *a, const double *b, double *c, int n) {{
    for (int r = 0; r < n; r++) {{
        for (int col = 0; col < n; col++) {{
            double acc = 0.0;
            int k = 0;
            for (; k + 4 <= n; k += 4) {{
                acc += a[r * n + k] * b[k * n + col];
                acc += a[r * n + k + 1] * b[(k + 1) * n + col];
                acc += a[r * n + k + 2] * b[(k + 2) * n + col];
                acc += a[r * n + k + 3] * b[(k + 3) * n + col];
            }}
            for (; k < n; k++)
                acc += a[r * n + k] * b[k * n + col];
            c[r * n + col] = acc;
        }}
    }}
}}"#
        ),
        "function_calls" => format!(
            r#"static double gemm_inner_{i}(const double *a, const double *b, int n, int r, int col) {{
    double acc = 0.0;
    for (int k = 0; k < n; k++)
        acc += a[r * n + k] * b[k * n + col];
    return acc;
}}

void matmul_{i}(const double *a, const double *b, double *c, int n) {{
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col++)
            c[r * n + col] = gemm_inner_{i}(a, b, n, r, col);
}}"#
        ),
        "tiled" => format!(
            r#"enum {{ TILE_{i} = 32 }};

void matmul_{i}(const double *a, const double *b, double *c, int n) {{
    for (int ii = 0; ii < n; ii += TILE_{i})
        for (int jj = 0; jj < n; jj += TILE_{i})
            for (int kk = 0; kk < n; kk += TILE_{i})
                for (int r = ii; r < ii + TILE_{i} && r < n; r++)
                    for (int col = jj; col < jj + TILE_{i} && col < n; col++) {{
                        double acc = c[r * n + col];
                        for (int k = kk; k < kk + TILE_{i} && k < n; k++)
                            acc += a[r * n + k] * b[k * n + col];
                        c[r * n + col] = acc;
                    }}
}}"#
        ),
        "goto" => format!(
            r#"static void gemm_inner_{i}(const double *ap, const double *bp, double *cp, int n, int kc) {{
    for (int k = 0; k < kc; k++)
        for (int col = 0; col < n; col++)
            cp[col] += ap[k] * bp[k * n + col];
}}

void matmul_{i}(const double *a, const double *b, double *c, int n) {{
    /* blocked panel-panel update in the style of high-performance kernels */
    for (int r = 0; r < n; r++)
        gemm_inner_{i}(&a[r * n], b, &c[r * n], n, n);
}}"#
        ),
        "strassen" => format!(
            r#"static void gemm_inner_{i}(const double *a, const double *b, double *c, int n) {{
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col++) {{
            double acc = 0.0;
            for (int k = 0; k < n; k++)
                acc += a[r * n + k] * b[k * n + col];
            c[r * n + col] = acc;
        }}
}}

void matmul_{i}(const double *a, const double *b, double *c, int n) {{
    if (n <= 64) {{
        gemm_inner_{i}(a, b, c, n);
        return;
    }}
    /* seven recursive products over quadrant sums */
    int h = n / 2;
    matmul_{i}(a, b, c, h);
    matmul_{i}(a + h, b + h * n, c + h, h);
    matmul_{i}(a + h * n, b, c + h * n, h);
    matmul_{i}(a + h * n + h, b + h * n + h, c + h * n + h, h);
}}"#
        ),
        "intrinsics" => format!(
            r#"typedef struct {{ double v[4]; }} vec4_{i};

static vec4_{i} vec4_fma_{i}(vec4_{i} acc, const double *a, const double *b) {{
    for (int lane = 0; lane < 4; lane++)
        acc.v[lane] += a[lane] * b[lane];
    return acc;
}}

void matmul_{i}(const double *a, const double *b, double *c, int n) {{
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col += 4) {{
            vec4_{i} acc = {{{{0.0, 0.0, 0.0, 0.0}}}};
            for (int k = 0; k < n; k++)
                acc = vec4_fma_{i}(acc, &a[r * n + k], &b[k * n + col]);
            for (int lane = 0; lane < 4; lane++)
                c[r * n + col + lane] = acc.v[lane];
        }}
}}"#
        ),
        _ => format!(
            r#"void matmul_{i}(const double *a, const double *b, double *c, int n) {{
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col++) {{
            double acc = 0.0;
            for (int k = 0; k < n; k++)
                acc += a[r * n + k] * b[k * n + col];
            c[r * n + col] = acc;
        }}
}}"#
        ),
    };
    format!("/* matrix product fixture {i}: {variant} */\n\n{body}\n")
}

fn conv_code(i: usize, variant: &str) -> String {
    let body = match variant {
        "winograd" => format!(
            r#"static void conv_tap_{i}(const float g[3], float u[4]) {{
    u[0] = g[0];
    u[1] = 0.5f * (g[0] + g[1] + g[2]);
    u[2] = 0.5f * (g[0] - g[1] + g[2]);
    u[3] = g[2];
}}

void conv2d_{i}(const float *x, const float *g, float *y, int n) {{
    float u[4];
    conv_tap_{i}(g, u);
    for (int t = 0; t + 3 < n; t += 2) {{
        float m0 = (x[t] - x[t + 2]) * u[0];
        float m1 = (x[t + 1] + x[t + 2]) * u[1];
        float m2 = (x[t + 2] - x[t + 1]) * u[2];
        float m3 = (x[t + 1] - x[t + 3]) * u[3];
        y[t] = m0 + m1 + m2;
        y[t + 1] = m1 - m2 - m3;
    }}
}}"#
        ),
        "im2col" => format!(
            r#"static void conv_tap_{i}(const float *x, float *col, int n, int k) {{
    for (int t = 0; t < n - k + 1; t++)
        for (int j = 0; j < k; j++)
            col[t * k + j] = x[t + j];
}}

void conv2d_{i}(const float *x, const float *w, float *y, int n, int k, float *scratch) {{
    conv_tap_{i}(x, scratch, n, k);
    for (int t = 0; t < n - k + 1; t++) {{
        float acc = 0.0f;
        for (int j = 0; j < k; j++)
            acc += scratch[t * k + j] * w[j];
        y[t] = acc;
    }}
}}"#
        ),
        _ => format!(
            r#"static float conv_tap_{i}(const float *x, const float *w, int k) {{
    float acc = 0.0f;
    for (int j = 0; j < k; j++)
        acc += x[j] * w[k - 1 - j];
    return acc;
}}

void conv2d_{i}(const float *x, const float *w, float *y, int n, int k) {{
    for (int t = 0; t + k <= n; t++)
        y[t] = conv_tap_{i}(&x[t], w, k);
}}"#
        ),
    };
    format!("/* convolution fixture {i}: {variant} */\n\n{body}\n")
}

fn fft_code(i: usize, variant: &str) -> String {
    let body = match variant {
        "dft" => format!(
            r#"#include <math.h>

void fft_{i}(const double *re_in, const double *im_in, double *re_out, double *im_out, int n) {{
    for (int k = 0; k < n; k++) {{
        double sum_re = 0.0, sum_im = 0.0;
        for (int t = 0; t < n; t++) {{
            double angle = -2.0 * M_PI * k * t / n;
            sum_re += re_in[t] * cos(angle) - im_in[t] * sin(angle);
            sum_im += re_in[t] * sin(angle) + im_in[t] * cos(angle);
        }}
        re_out[k] = sum_re;
        im_out[k] = sum_im;
    }}
}}"#
        ),
        "radix2" => format!(
            r#"#include <math.h>

static void fft_stage_{i}(double *re, double *im, int n, int half) {{
    for (int k = 0; k < half; k++) {{
        double angle = -M_PI * k / half;
        double wr = cos(angle), wi = sin(angle);
        double tr = wr * re[k + half] - wi * im[k + half];
        double ti = wr * im[k + half] + wi * re[k + half];
        re[k + half] = re[k] - tr;
        im[k + half] = im[k] - ti;
        re[k] += tr;
        im[k] += ti;
    }}
}}

void fft_{i}(double *re, double *im, int n) {{
    for (int half = n / 2; half >= 1; half /= 2)
        for (int start = 0; start < n; start += 2 * half)
            fft_stage_{i}(&re[start], &im[start], n, half);
}}"#
        ),
        _ => format!(
            r#"#include <math.h>

void fft_{i}(double *re, double *im, int n, int stride) {{
    if (n == 1)
        return;
    fft_{i}(re, im, n / 2, stride * 2);
    fft_{i}(re + stride, im + stride, n / 2, stride * 2);
    for (int k = 0; k < n / 2; k++) {{
        double angle = -2.0 * M_PI * k / n;
        double wr = cos(angle), wi = sin(angle);
        double tr = wr * re[(2 * k + 1) * stride] - wi * im[(2 * k + 1) * stride];
        double ti = wr * im[(2 * k + 1) * stride] + wi * re[(2 * k + 1) * stride];
        re[(2 * k + 1) * stride] = re[2 * k * stride] - tr;
        im[(2 * k + 1) * stride] = im[2 * k * stride] - ti;
        re[2 * k * stride] += tr;
        im[2 * k * stride] += ti;
    }}
}}"#
        ),
    };
    format!("/* fourier transform fixture {i}: {variant} */\n\n{body}\n")
}

fn parboil_code(i: usize) -> String {
    let kinds = ["matvec", "histogram", "scan", "saxpy", "reduce"];
    let kind = kinds[i % kinds.len()];
    let body = match kind {
        "matvec" => format!(
            r#"void kernel_main_{i}(const float *m, const float *v, float *out, int rows, int cols) {{
    for (int r = 0; r < rows; r++) {{
        float acc = 0.0f;
        for (int c = 0; c < cols; c++)
            acc += m[r * cols + c] * v[c];
        out[r] = acc;
    }}
}}"#
        ),
        "histogram" => format!(
            r#"void kernel_main_{i}(const unsigned char *pixels, unsigned *bins, int n) {{
    for (int t = 0; t < 256; t++)
        bins[t] = 0;
    for (int t = 0; t < n; t++)
        bins[pixels[t]]++;
}}"#
        ),
        "scan" => format!(
            r#"void kernel_main_{i}(const int *in, int *out, int n) {{
    int running = 0;
    for (int t = 0; t < n; t++) {{
        out[t] = running;
        running += in[t];
    }}
}}"#
        ),
        "saxpy" => format!(
            r#"void kernel_main_{i}(float alpha, const float *x, float *y, int n) {{
    for (int t = 0; t < n; t++)
        y[t] = alpha * x[t] + y[t];
}}"#
        ),
        _ => format!(
            r#"float kernel_main_{i}(const float *x, int n) {{
    float acc = 0.0f;
    for (int t = 0; t < n; t++)
        acc += x[t];
    return acc;
}}"#
        ),
    };
    format!("/* throughput benchmark fixture {i}: {kind} */\n\n{body}\n")
}

fn caffe_code(i: usize) -> String {
    let layers = ["InnerProduct", "Softmax", "Pooling", "Relu", "Dropout", "Lrn"];
    let layer = layers[i % layers.len()];
    format!(
        r#"// deep-learning layer fixture {i}
#include <vector>

// BLAS-style helper: declared here, defined elsewhere in the framework
void caffe_cpu_gemm(int m, int n, int k, const float *a, const float *b, float *c);

class {layer}Layer_{i} {{
public:
    explicit {layer}Layer_{i}(int dim) : dim_(dim), weights_(dim * dim, 0.5f) {{}}

    void forward_cpu_{i}(const std::vector<float> &bottom, std::vector<float> &top) {{
        top.resize(dim_);
        caffe_cpu_gemm(1, dim_, dim_, bottom.data(), weights_.data(), top.data());
        for (int t = 0; t < dim_; t++)
            top[t] = top[t] > 0.0f ? top[t] : 0.0f;
    }}

private:
    int dim_;
    std::vector<float> weights_;
}};
"#
    )
}

fn acotsp_code(i: usize) -> String {
    format!(
        r#"/* ant-colony tour fixture {i} */
#include <stdlib.h>

static double tour_weight_{i}(const double *pheromone, const double *dist, int from, int to, int n) {{
    double tau = pheromone[from * n + to];
    double eta = 1.0 / (dist[from * n + to] + 1e-9);
    return tau * eta * eta;
}}

int construct_tour_{i}(const double *pheromone, const double *dist, int *tour, int n) {{
    int visited = 1;
    tour[0] = {i} % 7;
    while (visited < n) {{
        int best = -1;
        double best_w = -1.0;
        for (int city = 0; city < n; city++) {{
            double w = tour_weight_{i}(pheromone, dist, tour[visited - 1], city, n);
            if (w > best_w) {{
                best_w = w;
                best = city;
            }}
        }}
        tour[visited++] = best;
    }}
    return visited;
}}
"#
    )
}

fn cpufetch_code(i: usize) -> String {
    format!(
        r#"/* cpu identification fixture {i} */
#include <string.h>

struct cpu_info_{i} {{
    unsigned family;
    unsigned model;
    char name[64];
}};

static unsigned extract_bits_{i}(unsigned reg, int hi, int lo) {{
    return (reg >> lo) & ((1u << (hi - lo + 1)) - 1);
}}

const char *decode_cpu_name_{i}(struct cpu_info_{i} *info, unsigned eax) {{
    info->family = extract_bits_{i}(eax, 11, 8);
    info->model = extract_bits_{i}(eax, 7, 4);
    if (info->family == 6)
        strcpy(info->name, "core-family-{i}");
    else
        strcpy(info->name, "unknown-{i}");
    return info->name;
}}
"#
    )
}
