//! Report emission: one machine-readable JSON file and one human-readable
//! table view per scored run, plus the stdout summary the CLI prints.
//!
//! Emission is deterministic: two emissions of the same scored run produce
//! byte-identical files, so replay benchmarks can be diffed.

use super::{ErrorBreakdown, NotScored, ScoredRun, SummaryMatrix, UnparseableNegative};
use crate::pipeline::RunManifest;
use crate::prompt::Algorithm;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Round to one decimal place (cell percentages).
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Truncate toward zero to one decimal place (accuracy percentages).
pub fn trunc1(x: f64) -> f64 {
    (x * 10.0).floor() / 10.0
}

fn pct(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        round1(100.0 * n as f64 / d as f64)
    }
}

/// Row-normalized percentages of a confusion matrix: tp/fn against the
/// positive pool, fp/tn against the negative pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixPercent {
    pub tp: f64,
    pub tn: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub algorithm: Algorithm,
    pub matrix: super::ConfusionMatrix,
    pub percent: MatrixPercent,
    /// Accuracy in percent, truncated to one decimal.
    pub accuracy_pct: f64,
    pub errors: ErrorBreakdown,
}

/// Full scored-run report; serialized as `report.json` and rendered as
/// `report.txt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub run: RunManifest,
    pub queries: Vec<QueryReport>,
    pub summary: SummaryMatrix,
    pub not_scored: Vec<NotScored>,
    pub unparseable_negatives: Vec<UnparseableNegative>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write report {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Assemble the report for a scored run.
pub fn build_report(run: RunManifest, scored: &ScoredRun) -> Report {
    let queries = run
        .queries
        .iter()
        .filter_map(|query| {
            let matrix = *scored.matrices.get(query)?;
            let errors = scored.breakdowns.get(query).copied().unwrap_or_default();
            let positives = matrix.tp + matrix.fn_count;
            let negatives = matrix.fp + matrix.tn;
            Some(QueryReport {
                algorithm: *query,
                matrix,
                percent: MatrixPercent {
                    tp: pct(matrix.tp, positives),
                    fn_pct: pct(matrix.fn_count, positives),
                    fp: pct(matrix.fp, negatives),
                    tn: pct(matrix.tn, negatives),
                },
                accuracy_pct: trunc1(
                    100.0 * (matrix.tp + matrix.tn) as f64 / matrix.total() as f64,
                ),
                errors,
            })
        })
        .collect();
    Report {
        run,
        queries,
        summary: scored.summary.clone(),
        not_scored: scored.not_scored.clone(),
        unparseable_negatives: scored.unparseable_negatives.clone(),
    }
}

/// The one-line accuracy summary printed by the CLI; numbers are exactly
/// the report's `accuracy_pct` values.
pub fn accuracy_line(report: &Report) -> String {
    if report.queries.is_empty() {
        return "accuracy: no scored units".to_string();
    }
    let parts: Vec<String> = report
        .queries
        .iter()
        .map(|q| format!("{} {:.1}%", q.algorithm.label(), q.accuracy_pct))
        .collect();
    format!("accuracy: {}", parts.join(", "))
}

/// Render the human-readable table view.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: &str| {
        out.push_str(line);
        out.push('\n');
    };

    push(&mut out, "kernel detection benchmark report");
    push(&mut out, "=================================");
    push(&mut out, &format!("strategy: {}", report.run.strategy));
    push(
        &mut out,
        &format!(
            "model: {} (temperature {}, top_p {}, max_tokens {})",
            report.run.config.model_id,
            report.run.config.temperature,
            report.run.config.top_p,
            report.run.config.max_output_tokens
        ),
    );
    push(&mut out, &format!("mode: {}", report.run.mode));
    push(
        &mut out,
        &format!(
            "corpus: {} units, hash {}",
            report.run.unit_count,
            &report.run.corpus_hash[..report.run.corpus_hash.len().min(16)]
        ),
    );
    push(
        &mut out,
        &format!(
            "queries: {}",
            report
                .run
                .queries
                .iter()
                .map(|q| q.label())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    out.push('\n');

    if report.queries.is_empty() {
        push(&mut out, "no scored units");
    }

    for q in &report.queries {
        push(&mut out, &format!("-- {} --", q.algorithm.label()));
        push(
            &mut out,
            "              predicted yes          predicted no",
        );
        let tp_cell = format!("tp: {} ({:.1}%)", q.matrix.tp, q.percent.tp);
        let fn_cell = format!("fn: {} ({:.1}%)", q.matrix.fn_count, q.percent.fn_pct);
        let fp_cell = format!("fp: {} ({:.1}%)", q.matrix.fp, q.percent.fp);
        let tn_cell = format!("tn: {} ({:.1}%)", q.matrix.tn, q.percent.tn);
        push(&mut out, &format!("actual yes    {tp_cell:<22}{fn_cell}"));
        push(&mut out, &format!("actual no     {fp_cell:<22}{tn_cell}"));
        push(&mut out, &format!("accuracy: {:.1}%", q.accuracy_pct));
        push(
            &mut out,
            &format!(
                "false negatives: error 1 (missed) = {}, error 2 (wrong function) = {}, error 3 (unparseable) = {}",
                q.errors.missed, q.errors.wrong_function, q.errors.unparseable
            ),
        );
        out.push('\n');
    }

    if !report.summary.rows.is_empty() {
        push(&mut out, "-- detection rate by suite (%) --");
        let mut header = format!("{:<12}{:>6}", "suite", "n");
        for q in &report.run.queries {
            header.push_str(&format!("{:>8}", q.label()));
        }
        push(&mut out, &header);
        for row in &report.summary.rows {
            let mut line = format!("{:<12}{:>6}", row.suite, row.total);
            for cell in &row.cells {
                line.push_str(&format!("{:>8.1}", cell.pct));
            }
            push(&mut out, &line);
        }
        out.push('\n');
    }

    push(&mut out, "-- not scored --");
    if report.not_scored.is_empty() {
        push(&mut out, "none");
    } else {
        for item in &report.not_scored {
            push(
                &mut out,
                &format!(
                    "{} [{}]: {}",
                    item.unit_id,
                    item.query.label(),
                    item.reason
                ),
            );
        }
    }
    out.push('\n');

    push(
        &mut out,
        "-- unparseable outputs on negative units (counted as tn) --",
    );
    if report.unparseable_negatives.is_empty() {
        push(&mut out, "none");
    } else {
        for item in &report.unparseable_negatives {
            push(
                &mut out,
                &format!("{} [{}]", item.unit_id, item.query.label()),
            );
        }
    }
    out
}

/// Write `report.json` and `report.txt` under `out_dir`.
pub fn emit_report(out_dir: &Path, report: &Report) -> Result<(), ReportError> {
    std::fs::create_dir_all(out_dir).map_err(|source| ReportError::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let json_path = out_dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report).expect("report always serializes");
    json.push('\n');
    std::fs::write(&json_path, json).map_err(|source| ReportError::Write {
        path: json_path,
        source,
    })?;
    let txt_path = out_dir.join("report.txt");
    std::fs::write(&txt_path, render_text(report)).map_err(|source| ReportError::Write {
        path: txt_path,
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::ModelConfig;
    use crate::evaluation::ConfusionMatrix;
    use std::collections::BTreeMap;

    fn manifest(queries: Vec<Algorithm>) -> RunManifest {
        RunManifest {
            strategy: "direct".into(),
            mode: "replay".into(),
            config: ModelConfig::default(),
            queries,
            corpus_hash: "deadbeefdeadbeefdeadbeef".into(),
            unit_count: 385,
            record_count: 1155,
        }
    }

    fn scored_with(matrix: ConfusionMatrix, query: Algorithm) -> ScoredRun {
        let mut matrices = BTreeMap::new();
        matrices.insert(query, matrix);
        ScoredRun {
            matrices,
            ..Default::default()
        }
    }

    #[test]
    fn accuracy_percent_is_truncated() {
        // 351/385 = 91.168..%: renders as 91.1, not 91.2
        let scored = scored_with(
            ConfusionMatrix {
                tp: 109,
                fn_count: 19,
                fp: 15,
                tn: 242,
            },
            Algorithm::Gemm,
        );
        let report = build_report(manifest(vec![Algorithm::Gemm]), &scored);
        assert_eq!(report.queries[0].accuracy_pct, 91.1);
        assert_eq!(accuracy_line(&report), "accuracy: GEMM 91.1%");
    }

    #[test]
    fn cell_percentages_are_rounded() {
        let scored = scored_with(
            ConfusionMatrix {
                tp: 119,
                fn_count: 9,
                fp: 111,
                tn: 146,
            },
            Algorithm::Gemm,
        );
        let report = build_report(manifest(vec![Algorithm::Gemm]), &scored);
        let p = report.queries[0].percent;
        assert_eq!(p.tp, 93.0);
        assert_eq!(p.fn_pct, 7.0);
        assert_eq!(p.fp, 43.2);
        assert_eq!(p.tn, 56.8);
    }

    #[test]
    fn zero_fp_cell_renders_as_published() {
        let scored = scored_with(
            ConfusionMatrix {
                tp: 14,
                fn_count: 1,
                fp: 0,
                tn: 370,
            },
            Algorithm::Fft,
        );
        let report = build_report(manifest(vec![Algorithm::Fft]), &scored);
        let text = render_text(&report);
        assert!(text.contains("fp: 0 (0.0%)"), "text was:\n{text}");
        assert!(text.contains("accuracy: 99.7%"));
    }

    #[test]
    fn empty_run_reports_no_scored_units() {
        let report = build_report(manifest(vec![]), &ScoredRun::default());
        let text = render_text(&report);
        assert!(text.contains("no scored units"));
        assert_eq!(accuracy_line(&report), "accuracy: no scored units");
    }

    #[test]
    fn emission_is_byte_deterministic() {
        let scored = scored_with(
            ConfusionMatrix {
                tp: 13,
                fn_count: 2,
                fp: 6,
                tn: 364,
            },
            Algorithm::Conv,
        );
        let report = build_report(manifest(vec![Algorithm::Conv]), &scored);
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        emit_report(dir_a.path(), &report).unwrap();
        emit_report(dir_b.path(), &report).unwrap();
        for name in ["report.json", "report.txt"] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs");
        }
    }

    #[test]
    fn report_json_round_trips() {
        let scored = scored_with(
            ConfusionMatrix {
                tp: 1,
                fn_count: 2,
                fp: 3,
                tn: 4,
            },
            Algorithm::Gemm,
        );
        let report = build_report(manifest(vec![Algorithm::Gemm]), &scored);
        let json = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
