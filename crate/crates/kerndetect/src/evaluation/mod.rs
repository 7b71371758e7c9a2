//! Scoring of detection records against ground truth: outcome
//! classification with a three-way false-negative taxonomy, per-algorithm
//! confusion matrices with cross-algorithm negative pooling, accuracy, and
//! a suite-by-query summary grid.

pub mod report;

use crate::corpus::Corpus;
use crate::parser::VerdictKind;
use crate::pipeline::{DetectionRecord, DetectionStatus};
use crate::prompt::Algorithm;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Confusion-matrix class of one scored (unit, query) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    TruePositive,
    TrueNegative,
    FalsePositive,
    FalseNegative,
}

/// Why a ground-truth positive was missed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FnError {
    /// The model answered that no function performs the algorithm.
    Missed,
    /// The model named at least one function, but not the outermost one.
    WrongFunction,
    /// The output could not be parsed into a verdict.
    Unparseable,
}

/// One scored (unit, query) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub unit_id: String,
    pub query: Algorithm,
    pub class: OutcomeClass,
    /// Present exactly when `class` is `FalseNegative`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fn_error: Option<FnError>,
}

/// Per-query TP/TN/FP/FN counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_count: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_count
    }

    pub fn add(&mut self, class: OutcomeClass) {
        match class {
            OutcomeClass::TruePositive => self.tp += 1,
            OutcomeClass::TrueNegative => self.tn += 1,
            OutcomeClass::FalsePositive => self.fp += 1,
            OutcomeClass::FalseNegative => self.fn_count += 1,
        }
    }
}

/// False-negative counts by failure kind (reported as errors 1..3).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    pub missed: usize,
    pub wrong_function: usize,
    pub unparseable: usize,
}

impl ErrorBreakdown {
    pub fn total(&self) -> usize {
        self.missed + self.wrong_function + self.unparseable
    }

    pub fn add(&mut self, error: FnError) {
        match error {
            FnError::Missed => self.missed += 1,
            FnError::WrongFunction => self.wrong_function += 1,
            FnError::Unparseable => self.unparseable += 1,
        }
    }
}

/// One cell of the suite-by-query summary grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub query: Algorithm,
    /// Units of the suite detected for this query: true positives plus
    /// false positives.
    pub detected: usize,
    pub total: usize,
    /// 100 * detected / total, rounded to one decimal.
    pub pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub suite: String,
    pub total: usize,
    pub cells: Vec<SummaryCell>,
}

/// Detection-rate percentage grid: one row per suite category, one column
/// per queried algorithm.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SummaryMatrix {
    pub rows: Vec<SummaryRow>,
}

impl SummaryMatrix {
    pub fn cell(&self, suite: &str, query: Algorithm) -> Option<&SummaryCell> {
        self.rows
            .iter()
            .find(|r| r.suite == suite)?
            .cells
            .iter()
            .find(|c| c.query == query)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("record is for unit \"{record}\" but truth describes \"{truth}\"")]
    UnitMismatch { record: String, truth: String },
    #[error("record for unit \"{unit}\" has no verdict (status {status})")]
    NotScoreable { unit: String, status: String },
    #[error("confusion matrix has no scored units")]
    EmptyMatrix,
    #[error("outcomes do not cover unit \"{unit}\" under the {query} query")]
    MissingPair { unit: String, query: Algorithm },
    #[error("unit \"{unit}\" is not part of the corpus")]
    UnknownUnit { unit: String },
}

/// Split the corpus for one query: positives are the units labeled with the
/// queried algorithm; negatives are everything else, i.e. the false-positive
/// suites plus real units of the other two algorithms.
pub fn pool_for_query(
    corpus: &Corpus,
    query: Algorithm,
) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut positives = BTreeSet::new();
    let mut negatives = BTreeSet::new();
    for unit in corpus.units() {
        let truth = corpus
            .truth(&unit.id)
            .expect("corpus invariant: every unit has a truth entry");
        if truth.algorithm.algorithm() == Some(query) {
            positives.insert(unit.id.clone());
        } else {
            negatives.insert(unit.id.clone());
        }
    }
    (positives, negatives)
}

fn last_segment(name: &str) -> &str {
    name.rsplit("::").next().unwrap_or(name)
}

/// Ground-truth match: the full string or the final unqualified segment,
/// case-sensitive.
fn names_match(predicted: &str, expected: &str) -> bool {
    predicted == expected || last_segment(predicted) == last_segment(expected)
}

/// Score one completed record against its unit's ground truth.
///
/// Ground-truth positives: a positive verdict containing the expected
/// outermost function is a TP; a negative verdict, a positive verdict
/// without the outermost, and unparseable output are FNs of kind missed,
/// wrong-function and unparseable respectively. Ground-truth negatives: a
/// positive verdict is an FP; both negative verdicts and unparseable output
/// count as TN (unparseable negatives are surfaced separately in reports).
pub fn classify(
    record: &DetectionRecord,
    truth: &crate::corpus::GroundTruth,
) -> Result<Outcome, EvalError> {
    if record.unit_id != truth.unit_id {
        return Err(EvalError::UnitMismatch {
            record: record.unit_id.clone(),
            truth: truth.unit_id.clone(),
        });
    }
    let verdict = record.verdict.as_ref().ok_or_else(|| EvalError::NotScoreable {
        unit: record.unit_id.clone(),
        status: match &record.status {
            DetectionStatus::Completed => "completed".into(),
            DetectionStatus::SkippedOverBudget { .. } => "skipped-over-budget".into(),
            DetectionStatus::Failed { reason } => format!("failed: {reason}"),
        },
    })?;

    let is_positive_unit = truth.algorithm.algorithm() == Some(record.query);
    let (class, fn_error) = if is_positive_unit {
        let expected = truth
            .outermost_function
            .as_deref()
            .expect("corpus invariant: labeled units name an outermost function");
        match verdict.kind {
            VerdictKind::Positive => {
                if verdict.functions.iter().any(|f| names_match(f, expected)) {
                    (OutcomeClass::TruePositive, None)
                } else {
                    (OutcomeClass::FalseNegative, Some(FnError::WrongFunction))
                }
            }
            VerdictKind::Negative => (OutcomeClass::FalseNegative, Some(FnError::Missed)),
            VerdictKind::Unparseable => {
                (OutcomeClass::FalseNegative, Some(FnError::Unparseable))
            }
        }
    } else {
        match verdict.kind {
            VerdictKind::Positive => (OutcomeClass::FalsePositive, None),
            VerdictKind::Negative | VerdictKind::Unparseable => {
                (OutcomeClass::TrueNegative, None)
            }
        }
    };
    Ok(Outcome {
        unit_id: record.unit_id.clone(),
        query: record.query,
        class,
        fn_error,
    })
}

/// (tp + tn) / (tp + tn + fp + fn) as an exact fraction.
pub fn accuracy(matrix: &ConfusionMatrix) -> Result<f64, EvalError> {
    match matrix.total() {
        0 => Err(EvalError::EmptyMatrix),
        total => Ok((matrix.tp + matrix.tn) as f64 / total as f64),
    }
}

/// Fold outcomes into one confusion matrix per query.
pub fn confusion_matrices(outcomes: &[Outcome]) -> BTreeMap<Algorithm, ConfusionMatrix> {
    let mut matrices: BTreeMap<Algorithm, ConfusionMatrix> = BTreeMap::new();
    for outcome in outcomes {
        matrices.entry(outcome.query).or_default().add(outcome.class);
    }
    matrices
}

/// Count false-negative kinds per query. The three counts always partition
/// the FN outcomes.
pub fn error_breakdown(outcomes: &[Outcome]) -> BTreeMap<Algorithm, ErrorBreakdown> {
    let mut breakdowns: BTreeMap<Algorithm, ErrorBreakdown> = BTreeMap::new();
    for outcome in outcomes {
        let entry = breakdowns.entry(outcome.query).or_default();
        if let Some(error) = outcome.fn_error {
            entry.add(error);
        }
    }
    breakdowns
}

/// Build the suite-by-query summary grid.
///
/// A cell counts the units of a suite that the model detected for a query:
/// false positives on ground-truth negatives, true positives on
/// ground-truth positives. With that reading the diagonal for the real
/// suites equals the TP rate of the corresponding confusion matrix.
/// Requires an outcome for every (unit, query) pair.
pub fn summarize(
    outcomes: &[Outcome],
    corpus: &Corpus,
    queries: &[Algorithm],
) -> Result<SummaryMatrix, EvalError> {
    let mut seen: BTreeMap<(&str, Algorithm), &Outcome> = BTreeMap::new();
    for outcome in outcomes {
        if corpus.truth(&outcome.unit_id).is_none() {
            return Err(EvalError::UnknownUnit {
                unit: outcome.unit_id.clone(),
            });
        }
        seen.insert((outcome.unit_id.as_str(), outcome.query), outcome);
    }
    for unit in corpus.units() {
        for query in queries {
            if !seen.contains_key(&(unit.id.as_str(), *query)) {
                return Err(EvalError::MissingPair {
                    unit: unit.id.clone(),
                    query: *query,
                });
            }
        }
    }
    Ok(summarize_available(outcomes, corpus, queries))
}

/// Like [`summarize`] but tolerates missing pairs (they simply do not count
/// as detections); used when a run has not-scored units.
pub fn summarize_available(
    outcomes: &[Outcome],
    corpus: &Corpus,
    queries: &[Algorithm],
) -> SummaryMatrix {
    let mut suite_of: BTreeMap<&str, &str> = BTreeMap::new();
    let mut suite_totals: BTreeMap<&str, usize> = BTreeMap::new();
    for unit in corpus.units() {
        suite_of.insert(unit.id.as_str(), unit.suite.as_str());
        *suite_totals.entry(unit.suite.as_str()).or_default() += 1;
    }

    let mut detected: BTreeMap<(&str, Algorithm), usize> = BTreeMap::new();
    for outcome in outcomes {
        let hit = matches!(
            outcome.class,
            OutcomeClass::TruePositive | OutcomeClass::FalsePositive
        );
        if hit {
            if let Some(suite) = suite_of.get(outcome.unit_id.as_str()) {
                *detected.entry((*suite, outcome.query)).or_default() += 1;
            }
        }
    }

    let rows = corpus
        .suites()
        .into_iter()
        .map(|suite| {
            let total = suite_totals.get(suite.as_str()).copied().unwrap_or(0);
            let cells = queries
                .iter()
                .map(|query| {
                    let count = detected
                        .get(&(suite.as_str(), *query))
                        .copied()
                        .unwrap_or(0);
                    SummaryCell {
                        query: *query,
                        detected: count,
                        total,
                        pct: report::round1(100.0 * count as f64 / total.max(1) as f64),
                    }
                })
                .collect();
            SummaryRow {
                suite,
                total,
                cells,
            }
        })
        .collect();
    SummaryMatrix { rows }
}

/// A (unit, query) pair excluded from the matrices because detection did
/// not complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotScored {
    pub unit_id: String,
    pub query: Algorithm,
    pub reason: String,
}

/// A negative-pool unit whose output was unparseable; counted as TN but
/// listed so the divergence stays visible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnparseableNegative {
    pub unit_id: String,
    pub query: Algorithm,
}

/// Everything scoring produces for one run.
#[derive(Debug, Clone, Default)]
pub struct ScoredRun {
    pub outcomes: Vec<Outcome>,
    pub matrices: BTreeMap<Algorithm, ConfusionMatrix>,
    pub breakdowns: BTreeMap<Algorithm, ErrorBreakdown>,
    pub summary: SummaryMatrix,
    pub not_scored: Vec<NotScored>,
    pub unparseable_negatives: Vec<UnparseableNegative>,
}

/// Score a full run: classify every completed record, fold matrices and
/// breakdowns, build the summary grid, and set aside records that cannot
/// be scored.
pub fn score_records(
    records: &[DetectionRecord],
    corpus: &Corpus,
    queries: &[Algorithm],
) -> Result<ScoredRun, EvalError> {
    let mut outcomes = Vec::new();
    let mut not_scored = Vec::new();
    let mut unparseable_negatives = Vec::new();

    for record in records {
        let truth = corpus
            .truth(&record.unit_id)
            .ok_or_else(|| EvalError::UnknownUnit {
                unit: record.unit_id.clone(),
            })?;
        match &record.status {
            DetectionStatus::Completed => {
                let outcome = classify(record, truth)?;
                if outcome.class == OutcomeClass::TrueNegative
                    && record
                        .verdict
                        .as_ref()
                        .is_some_and(|v| v.kind == VerdictKind::Unparseable)
                {
                    unparseable_negatives.push(UnparseableNegative {
                        unit_id: outcome.unit_id.clone(),
                        query: outcome.query,
                    });
                }
                outcomes.push(outcome);
            }
            DetectionStatus::SkippedOverBudget {
                token_estimate,
                budget,
            } => not_scored.push(NotScored {
                unit_id: record.unit_id.clone(),
                query: record.query,
                reason: format!(
                    "over token budget after reduction ({token_estimate} > {budget})"
                ),
            }),
            DetectionStatus::Failed { reason } => not_scored.push(NotScored {
                unit_id: record.unit_id.clone(),
                query: record.query,
                reason: reason.clone(),
            }),
        }
    }

    let matrices = confusion_matrices(&outcomes);
    let breakdowns = error_breakdown(&outcomes);
    let summary = summarize_available(&outcomes, corpus, queries);
    Ok(ScoredRun {
        outcomes,
        matrices,
        breakdowns,
        summary,
        not_scored,
        unparseable_negatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::ModelConfig;
    use crate::corpus::{GroundTruth, Label, Language, SourceUnit};
    use crate::parser::parse_verdict;
    use crate::pipeline::DetectionStatus;
    use proptest::prelude::*;
    use std::path::PathBuf;

    fn make_unit(id: &str, suite: &str) -> SourceUnit {
        let text = format!("void f_{id}(void) {{}}\n");
        SourceUnit {
            id: id.into(),
            path: PathBuf::from(format!("{id}.c")),
            language: Language::C,
            token_estimate: crate::corpus::tokens::estimate_tokens(&text),
            text,
            suite: suite.into(),
        }
    }

    fn make_truth(id: &str, label: Label, outermost: Option<&str>) -> GroundTruth {
        GroundTruth {
            unit_id: id.into(),
            algorithm: label,
            variant: None,
            outermost_function: outermost.map(String::from),
        }
    }

    /// Corpus with `sizes` units per suite, mirroring the benchmark layout.
    fn corpus_with_sizes(sizes: &[(&str, Label, usize)]) -> Corpus {
        let mut units = Vec::new();
        let mut truths = Vec::new();
        for (suite, label, count) in sizes {
            for i in 0..*count {
                let id = format!("{suite}_{i:03}");
                units.push(make_unit(&id, suite));
                let outermost = label.algorithm().map(|_| format!("f_{id}"));
                truths.push(make_truth(&id, *label, outermost.as_deref()));
            }
        }
        Corpus::from_parts(units, truths).unwrap()
    }

    fn benchmark_corpus() -> Corpus {
        corpus_with_sizes(&[
            ("gemm", Label::Gemm, 128),
            ("conv", Label::Conv, 15),
            ("fft", Label::Fft, 15),
            ("parboil", Label::None, 10),
            ("caffe", Label::None, 182),
            ("acotsp", Label::None, 13),
            ("cpufetch", Label::None, 22),
        ])
    }

    fn record_with(unit_id: &str, query: Algorithm, response: &str) -> DetectionRecord {
        DetectionRecord {
            unit_id: unit_id.into(),
            query,
            strategy: "direct".into(),
            status: DetectionStatus::Completed,
            transcripts: Vec::new(),
            responses: Vec::new(),
            verdict: Some(parse_verdict(response)),
            config: ModelConfig::default(),
            started_at: String::new(),
            finished_at: String::new(),
        }
    }

    #[test]
    fn pools_match_benchmark_margins() {
        let corpus = benchmark_corpus();
        let (pos, neg) = pool_for_query(&corpus, Algorithm::Gemm);
        assert_eq!((pos.len(), neg.len()), (128, 257));
        let (pos, neg) = pool_for_query(&corpus, Algorithm::Conv);
        assert_eq!((pos.len(), neg.len()), (15, 370));
        let (pos, neg) = pool_for_query(&corpus, Algorithm::Fft);
        assert_eq!((pos.len(), neg.len()), (15, 370));
        assert!(pos.is_disjoint(&neg));
        assert_eq!(pos.len() + neg.len(), corpus.len());
    }

    #[test]
    fn all_none_corpus_has_no_positives() {
        let corpus = corpus_with_sizes(&[("cpufetch", Label::None, 5)]);
        let (pos, neg) = pool_for_query(&corpus, Algorithm::Gemm);
        assert!(pos.is_empty());
        assert_eq!(neg.len(), 5);
    }

    #[test]
    fn containment_rule_scores_tp() {
        let truth = make_truth("u", Label::Gemm, Some("matmul"));
        let record = record_with("u", Algorithm::Gemm, "Yes: matmul, helper");
        let outcome = classify(&record, &truth).unwrap();
        assert_eq!(outcome.class, OutcomeClass::TruePositive);
        assert_eq!(outcome.fn_error, None);
    }

    #[test]
    fn wrong_function_is_a_fn_of_kind_wrong_function() {
        let truth = make_truth("u", Label::Gemm, Some("matmul"));
        let record = record_with("u", Algorithm::Gemm, "Yes: inner_kernel");
        let outcome = classify(&record, &truth).unwrap();
        assert_eq!(outcome.class, OutcomeClass::FalseNegative);
        assert_eq!(outcome.fn_error, Some(FnError::WrongFunction));
    }

    #[test]
    fn negative_unit_positive_verdict_is_fp() {
        let truth = make_truth("u", Label::None, None);
        let record = record_with("u", Algorithm::Conv, "Yes: im2col");
        let outcome = classify(&record, &truth).unwrap();
        assert_eq!(outcome.class, OutcomeClass::FalsePositive);
    }

    #[test]
    fn unparseable_on_negative_counts_tn() {
        let truth = make_truth("u", Label::None, None);
        let record = record_with("u", Algorithm::Fft, "The code is unclear.");
        let outcome = classify(&record, &truth).unwrap();
        assert_eq!(outcome.class, OutcomeClass::TrueNegative);
    }

    #[test]
    fn qualified_name_matches_unqualified_truth() {
        let truth = make_truth("u", Label::Conv, Some("forward_cpu"));
        let record = record_with("u", Algorithm::Conv, "Yes: Conv::forward_cpu");
        assert_eq!(
            classify(&record, &truth).unwrap().class,
            OutcomeClass::TruePositive
        );
        // case matters
        let record = record_with("u", Algorithm::Conv, "Yes: Forward_cpu");
        assert_eq!(
            classify(&record, &truth).unwrap().class,
            OutcomeClass::FalseNegative
        );
    }

    #[test]
    fn id_mismatch_is_an_error() {
        let truth = make_truth("a", Label::Gemm, Some("f"));
        let record = record_with("b", Algorithm::Gemm, "No");
        assert!(matches!(
            classify(&record, &truth),
            Err(EvalError::UnitMismatch { .. })
        ));
    }

    #[test]
    fn accuracy_matches_published_tables() {
        let close = |m: ConfusionMatrix, expected: f64| {
            let acc = accuracy(&m).unwrap();
            assert!(
                (report::trunc1(acc * 100.0) - expected).abs() < 0.05,
                "accuracy {acc} not ~{expected}"
            );
        };
        close(
            ConfusionMatrix {
                tp: 119,
                fn_count: 9,
                fp: 111,
                tn: 146,
            },
            68.8,
        );
        close(
            ConfusionMatrix {
                tp: 13,
                fn_count: 2,
                fp: 6,
                tn: 364,
            },
            97.9,
        );
        let all_negative = ConfusionMatrix {
            tp: 0,
            fn_count: 0,
            fp: 0,
            tn: 10,
        };
        assert_eq!(accuracy(&all_negative).unwrap(), 1.0);
        assert!(matches!(
            accuracy(&ConfusionMatrix::default()),
            Err(EvalError::EmptyMatrix)
        ));
    }

    #[test]
    fn accuracy_is_one_iff_no_errors() {
        let m = ConfusionMatrix {
            tp: 5,
            tn: 5,
            fp: 0,
            fn_count: 0,
        };
        assert_eq!(accuracy(&m).unwrap(), 1.0);
        let m = ConfusionMatrix {
            tp: 5,
            tn: 5,
            fp: 1,
            fn_count: 0,
        };
        assert!(accuracy(&m).unwrap() < 1.0);
    }

    #[test]
    fn summary_cells_match_reported_rates() {
        // conv suite fully misdetected as GEMM; 7 of 10 parboil units
        // misdetected as CONV; one conv unit correctly detected
        let corpus = corpus_with_sizes(&[
            ("conv", Label::Conv, 15),
            ("parboil", Label::None, 10),
        ]);
        let mut outcomes = Vec::new();
        for unit in corpus.units() {
            let (gemm_answer, conv_answer) = match unit.suite.as_str() {
                "conv" => ("Yes: something", format!("Yes: f_{}", unit.id)),
                _ => {
                    let idx: usize = unit.id[unit.id.len() - 3..].parse().unwrap();
                    ("No", if idx < 7 { "Yes: spurious".into() } else { "No".into() })
                }
            };
            let truth = corpus.truth(&unit.id).unwrap();
            outcomes.push(
                classify(&record_with(&unit.id, Algorithm::Gemm, gemm_answer), truth).unwrap(),
            );
            outcomes.push(
                classify(&record_with(&unit.id, Algorithm::Conv, &conv_answer), truth).unwrap(),
            );
        }
        let summary =
            summarize(&outcomes, &corpus, &[Algorithm::Gemm, Algorithm::Conv]).unwrap();
        assert_eq!(summary.cell("conv", Algorithm::Gemm).unwrap().pct, 100.0);
        assert_eq!(summary.cell("parboil", Algorithm::Conv).unwrap().pct, 70.0);
        assert_eq!(summary.cell("parboil", Algorithm::Gemm).unwrap().pct, 0.0);
        // diagonal equals the TP rate
        assert_eq!(summary.cell("conv", Algorithm::Conv).unwrap().pct, 100.0);
    }

    #[test]
    fn summarize_rejects_missing_pairs() {
        let corpus = corpus_with_sizes(&[("fft", Label::Fft, 2)]);
        let truth = corpus.truth("fft_000").unwrap();
        let outcomes =
            vec![classify(&record_with("fft_000", Algorithm::Fft, "No"), truth).unwrap()];
        assert!(matches!(
            summarize(&outcomes, &corpus, &[Algorithm::Fft]),
            Err(EvalError::MissingPair { .. })
        ));
    }

    #[test]
    fn breakdown_partitions_false_negatives() {
        let corpus = corpus_with_sizes(&[("gemm", Label::Gemm, 9)]);
        let answers = [
            "No",
            "No",
            "Yes: not_the_one",
            "Yes: also_wrong",
            "gibberish",
            "gibberish",
            "gibberish",
            "gibberish",
            "gibberish",
        ];
        let outcomes: Vec<Outcome> = corpus
            .units()
            .iter()
            .zip(answers)
            .map(|(u, a)| {
                classify(
                    &record_with(&u.id, Algorithm::Gemm, a),
                    corpus.truth(&u.id).unwrap(),
                )
                .unwrap()
            })
            .collect();
        let breakdown = error_breakdown(&outcomes)[&Algorithm::Gemm];
        assert_eq!(
            (breakdown.missed, breakdown.wrong_function, breakdown.unparseable),
            (2, 2, 5)
        );
        let matrix = confusion_matrices(&outcomes)[&Algorithm::Gemm];
        assert_eq!(breakdown.total(), matrix.fn_count);
    }

    proptest! {
        /// error1 + error2 + error3 == fn for every query on randomized runs.
        #[test]
        fn breakdown_totals_equal_fn_counts(
            seeds in proptest::collection::vec((0u8..6, 0u8..3), 1..120)
        ) {
            let corpus = corpus_with_sizes(&[
                ("gemm", Label::Gemm, 14),
                ("fft", Label::Fft, 7),
                ("caffe", Label::None, 9),
            ]);
            let mut outcomes = Vec::new();
            for (i, (style, query_idx)) in seeds.iter().enumerate() {
                let unit = &corpus.units()[i % corpus.len()];
                let query = Algorithm::ALL[*query_idx as usize];
                let answer = match style {
                    0 => format!("Yes: f_{}", unit.id),
                    1 => "Yes: some_other_function".to_string(),
                    2 => "No".to_string(),
                    3 => "Yes: the function `A<T>::f` does".to_string(),
                    4 => "I cannot tell.".to_string(),
                    _ => "Yes: f_x, f_y and f_z".to_string(),
                };
                let truth = corpus.truth(&unit.id).unwrap();
                outcomes.push(
                    classify(&record_with(&unit.id, query, &answer), truth).unwrap(),
                );
            }
            let matrices = confusion_matrices(&outcomes);
            let breakdowns = error_breakdown(&outcomes);
            for (query, matrix) in &matrices {
                let breakdown = breakdowns.get(query).copied().unwrap_or_default();
                prop_assert_eq!(breakdown.total(), matrix.fn_count);
                prop_assert!(matrix.fn_count == 0 || breakdown.total() > 0);
            }
        }

        /// fn_error is present exactly on false negatives.
        #[test]
        fn fn_error_accompanies_fn_only(
            style in 0u8..6,
            is_positive_unit in proptest::bool::ANY,
        ) {
            let (label, suite) = if is_positive_unit {
                (Label::Gemm, "gemm")
            } else {
                (Label::None, "caffe")
            };
            let corpus = corpus_with_sizes(&[(suite, label, 1)]);
            let unit = &corpus.units()[0];
            let answer = match style {
                0 => format!("Yes: f_{}", unit.id),
                1 => "Yes: wrong_fn".to_string(),
                2 => "No".to_string(),
                3 => "???".to_string(),
                4 => "Yes: ".to_string(),
                _ => "No, there is no function".to_string(),
            };
            let outcome = classify(
                &record_with(&unit.id, Algorithm::Gemm, &answer),
                corpus.truth(&unit.id).unwrap(),
            ).unwrap();
            prop_assert_eq!(
                outcome.fn_error.is_some(),
                outcome.class == OutcomeClass::FalseNegative
            );
        }
    }
}
