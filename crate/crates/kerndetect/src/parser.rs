//! Normalization and classification of raw model output.
//!
//! The model is instructed to answer `Yes: {function name}` or `No`, but
//! real outputs drift from that format. Two normalizers scrub the known
//! garbage, and [`parse_verdict`] dispatches on the observed leading token —
//! never on ground truth — so the parser works on unlabeled code.

use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

/// Parsed model decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Detected function names; non-empty exactly when `kind` is `Positive`.
    pub functions: Vec<String>,
    /// The unmodified model output, preserved for audit.
    pub raw: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Positive,
    Negative,
    Unparseable,
}

impl Verdict {
    pub fn is_positive(&self) -> bool {
        self.kind == VerdictKind::Positive
    }
}

/// Substrings scrubbed from affirmative answers, applied in this order.
const POSITIVE_REMOVALS: [&str; 4] = ["\nNo", "\n", ".", "()"];

/// Phrases scrubbed (case-insensitively) from negative answers.
const NEGATIVE_PHRASES: [&str; 2] = [
    "the code does not contain any function",
    "there is no function",
];

static NEGATIVE_PHRASE_RES: LazyLock<Vec<regex::Regex>> = LazyLock::new(|| {
    NEGATIVE_PHRASES
        .iter()
        .map(|p| {
            regex::RegexBuilder::new(&regex::escape(p))
                .case_insensitive(true)
                .build()
                .expect("static phrase regex")
        })
        .collect()
});

static AND_SPLIT_RE: LazyLock<regex::Regex> =
    LazyLock::new(|| regex::Regex::new(r"\band\b").expect("static split regex"));

/// Scrub an affirmative answer: remove every `\nNo`, `\n`, `.` and `()`
/// occurrence (in that order, repeated until stable so removal cannot
/// manufacture a new occurrence), then trim surrounding whitespace.
pub fn normalize_positive(text: &str) -> String {
    let mut current = text.to_string();
    loop {
        let mut next = current.clone();
        for sub in POSITIVE_REMOVALS {
            next = next.replace(sub, "");
        }
        if next == current {
            break;
        }
        current = next;
    }
    current.trim().to_string()
}

/// Scrub a negative answer: remove the boilerplate phrases the model
/// occasionally appends, collapse the whitespace gaps that removal leaves,
/// then trim whitespace and trailing punctuation. The pass repeats until
/// stable: collapsing whitespace can expose a phrase occurrence that the
/// first sweep missed.
pub fn normalize_negative(text: &str) -> String {
    let mut current = text.to_string();
    loop {
        let next = negative_pass(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn negative_pass(text: &str) -> String {
    let mut current = text.to_string();
    loop {
        let mut next = current.clone();
        for re in NEGATIVE_PHRASE_RES.iter() {
            next = re.replace_all(&next, "").into_owned();
        }
        if next == current {
            break;
        }
        current = next;
    }
    let mut collapsed = String::with_capacity(current.len());
    let mut in_gap = false;
    for c in current.chars() {
        if c.is_whitespace() {
            if !in_gap {
                collapsed.push(' ');
                in_gap = true;
            }
        } else {
            collapsed.push(c);
            in_gap = false;
        }
    }
    let mut out = collapsed.trim().to_string();
    while out
        .chars()
        .last()
        .is_some_and(|c| c.is_whitespace() || matches!(c, '.' | ',' | '!' | '?' | ';' | ':'))
    {
        out.pop();
    }
    out
}

fn leading_word(text: &str) -> &str {
    let end = text
        .find(|c: char| !c.is_ascii_alphabetic())
        .unwrap_or(text.len());
    &text[..end]
}

/// Canonicalize one candidate function name: strip surrounding backticks,
/// `()` suffixes and trailing dots. C++ qualification (`ns::f`, `A<T>::f`)
/// is kept as-is; matching against ground truth handles both forms.
fn clean_name(fragment: &str) -> String {
    let mut name = fragment.trim();
    loop {
        let before = name;
        name = name.trim_matches('`').trim();
        name = name.strip_suffix("()").unwrap_or(name);
        name = name.strip_suffix('.').unwrap_or(name);
        if name == before {
            break;
        }
    }
    name.to_string()
}

fn plausible_identifier(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace)
}

/// Classify raw model output. Total and deterministic; unparseable output
/// is a value, not an error.
///
/// Dispatch: a leading `Yes` (any case) routes through the positive
/// normalizer and name extraction; anything else routes through the negative
/// normalizer and must reduce to a bare `No` to count as negative.
pub fn parse_verdict(text: &str) -> Verdict {
    let raw = text.to_string();
    let trimmed = text.trim();
    if leading_word(trimmed).eq_ignore_ascii_case("yes") {
        let normalized = normalize_positive(trimmed);
        let mut rest = normalized.as_str();
        if leading_word(rest).eq_ignore_ascii_case("yes") {
            rest = &rest[3..];
        }
        let rest = rest.trim_start().strip_prefix(':').unwrap_or(rest).trim();
        let mut functions: Vec<String> = Vec::new();
        for comma_part in rest.split(',') {
            for part in AND_SPLIT_RE.split(comma_part) {
                let name = clean_name(part);
                if plausible_identifier(&name) && !functions.contains(&name) {
                    functions.push(name);
                }
            }
        }
        if functions.is_empty() {
            Verdict {
                kind: VerdictKind::Unparseable,
                functions: Vec::new(),
                raw,
            }
        } else {
            Verdict {
                kind: VerdictKind::Positive,
                functions,
                raw,
            }
        }
    } else {
        let normalized = normalize_negative(trimmed);
        if normalized.eq_ignore_ascii_case("no") {
            Verdict {
                kind: VerdictKind::Negative,
                functions: Vec::new(),
                raw,
            }
        } else {
            Verdict {
                kind: VerdictKind::Unparseable,
                functions: Vec::new(),
                raw,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn positive_removal_list() {
        assert_eq!(normalize_positive("Yes: gemm_nn()."), "Yes: gemm_nn");
        assert_eq!(normalize_positive("Yes: fft\nNo"), "Yes: fft");
        assert_eq!(normalize_positive("Yes: a, b"), "Yes: a, b");
    }

    #[test]
    fn negative_phrase_list() {
        assert_eq!(
            normalize_negative("No. The code does not contain any function"),
            "No"
        );
        assert_eq!(normalize_negative("No"), "No");
        assert_eq!(
            normalize_negative("No, there is no function performing it"),
            "No, performing it"
        );
    }

    #[test]
    fn canonical_formats_round_trip() {
        let v = parse_verdict("Yes: f");
        assert_eq!(v.kind, VerdictKind::Positive);
        assert_eq!(v.functions, vec!["f"]);
        let v = parse_verdict("No");
        assert_eq!(v.kind, VerdictKind::Negative);
        assert!(v.functions.is_empty());
    }

    #[test]
    fn comma_separated_names() {
        let v = parse_verdict("Yes: matmul, matmul_tiled");
        assert_eq!(v.functions, vec!["matmul", "matmul_tiled"]);
    }

    #[test]
    fn and_separated_names() {
        let v = parse_verdict("Yes: matmul and helper");
        assert_eq!(v.functions, vec!["matmul", "helper"]);
        // "and" inside an identifier is not a separator
        let v = parse_verdict("Yes: rand_fill");
        assert_eq!(v.functions, vec!["rand_fill"]);
    }

    #[test]
    fn cpp_artifacts_are_unparseable() {
        let v = parse_verdict(
            "Yes: the function `Conv<float>::forward_cpu` performs a convolution",
        );
        assert_eq!(v.kind, VerdictKind::Unparseable);
        assert!(v.functions.is_empty());
    }

    #[test]
    fn raw_text_is_preserved() {
        let v = parse_verdict("  Yes: f  ");
        assert_eq!(v.raw, "  Yes: f  ");
    }

    #[test]
    fn verdict_functions_have_no_duplicates() {
        let v = parse_verdict("Yes: f, f, f()");
        assert_eq!(v.functions, vec!["f"]);
    }

    proptest! {
        #[test]
        fn parse_is_total(s in "\\PC*") {
            let v = parse_verdict(&s);
            prop_assert_eq!(v.raw, s);
            prop_assert_eq!(v.functions.is_empty(), v.kind != VerdictKind::Positive);
        }

        #[test]
        fn normalizers_are_idempotent(s in "\\PC*") {
            let p = normalize_positive(&s);
            prop_assert_eq!(normalize_positive(&p), p.clone());
            let n = normalize_negative(&s);
            prop_assert_eq!(normalize_negative(&n), n.clone());
        }

        #[test]
        fn normalizers_idempotent_on_answer_like_text(
            s in "(Yes|No|yes|no)[:,.]? ?[a-zA-Z_()`:<>., \\n]{0,40}"
        ) {
            let p = normalize_positive(&s);
            prop_assert_eq!(normalize_positive(&p), p.clone());
            let n = normalize_negative(&s);
            prop_assert_eq!(normalize_negative(&n), n.clone());
        }

        #[test]
        fn positive_functions_are_identifiers(s in "\\PC*") {
            let v = parse_verdict(&s);
            for f in &v.functions {
                prop_assert!(!f.is_empty());
                prop_assert!(!f.chars().any(char::is_whitespace));
            }
        }
    }
}
