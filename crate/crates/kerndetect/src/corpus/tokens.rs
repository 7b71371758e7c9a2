//! Token estimation and semantics-preserving token reduction.
//!
//! Estimation is a local chars/4 heuristic; the corpus this tool targets
//! fits a 16k context window, so provider-exact counts are not needed. A
//! dev-only test validates the heuristic against a reference BPE tokenizer.
//!
//! Reduction applies whitespace transforms first and strips comments only
//! as a last resort, since comment removal can hurt the model's ability to
//! reason about the code.

use super::SourceUnit;

/// Estimate the token count of `text` as ceil(chars / 4).
///
/// Deterministic, monotone in length, and zero only for empty text.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

/// Result of [`reduce_tokens`]: the (possibly rewritten) unit plus a flag
/// telling the pipeline whether it still exceeds the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedUnit {
    pub unit: SourceUnit,
    pub over_budget: bool,
}

/// Shrink a unit's token estimate to fit `budget` using only
/// semantics-preserving transforms, in fixed order: collapse blank-line
/// runs, convert leading space runs to tabs, and — only if still over
/// budget — strip comments. Units already within budget come back
/// untouched; units that remain oversized after every transform are
/// returned flagged rather than rejected, so the caller decides.
pub fn reduce_tokens(unit: &SourceUnit, budget: usize) -> ReducedUnit {
    assert!(budget > 0, "token budget must be positive");
    if unit.token_estimate <= budget {
        return ReducedUnit {
            unit: unit.clone(),
            over_budget: false,
        };
    }
    let mut text = collapse_blank_lines(&unit.text);
    text = leading_spaces_to_tabs(&text);
    if estimate_tokens(&text) > budget {
        text = strip_comments(&text);
        text = trim_line_ends(&text);
        text = collapse_blank_lines(&text);
        // comment removal can surface new leading space runs
        text = leading_spaces_to_tabs(&text);
    }
    let token_estimate = estimate_tokens(&text);
    ReducedUnit {
        unit: SourceUnit {
            text,
            token_estimate,
            ..unit.clone()
        },
        over_budget: token_estimate > budget,
    }
}

/// Collapse every run of blank (whitespace-only) lines into one empty line.
pub fn collapse_blank_lines(text: &str) -> String {
    let had_final_newline = text.ends_with('\n');
    let segments: Vec<&str> = text.split('\n').collect();
    let lines = if had_final_newline {
        &segments[..segments.len() - 1]
    } else {
        &segments[..]
    };
    let mut out_lines: Vec<&str> = Vec::with_capacity(lines.len());
    let mut in_blank_run = false;
    for line in lines {
        if line.trim().is_empty() {
            if !in_blank_run {
                out_lines.push("");
                in_blank_run = true;
            }
        } else {
            out_lines.push(line);
            in_blank_run = false;
        }
    }
    let mut out = out_lines.join("\n");
    if had_final_newline {
        out.push('\n');
    }
    out
}

/// Replace each run of four spaces in a line's leading whitespace with one
/// tab. Leftover runs shorter than four spaces are kept, so the transform
/// is idempotent.
pub fn leading_spaces_to_tabs(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let body_start = line
            .find(|c: char| c != ' ' && c != '\t')
            .unwrap_or(line.len());
        let (leading, body) = line.split_at(body_start);
        let mut spaces = 0usize;
        for c in leading.chars() {
            if c == ' ' {
                spaces += 1;
                if spaces == 4 {
                    out.push('\t');
                    spaces = 0;
                }
            } else {
                out.push_str(&" ".repeat(spaces));
                spaces = 0;
                out.push(c);
            }
        }
        out.push_str(&" ".repeat(spaces));
        out.push_str(body);
    }
    out
}

#[derive(PartialEq)]
enum ScanState {
    Code,
    LineComment,
    BlockComment,
    Str,
    Char,
    RawStr,
}

/// Remove `//` and `/* */` comments while leaving string, character and raw
/// string literals untouched. Block comments become a single space so that
/// adjacent tokens never fuse; line comments vanish up to (not including)
/// the newline. Backslash-newline splices inside line comments are honored.
pub fn strip_comments(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut state = ScanState::Code;
    let mut raw_terminator: Vec<char> = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match state {
            ScanState::Code => match c {
                '/' if next == Some('/') => {
                    state = ScanState::LineComment;
                    i += 2;
                    continue;
                }
                '/' if next == Some('*') => {
                    state = ScanState::BlockComment;
                    i += 2;
                    continue;
                }
                '"' => {
                    if ends_with_raw_prefix(&out) {
                        // R"delim( ... )delim"
                        let mut delim = Vec::new();
                        let mut j = i + 1;
                        while j < chars.len() && chars[j] != '(' {
                            delim.push(chars[j]);
                            j += 1;
                        }
                        raw_terminator = std::iter::once(')')
                            .chain(delim.iter().copied())
                            .chain(std::iter::once('"'))
                            .collect();
                        state = ScanState::RawStr;
                    } else {
                        state = ScanState::Str;
                    }
                    out.push(c);
                    i += 1;
                }
                '\'' => {
                    state = ScanState::Char;
                    out.push(c);
                    i += 1;
                }
                _ => {
                    out.push(c);
                    i += 1;
                }
            },
            ScanState::LineComment => {
                if c == '\\' && (next == Some('\n') || (next == Some('\r') && chars.get(i + 2) == Some(&'\n'))) {
                    // spliced line: the comment continues
                    i += if next == Some('\n') { 2 } else { 3 };
                } else if c == '\n' {
                    state = ScanState::Code;
                    out.push('\n');
                    i += 1;
                } else {
                    i += 1;
                }
            }
            ScanState::BlockComment => {
                if c == '*' && next == Some('/') {
                    state = ScanState::Code;
                    out.push(' ');
                    i += 2;
                } else {
                    i += 1;
                }
            }
            ScanState::Str => {
                out.push(c);
                if c == '\\' {
                    if let Some(n) = next {
                        out.push(n);
                        i += 2;
                        continue;
                    }
                } else if c == '"' {
                    state = ScanState::Code;
                }
                i += 1;
            }
            ScanState::Char => {
                out.push(c);
                if c == '\\' {
                    if let Some(n) = next {
                        out.push(n);
                        i += 2;
                        continue;
                    }
                } else if c == '\'' {
                    state = ScanState::Code;
                }
                i += 1;
            }
            ScanState::RawStr => {
                out.push(c);
                if c == ')' && matches_at(&chars, i, &raw_terminator) {
                    for k in 1..raw_terminator.len() {
                        out.push(chars[i + k]);
                    }
                    i += raw_terminator.len();
                    state = ScanState::Code;
                } else {
                    i += 1;
                }
            }
        }
    }
    if state == ScanState::BlockComment {
        out.push(' ');
    }
    out
}

/// True when the emitted text ends in a raw-string prefix (`R`, `u8R`, `uR`,
/// `UR`, `LR`) that is not the tail of a longer identifier.
fn ends_with_raw_prefix(out: &str) -> bool {
    for prefix in ["u8R", "uR", "UR", "LR", "R"] {
        if let Some(rest) = out.strip_suffix(prefix) {
            let before = rest.chars().last();
            return !matches!(before, Some(c) if c.is_alphanumeric() || c == '_');
        }
    }
    false
}

fn matches_at(chars: &[char], at: usize, pattern: &[char]) -> bool {
    chars.len() >= at + pattern.len() && &chars[at..at + pattern.len()] == pattern
}

/// Trim trailing whitespace from every line.
pub fn trim_line_ends(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(line.trim_end());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;
    use proptest::prelude::*;
    use std::path::PathBuf;

    fn unit(text: &str) -> SourceUnit {
        SourceUnit {
            id: "u".into(),
            path: PathBuf::from("u.c"),
            language: Language::C,
            text: text.into(),
            token_estimate: estimate_tokens(text),
            suite: "gemm".into(),
        }
    }

    #[test]
    fn estimate_basics() {
        assert_eq!(estimate_tokens(""), 0);
        assert_eq!(estimate_tokens("a"), 1);
        assert_eq!(estimate_tokens(&"x".repeat(4000)), 1000);
    }

    #[test]
    fn unit_within_budget_is_unchanged() {
        let u = unit("int main() { return 0; }\n");
        let r = reduce_tokens(&u, 1000);
        assert_eq!(r.unit, u);
        assert!(!r.over_budget);
    }

    #[test]
    fn blank_line_runs_collapse() {
        let text = format!("int a;\n\n\n\n\n\nint b;\n{}", "// pad\n".repeat(10));
        let u = unit(&text);
        let r = reduce_tokens(&u, 1);
        assert!(r.unit.text.contains("int a;\n\nint b;"));
        assert!(r.unit.token_estimate < u.token_estimate);
    }

    #[test]
    fn comments_stripped_only_when_needed() {
        let code = "int f(void);\n// one\n// two\nint g(void);\n";
        let u = unit(code);
        // generous budget reached by whitespace alone: comments survive
        let r = reduce_tokens(&u, estimate_tokens(code));
        assert!(!r.over_budget);
        assert!(r.unit.text.contains("// one"));
        // tight budget forces comment stripping
        let r = reduce_tokens(&u, 7);
        assert!(!r.unit.text.contains("one"));
        assert!(r.unit.text.contains("int f(void);"));
        assert!(r.unit.text.contains("int g(void);"));
    }

    #[test]
    fn over_budget_is_flagged_not_fatal() {
        let u = unit(&"int aaaaaaaaaaaaaaaa;\n".repeat(50));
        let r = reduce_tokens(&u, 2);
        assert!(r.over_budget);
        assert!(r.unit.token_estimate <= u.token_estimate);
    }

    #[test]
    fn strings_survive_comment_stripping() {
        let code = "const char *a = \"// not a comment\";\nconst char *b = \"/* neither */\";\nchar c = '\\'';\n// real\n";
        let stripped = strip_comments(code);
        assert!(stripped.contains("\"// not a comment\""));
        assert!(stripped.contains("\"/* neither */\""));
        assert!(!stripped.contains("real"));
    }

    #[test]
    fn block_comment_becomes_separating_space() {
        assert_eq!(strip_comments("a/*x*/b"), "a b");
        assert_eq!(strip_comments("int/**/x;"), "int x;");
    }

    #[test]
    fn spliced_line_comment_is_fully_removed() {
        let code = "int a; // comment \\\nstill comment\nint b;\n";
        let stripped = strip_comments(code);
        assert!(!stripped.contains("still comment"));
        assert!(stripped.contains("int b;"));
    }

    #[test]
    fn raw_string_is_preserved() {
        let code = "auto s = R\"(// kept /* kept)\";\n/* gone */\n";
        let stripped = strip_comments(code);
        assert!(stripped.contains("R\"(// kept /* kept)\""));
        assert!(!stripped.contains("gone"));
    }

    #[test]
    fn leading_spaces_become_tabs() {
        assert_eq!(leading_spaces_to_tabs("        x"), "\t\tx");
        assert_eq!(leading_spaces_to_tabs("      x"), "\t  x");
        assert_eq!(leading_spaces_to_tabs("a    b"), "a    b");
    }

    fn reduced_text(text: &str, budget: usize) -> String {
        reduce_tokens(&unit(text), budget).unit.text
    }

    proptest! {
        #[test]
        fn estimate_is_monotone(a in "\\PC*", b in "\\PC*") {
            let combined = format!("{a}{b}");
            prop_assert!(estimate_tokens(&combined) >= estimate_tokens(&a));
        }

        #[test]
        fn reduce_is_idempotent(text in "[ a-z/*\\n]{0,120}", budget in 1usize..40) {
            let once = reduced_text(&text, budget);
            let twice = reduce_tokens(&unit(&once), budget).unit.text;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn reduce_never_grows(text in "\\PC*\\n?", budget in 1usize..64) {
            let u = unit(&text);
            if u.token_estimate == 0 { return Ok(()); }
            let r = reduce_tokens(&u, budget);
            prop_assert!(r.unit.token_estimate <= u.token_estimate);
            prop_assert_eq!(r.unit.token_estimate, estimate_tokens(&r.unit.text));
        }

        #[test]
        fn reduce_keeps_code_characters(
            lines in proptest::collection::vec("[a-z;{}()=+]{0,8}", 0..12),
            budget in 1usize..20,
        ) {
            // comment-free, string-free input: only whitespace may change
            let text = lines.join("\n");
            let u = unit(&text);
            if u.token_estimate == 0 { return Ok(()); }
            let r = reduce_tokens(&u, budget);
            let squeeze = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
            prop_assert_eq!(squeeze(&text), squeeze(&r.unit.text));
        }
    }
}
