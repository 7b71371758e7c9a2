//! Prompt rendering for the two detection strategies.
//!
//! Templates live as checked-in resource files under `resources/prompts/`
//! with two placeholders: `*algorithm*` (the algorithm display name) and
//! `*code*` (the source text, embedded verbatim inside a backtick fence).
//! Golden tests diff rendered output against those files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Direct question template (single-turn strategy).
pub const DIRECT_TEMPLATE: &str = include_str!("../resources/prompts/direct.txt");
/// Explanation request template (first turn of the two-stage strategy).
pub const EXPLAIN_TEMPLATE: &str = include_str!("../resources/prompts/explain.txt");
/// Classification question template (second turn of the two-stage strategy).
pub const FOLLOWUP_TEMPLATE: &str = include_str!("../resources/prompts/followup.txt");

/// One of the three acceleratable kernels the detector can ask about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gemm,
    Conv,
    Fft,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Gemm, Algorithm::Conv, Algorithm::Fft];

    /// Short lowercase name used in manifests, flags and file names.
    pub fn key(&self) -> &'static str {
        match self {
            Algorithm::Gemm => "gemm",
            Algorithm::Conv => "conv",
            Algorithm::Fft => "fft",
        }
    }

    /// Uppercase name used in report tables.
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Gemm => "GEMM",
            Algorithm::Conv => "CONV",
            Algorithm::Fft => "FFT",
        }
    }

    pub fn from_key(key: &str) -> Option<Algorithm> {
        match key.to_ascii_lowercase().as_str() {
            "gemm" => Some(Algorithm::Gemm),
            "conv" | "convolution" => Some(Algorithm::Conv),
            "fft" => Some(Algorithm::Fft),
            _ => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An algorithm together with the exact display name substituted into the
/// prompt templates.
///
/// The display names are fixed; constructing a query through
/// [`AlgorithmQuery::new`] is the only way to obtain one, so the pairing
/// cannot drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlgorithmQuery {
    algorithm: Algorithm,
    display_name: &'static str,
}

impl AlgorithmQuery {
    pub fn new(algorithm: Algorithm) -> Self {
        let display_name = match algorithm {
            Algorithm::Gemm => "matrix multiplication (GEMM)",
            Algorithm::Conv => "convolution",
            Algorithm::Fft => "fast Fourier transform (FFT)",
        };
        Self {
            algorithm,
            display_name,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn display_name(&self) -> &'static str {
        self.display_name
    }
}

/// Chat role of a transcript message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

/// One role-tagged message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// Ordered messages sent to the model in one request.
///
/// Invariants: content is never empty, and roles alternate user/assistant
/// after any leading system message. Both are enforced by the push methods.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChatTranscript {
    messages: Vec<Message>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("message content must not be empty")]
    EmptyContent,
    #[error("expected {expected} role at position {position}")]
    RoleOrder {
        expected: &'static str,
        position: usize,
    },
    #[error("prior transcript is not a single-turn explanation request")]
    NotAnExplainTranscript,
}

impl ChatTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build a transcript holding a single user message.
    pub fn from_user(content: impl Into<String>) -> Self {
        let mut t = Self::new();
        t.push(Role::User, content)
            .expect("single user message is always a valid transcript");
        t
    }

    pub fn push(&mut self, role: Role, content: impl Into<String>) -> Result<(), PromptError> {
        let content = content.into();
        if content.is_empty() {
            return Err(PromptError::EmptyContent);
        }
        let expected = self.next_role();
        if role != Role::System && role != expected {
            return Err(PromptError::RoleOrder {
                expected: expected.as_str(),
                position: self.messages.len(),
            });
        }
        if role == Role::System && !self.messages.is_empty() {
            return Err(PromptError::RoleOrder {
                expected: expected.as_str(),
                position: self.messages.len(),
            });
        }
        self.messages.push(Message { role, content });
        Ok(())
    }

    fn next_role(&self) -> Role {
        match self.messages.last() {
            None | Some(Message {
                role: Role::System, ..
            }) => Role::User,
            Some(Message {
                role: Role::User, ..
            }) => Role::Assistant,
            Some(Message {
                role: Role::Assistant,
                ..
            }) => Role::User,
        }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Concatenated message contents, used for token estimation.
    pub fn combined_text(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&m.content);
            out.push('\n');
        }
        out
    }
}

/// Backtick fence for embedding `code` verbatim.
///
/// Three backticks normally; one more than the longest backtick run in the
/// code when the code itself contains a triple-backtick sequence, so the
/// code never has to be altered.
fn fence_for(code: &str) -> String {
    let mut longest = 0usize;
    let mut current = 0usize;
    for c in code.chars() {
        if c == '`' {
            current += 1;
            longest = longest.max(current);
        } else {
            current = 0;
        }
    }
    "`".repeat(if longest >= 3 { longest + 1 } else { 3 })
}

/// Substitute the template placeholders.
///
/// Templates carry a literal three-backtick fence around `*code*`; when the
/// code collides with it the whole fenced block is rewritten with a longer
/// fence. A single trailing newline from the resource file is dropped so the
/// message ends at the closing fence.
fn render_template(template: &str, display_name: Option<&str>, code: Option<&str>) -> String {
    let mut text = template.strip_suffix('\n').unwrap_or(template).to_string();
    if let Some(name) = display_name {
        text = text.replace("*algorithm*", name);
    }
    if let Some(code) = code {
        let fence = fence_for(code);
        let fenced = format!("{fence}\n{code}\n{fence}");
        text = text.replace("```\n*code*\n```", &fenced);
    }
    text
}

/// Render the single-turn direct question for `query` over `code`.
pub fn render_direct(query: &AlgorithmQuery, code: &str) -> ChatTranscript {
    debug_assert!(!code.is_empty(), "render_direct requires non-empty code");
    ChatTranscript::from_user(render_template(
        DIRECT_TEMPLATE,
        Some(query.display_name()),
        Some(code),
    ))
}

/// Render the first turn of the two-stage strategy: ask for an explanation.
pub fn render_explain(code: &str) -> ChatTranscript {
    debug_assert!(!code.is_empty(), "render_explain requires non-empty code");
    ChatTranscript::from_user(render_template(EXPLAIN_TEMPLATE, None, Some(code)))
}

/// Extend an explanation transcript with the model's explanation and the
/// classification question, producing the second-turn transcript.
pub fn render_followup(
    query: &AlgorithmQuery,
    prior: &ChatTranscript,
    explanation: &str,
) -> Result<ChatTranscript, PromptError> {
    if explanation.is_empty() {
        return Err(PromptError::EmptyContent);
    }
    let is_explain = prior.len() == 1
        && prior.messages()[0].role == Role::User
        && prior.messages()[0]
            .content
            .starts_with("Can you explain what the following code does?");
    if !is_explain {
        return Err(PromptError::NotAnExplainTranscript);
    }
    let mut extended = prior.clone();
    extended.push(Role::Assistant, explanation)?;
    extended.push(
        Role::User,
        render_template(FOLLOWUP_TEMPLATE, Some(query.display_name()), None),
    )?;
    Ok(extended)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_substitutes_each_display_name() {
        let code = "int main(){}";
        for (alg, name) in [
            (Algorithm::Gemm, "matrix multiplication (GEMM)"),
            (Algorithm::Conv, "convolution"),
            (Algorithm::Fft, "fast Fourier transform (FFT)"),
        ] {
            let t = render_direct(&AlgorithmQuery::new(alg), code);
            assert_eq!(t.len(), 1);
            let text = &t.messages()[0].content;
            assert!(text.contains(&format!("performing a {name}.")));
            assert!(text.contains("Code:```\nint main(){}\n```"));
        }
    }

    #[test]
    fn direct_is_deterministic() {
        let q = AlgorithmQuery::new(Algorithm::Gemm);
        assert_eq!(render_direct(&q, "x"), render_direct(&q, "x"));
    }

    #[test]
    fn rendered_queries_differ_only_in_display_name() {
        let code = "void f(){}";
        let gemm = render_direct(&AlgorithmQuery::new(Algorithm::Gemm), code).messages()[0]
            .content
            .clone();
        let fft = render_direct(&AlgorithmQuery::new(Algorithm::Fft), code).messages()[0]
            .content
            .clone();
        assert_eq!(
            gemm.replace("matrix multiplication (GEMM)", "fast Fourier transform (FFT)"),
            fft
        );
    }

    #[test]
    fn explain_starts_with_question() {
        let t = render_explain("void f(){}");
        assert!(t.messages()[0]
            .content
            .starts_with("Can you explain what the following code does?"));
    }

    #[test]
    fn fence_lengthens_on_collision() {
        let code = "const char *s = \"```\";";
        let t = render_explain(code);
        let text = &t.messages()[0].content;
        assert!(text.contains("Code:````\n"));
        assert!(text.contains(code));
        assert!(text.ends_with("\n````"));
    }

    #[test]
    fn followup_extends_prior_by_two() {
        let q = AlgorithmQuery::new(Algorithm::Conv);
        let prior = render_explain("void f(){}");
        let t = render_followup(&q, &prior, "This code computes nothing.").unwrap();
        assert_eq!(t.len(), prior.len() + 2);
        assert_eq!(&t.messages()[..1], prior.messages());
        assert_eq!(t.messages()[1].role, Role::Assistant);
        let last = &t.messages()[2];
        assert_eq!(last.role, Role::User);
        assert!(last.content.contains("performing a convolution?"));
        assert!(last.content.contains("Desired format:"));
        assert!(last.content.contains("Yes: {function name} (if there is a function)."));
        assert!(last.content.contains("No (if there is no function)"));
    }

    #[test]
    fn followup_rejects_empty_explanation() {
        let q = AlgorithmQuery::new(Algorithm::Gemm);
        let prior = render_explain("void f(){}");
        assert_eq!(
            render_followup(&q, &prior, ""),
            Err(PromptError::EmptyContent)
        );
    }

    #[test]
    fn followup_rejects_non_explain_prior() {
        let q = AlgorithmQuery::new(Algorithm::Gemm);
        let prior = render_direct(&q, "void f(){}");
        assert_eq!(
            render_followup(&q, &prior, "text"),
            Err(PromptError::NotAnExplainTranscript)
        );
    }

    #[test]
    fn direct_and_followup_share_desired_format_block() {
        let q = AlgorithmQuery::new(Algorithm::Fft);
        let direct = render_direct(&q, "void f(){}").messages()[0].content.clone();
        let prior = render_explain("void f(){}");
        let followup = render_followup(&q, &prior, "e").unwrap().messages()[2]
            .content
            .clone();
        let block = "Desired format:\nYes: {function name} (if there is a function).\nNo (if there is no function)";
        assert!(direct.contains(block));
        assert!(followup.contains(block));
    }

    #[test]
    fn transcript_enforces_alternation_and_nonempty() {
        let mut t = ChatTranscript::new();
        assert_eq!(t.push(Role::User, ""), Err(PromptError::EmptyContent));
        t.push(Role::User, "hi").unwrap();
        assert!(matches!(
            t.push(Role::User, "again"),
            Err(PromptError::RoleOrder { .. })
        ));
        t.push(Role::Assistant, "ok").unwrap();
        assert!(matches!(
            t.push(Role::System, "late"),
            Err(PromptError::RoleOrder { .. })
        ));
    }
}
