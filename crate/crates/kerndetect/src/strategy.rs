//! Prompting strategies behind a common trait, registered by name and
//! selected at runtime via CLI or config.
//!
//! Two built-ins ship: `direct` asks the classification question in a
//! single turn; `explain-then-ask` first has the model explain the code,
//! then asks the question against its own explanation, which sharply cuts
//! false positives.

use crate::client::{ChatClient, ClientError, ModelConfig, RawResponse};
use crate::corpus::tokens::estimate_tokens;
use crate::prompt::{
    render_direct, render_explain, render_followup, AlgorithmQuery, ChatTranscript, PromptError,
};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// The transcripts sent and responses received during one detection, in
/// order. The verdict is parsed from the final response.
#[derive(Debug, Clone)]
pub struct StrategyRun {
    pub transcripts: Vec<ChatTranscript>,
    pub responses: Vec<RawResponse>,
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("model returned an unusable explanation turn: {0}")]
    Prompt(#[from] PromptError),
}

/// A detection protocol: how many model turns to run and what to send in
/// each. Implementations must be deterministic given the client's answers.
pub trait DetectionStrategy: Send + Sync {
    /// Registry key, also recorded in run records (e.g. `direct`).
    fn name(&self) -> &'static str;

    /// Number of request/response pairs a run produces.
    fn turns(&self) -> usize;

    /// Estimated prompt tokens consumed by everything except the code:
    /// template text plus, for multi-turn strategies, the echoed prior
    /// output. The pipeline subtracts this from the context window to get
    /// the code budget.
    fn overhead_tokens(&self, query: &AlgorithmQuery, config: &ModelConfig) -> usize;

    /// Run the protocol over `code` for `query`.
    fn execute(
        &self,
        client: &dyn ChatClient,
        query: &AlgorithmQuery,
        code: &str,
    ) -> Result<StrategyRun, StrategyError>;
}

/// Single-turn zero-shot question.
#[derive(Debug, Default, Clone, Copy)]
pub struct DirectStrategy;

impl DetectionStrategy for DirectStrategy {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn turns(&self) -> usize {
        1
    }

    fn overhead_tokens(&self, query: &AlgorithmQuery, _config: &ModelConfig) -> usize {
        estimate_tokens(&render_direct(query, "x").combined_text())
    }

    fn execute(
        &self,
        client: &dyn ChatClient,
        query: &AlgorithmQuery,
        code: &str,
    ) -> Result<StrategyRun, StrategyError> {
        let transcript = render_direct(query, code);
        let response = client.complete(&transcript)?;
        Ok(StrategyRun {
            transcripts: vec![transcript],
            responses: vec![response],
        })
    }
}

/// Two-turn protocol: free-form explanation, then the classification
/// question with the explanation re-sent as the assistant message.
#[derive(Debug, Default, Clone, Copy)]
pub struct ExplainThenAskStrategy;

impl DetectionStrategy for ExplainThenAskStrategy {
    fn name(&self) -> &'static str {
        "explain-then-ask"
    }

    fn turns(&self) -> usize {
        2
    }

    fn overhead_tokens(&self, query: &AlgorithmQuery, config: &ModelConfig) -> usize {
        let explain = render_explain("x");
        let followup = render_followup(query, &explain, "x")
            .expect("placeholder follow-up always renders");
        // the second transcript embeds the explanation, whose length is
        // bounded by the output-token limit of the first turn
        estimate_tokens(&followup.combined_text()) + config.max_output_tokens as usize
    }

    fn execute(
        &self,
        client: &dyn ChatClient,
        query: &AlgorithmQuery,
        code: &str,
    ) -> Result<StrategyRun, StrategyError> {
        let explain = render_explain(code);
        let explanation = client.complete(&explain)?;
        let followup = render_followup(query, &explain, &explanation.text)?;
        let answer = client.complete(&followup)?;
        Ok(StrategyRun {
            transcripts: vec![explain, followup],
            responses: vec![explanation, answer],
        })
    }
}

/// Name-keyed registry of detection strategies.
#[derive(Clone, Default)]
pub struct StrategyRegistry {
    entries: BTreeMap<&'static str, Arc<dyn DetectionStrategy>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry with both built-in strategies.
    pub fn builtin() -> Self {
        let mut registry = Self::new();
        registry.register(Arc::new(DirectStrategy));
        registry.register(Arc::new(ExplainThenAskStrategy));
        registry
    }

    pub fn register(&mut self, strategy: Arc<dyn DetectionStrategy>) {
        self.entries.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn DetectionStrategy>> {
        self.entries.get(name).cloned()
    }

    /// Registered names, sorted.
    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::ScriptedClient;
    use crate::prompt::Algorithm;

    #[test]
    fn builtin_registry_has_both_strategies() {
        let registry = StrategyRegistry::builtin();
        assert_eq!(registry.names(), vec!["direct", "explain-then-ask"]);
        assert!(registry.get("direct").is_some());
        assert!(registry.get("nope").is_none());
    }

    #[test]
    fn direct_runs_one_turn() {
        let client = ScriptedClient::new(ModelConfig::default(), |_| "Yes: matmul".to_string());
        let query = AlgorithmQuery::new(Algorithm::Gemm);
        let run = DirectStrategy
            .execute(&client, &query, "void matmul(){}")
            .unwrap();
        assert_eq!(run.transcripts.len(), 1);
        assert_eq!(run.responses.len(), 1);
        assert_eq!(run.responses[0].text, "Yes: matmul");
    }

    #[test]
    fn explain_then_ask_runs_two_turns_and_reuses_the_explanation() {
        let client = ScriptedClient::new(ModelConfig::default(), |t| {
            if t.len() == 1 {
                "This code multiplies two matrices.".to_string()
            } else {
                "Yes: matmul".to_string()
            }
        });
        let query = AlgorithmQuery::new(Algorithm::Gemm);
        let run = ExplainThenAskStrategy
            .execute(&client, &query, "void matmul(){}")
            .unwrap();
        assert_eq!(run.transcripts.len(), 2);
        assert_eq!(run.responses.len(), 2);
        // prefix property: second transcript = first + assistant explanation + question
        assert_eq!(
            run.transcripts[1].messages()[..1],
            run.transcripts[0].messages()[..]
        );
        assert_eq!(
            run.transcripts[1].messages()[1].content,
            "This code multiplies two matrices."
        );
        assert_eq!(run.responses[1].text, "Yes: matmul");
    }

    #[test]
    fn empty_explanation_is_a_strategy_error() {
        let client = ScriptedClient::new(ModelConfig::default(), |t| {
            if t.len() == 1 {
                String::new()
            } else {
                "No".to_string()
            }
        });
        let query = AlgorithmQuery::new(Algorithm::Fft);
        let err = ExplainThenAskStrategy
            .execute(&client, &query, "void f(){}")
            .unwrap_err();
        assert!(matches!(err, StrategyError::Prompt(_)));
    }

    #[test]
    fn overhead_is_a_small_fraction_of_the_window() {
        let config = ModelConfig::default();
        for alg in Algorithm::ALL {
            let query = AlgorithmQuery::new(alg);
            let direct = DirectStrategy.overhead_tokens(&query, &config);
            assert!(direct > 20 && direct < 200, "direct overhead {direct}");
            let eta = ExplainThenAskStrategy.overhead_tokens(&query, &config);
            assert!(
                eta > config.max_output_tokens as usize && eta < 1000,
                "explain-then-ask overhead {eta}"
            );
        }
    }
}
