//! Detects acceleratable kernels (GEMM, convolution, FFT) in C/C++ source
//! files by prompting a chat-completion model, and benchmarks detection
//! quality against a labeled corpus with confusion-matrix reports.
//!
//! The crate is organized around a small set of subsystems:
//!
//! - [`corpus`]: manifest-described source corpus with ground-truth labels,
//!   token estimation and token-count reduction
//! - [`prompt`]: chat transcripts for the two prompting strategies
//! - [`strategy`]: the strategy trait and name-keyed registry
//! - [`client`]: chat-completions client with retry and an on-disk
//!   record/replay cache
//! - [`parser`]: normalization and classification of raw model output
//! - [`pipeline`]: per-unit detection runs and corpus fan-out
//! - [`evaluation`]: scoring, confusion matrices and report emission

pub mod cli;
pub mod client;
pub mod config;
pub mod corpus;
pub mod evaluation;
pub mod parser;
pub mod pipeline;
pub mod prompt;
pub mod strategy;

pub use corpus::tokens::{estimate_tokens, reduce_tokens};
pub use corpus::{Corpus, GroundTruth, Label, Language, SourceUnit};
pub use parser::{parse_verdict, Verdict, VerdictKind};
pub use prompt::{Algorithm, AlgorithmQuery, ChatTranscript};
