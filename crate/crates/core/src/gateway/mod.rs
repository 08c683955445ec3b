//! Chat-completion and embedding providers behind one trait, plus the two
//! summarization steps that prepare corpus text for retrieval and prompts.
//!
//! Three provider kinds: a remote OpenAI-compatible HTTP client, an offline
//! replay provider that serves recorded fixtures, and a deterministic rule
//! stub that makes end-to-end runs testable without any model.

mod embedder;
mod providers;
mod summarize;

pub use embedder::HashEmbedder;
pub use providers::{RecordingProvider, RemoteHttpProvider, ReplayProvider, RuleStubProvider};
pub use summarize::{
    render_incident_summary_prompt, render_service_summary_prompt, summarize_incident_fields,
    summarize_service_descriptions, SummaryBundle, INCIDENT_SUMMARY_ROLE_LINE,
    SERVICE_SUMMARY_ROLE_LINE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::content_hash;

pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 1024;

/// Default cap on estimated prompt tokens. Generous; tighten per provider
/// with the budget builder when a deployment has a smaller context window.
pub const DEFAULT_PROMPT_BUDGET: usize = 128_000;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("cannot embed text with no tokens")]
    EmptyEmbedText,
    #[error("provider returned status {status}")]
    Provider { status: u16 },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("no recorded fixture for prompt hash {prompt_hash:016x}")]
    FixtureMiss { prompt_hash: u64 },
    #[error("prompt estimated at {estimated} tokens exceeds the {budget}-token budget")]
    PromptTooLarge { estimated: usize, budget: usize },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    RemoteHttp,
    ReplayFixture,
    RuleStub,
}

impl std::fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProviderKind::RemoteHttp => write!(f, "remote_http"),
            ProviderKind::ReplayFixture => write!(f, "replay_fixture"),
            ProviderKind::RuleStub => write!(f, "rule_stub"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl CompletionRequest {
    /// Temperature 0 everywhere: runs must be as deterministic as the
    /// provider allows.
    pub fn new(model: impl Into<String>, prompt: impl Into<String>) -> Self {
        CompletionRequest {
            model: model.into(),
            prompt: prompt.into(),
            temperature: 0.0,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.prompt.trim().is_empty() {
            return Err(GatewayError::InvalidRequest("prompt is empty".into()));
        }
        if !(self.temperature >= 0.0) {
            return Err(GatewayError::InvalidRequest(format!(
                "temperature {} is not a nonnegative number",
                self.temperature
            )));
        }
        if self.max_output_tokens == 0 {
            return Err(GatewayError::InvalidRequest("max_output_tokens is zero".into()));
        }
        Ok(())
    }
}

pub trait ChatProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<String, GatewayError>;
    fn kind(&self) -> ProviderKind;
}

impl<P: ChatProvider + ?Sized> ChatProvider for &P {
    fn complete(&self, request: &CompletionRequest) -> Result<String, GatewayError> {
        (**self).complete(request)
    }
    fn kind(&self) -> ProviderKind {
        (**self).kind()
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for std::sync::Arc<P> {
    fn complete(&self, request: &CompletionRequest) -> Result<String, GatewayError> {
        (**self).complete(request)
    }
    fn kind(&self) -> ProviderKind {
        (**self).kind()
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for Box<P> {
    fn complete(&self, request: &CompletionRequest) -> Result<String, GatewayError> {
        (**self).complete(request)
    }
    fn kind(&self) -> ProviderKind {
        (**self).kind()
    }
}

/// Key under which a prompt's response is recorded and replayed. Plain
/// content hash of the prompt bytes; file name is the 16-hex-digit form.
pub fn prompt_fingerprint(prompt: &str) -> u64 {
    content_hash(prompt.as_bytes())
}

/// chars/4 heuristic. Deliberately coarse; used only for budget prechecks.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

pub(crate) fn check_budget(prompt: &str, budget: usize) -> Result<(), GatewayError> {
    let estimated = estimate_tokens(prompt);
    if estimated > budget {
        return Err(GatewayError::PromptTooLarge { estimated, budget });
    }
    Ok(())
}
