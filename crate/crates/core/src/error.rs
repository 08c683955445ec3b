use thiserror::Error;

/// Umbrella error for callers that mix subsystems (pipelines, CLI).
#[derive(Debug, Error)]
pub enum XlcError {
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Gateway(#[from] crate::gateway::GatewayError),
    #[error(transparent)]
    Prompt(#[from] crate::prompt::PromptError),
    #[error(transparent)]
    Retrieval(#[from] crate::retrieval::RetrievalError),
    #[error(transparent)]
    Pipeline(#[from] crate::pipelines::PipelineError),
    #[error("metrics: {0}")]
    Metrics(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
