//! Core library for `xlc`: incident corpora, text sanitation, LLM gateway,
//! nearest-neighbor retrieval, prompt construction, run pipelines, evaluation
//! metrics, and a synthetic corpus generator with planted ground truth.
//!
//! Numeric code (embeddings, similarity, lexical metrics) is generic over the
//! scalar type via [`scalar::Scalar`]; everything above it uses the concrete
//! aliases below.

pub mod corpus;
pub mod gateway;
pub mod hash;
pub mod metrics;
pub mod pipelines;
pub mod prompt;
pub mod report;
pub mod retrieval;
pub mod sanitize;
pub mod scalar;
pub mod synth;
pub mod vecmath;

mod error;

pub use error::XlcError;

/// Working scalar for every pipeline surface. Acceptance tolerances are 1e-9,
/// so the default is f64; the generic layers also admit f32.
pub type Score = f64;

/// Incident index at the working scalar.
pub type Index = retrieval::VectorIndex<Score>;

/// Crate-wide result alias.
pub type Result<T, E = XlcError> = std::result::Result<T, E>;
