//! Evaluation metrics: lexical text similarity, embedding cosine, binary
//! and multi-class classification quality, and mean/std aggregation.

pub mod aggregate;
pub mod classify;
pub mod lexical;
pub mod stem;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate_scores, mean_std, AggregateRow, MeanStd, METRIC_ROW_LABELS};
pub use classify::{binary_prf, class_report, ClassReport, ClassStats, PrfTriple};
pub use lexical::{bleu4_smooth, meteor, rouge_l, tokenize};
pub use stem::porter_stem;

use crate::scalar::Scalar;
use crate::vecmath::cosine;

/// Embedding cosine similarity clamped to [0, 100]. Negative cosine means
/// "no similarity" here, not anti-similarity.
pub fn semantic_cosine<S: Scalar>(a: &[S], b: &[S]) -> S {
    cosine(a, b).max(S::zero()) * S::from_count(100)
}

/// Scores for one (candidate, reference) text pair, each on 0..=100.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextScore<S> {
    pub bleu4: S,
    pub rouge_l_f: S,
    pub meteor: S,
    pub semantic_cosine: S,
}

/// Semantic similarity of two texts under an embedding function.
pub fn semantic_cosine_text<S, E>(
    mut embed: E,
    candidate: &str,
    reference: &str,
) -> crate::Result<S>
where
    S: Scalar,
    E: FnMut(&str) -> crate::Result<Vec<S>>,
{
    let a = embed(candidate)?;
    let b = embed(reference)?;
    Ok(semantic_cosine(&a, &b))
}

/// Scores a pair given its texts and precomputed embedding vectors.
pub fn score_text<S: Scalar>(
    candidate: &str,
    reference: &str,
    candidate_vec: &[S],
    reference_vec: &[S],
) -> TextScore<S> {
    TextScore {
        bleu4: bleu4_smooth(candidate, reference),
        rouge_l_f: rouge_l(candidate, reference),
        meteor: meteor(candidate, reference),
        semantic_cosine: semantic_cosine(candidate_vec, reference_vec),
    }
}
