//! Mean and spread used for the per-strategy metric tables.

use serde::{Deserialize, Serialize};

use crate::metrics::TextScore;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd<S> {
    pub mean: S,
    pub std: S,
}

/// Report row labels, in table order. METEOR carries its variant (the
/// synonym stage is intentionally absent) and the semantic column names its
/// actual measure so nobody reads it as a published-model score.
pub const METRIC_ROW_LABELS: [&str; 4] =
    ["BLEU", "METEOR (exact+stem)", "ROUGE", "Semantic (cosine)"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow<S> {
    pub metric: String,
    pub mean: S,
    pub std: S,
}

/// Four rows in [`METRIC_ROW_LABELS`] order. Errors on empty input: a table
/// of NaNs helps nobody.
pub fn aggregate_scores<S: Scalar>(
    scores: &[TextScore<S>],
) -> Result<Vec<AggregateRow<S>>, crate::XlcError> {
    if scores.is_empty() {
        return Err(crate::XlcError::Metrics("no scores to aggregate".into()));
    }
    let columns: [(&str, Vec<S>); 4] = [
        (METRIC_ROW_LABELS[0], scores.iter().map(|s| s.bleu4).collect()),
        (METRIC_ROW_LABELS[1], scores.iter().map(|s| s.meteor).collect()),
        (METRIC_ROW_LABELS[2], scores.iter().map(|s| s.rouge_l_f).collect()),
        (METRIC_ROW_LABELS[3], scores.iter().map(|s| s.semantic_cosine).collect()),
    ];
    Ok(columns
        .into_iter()
        .map(|(label, values)| {
            let ms = mean_std(&values).expect("nonempty by guard above");
            AggregateRow { metric: label.to_string(), mean: ms.mean, std: ms.std }
        })
        .collect())
}

/// Mean and population standard deviation. None on empty input.
pub fn mean_std<S: Scalar>(xs: &[S]) -> Option<MeanStd<S>> {
    if xs.is_empty() {
        return None;
    }
    let n = S::from_count(xs.len());
    let mean = xs.iter().copied().sum::<S>() / n;
    let var = xs
        .iter()
        .map(|x| {
            let d = *x - mean;
            d * d
        })
        .sum::<S>()
        / n;
    Some(MeanStd {
        mean,
        std: var.sqrt(),
    })
}
