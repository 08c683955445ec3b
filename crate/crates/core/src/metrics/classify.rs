//! Classification quality: binary precision/recall/F1 and the per-class
//! report used for monitor categorization. Values are fractions in [0, 1].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfTriple<S> {
    pub precision: S,
    pub recall: S,
    pub f1: S,
}

impl<S: Scalar> PrfTriple<S> {
    fn zero() -> Self {
        PrfTriple {
            precision: S::zero(),
            recall: S::zero(),
            f1: S::zero(),
        }
    }
}

/// Zero-division convention used throughout: a ratio with a zero denominator
/// is 0, and the F1 of (0, 0) is 0.
fn ratio<S: Scalar>(num: usize, den: usize) -> S {
    if den == 0 {
        S::zero()
    } else {
        S::from_count(num) / S::from_count(den)
    }
}

fn f1_of<S: Scalar>(p: S, r: S) -> S {
    if p + r <= S::zero() {
        S::zero()
    } else {
        S::from_count(2) * p * r / (p + r)
    }
}

/// Binary P/R/F1 with `true` as the positive class. A `None` prediction
/// (unparseable response) counts as a negative prediction.
pub fn binary_prf<S: Scalar>(pairs: &[(Option<bool>, bool)]) -> PrfTriple<S> {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (pred, truth) in pairs {
        let pred = pred.unwrap_or(false);
        match (pred, truth) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    PrfTriple {
        precision,
        recall,
        f1: f1_of(precision, recall),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassStats<S> {
    pub precision: S,
    pub recall: S,
    pub f1: S,
    /// Per-class accuracy is defined as per-class recall.
    pub class_accuracy: S,
    /// Number of records whose truth label is this class.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport<S> {
    pub per_class: BTreeMap<String, ClassStats<S>>,
    pub overall_accuracy: S,
    pub macro_avg: PrfTriple<S>,
    pub micro_avg: PrfTriple<S>,
    pub weighted_avg: PrfTriple<S>,
    pub parse_failures: usize,
    pub total: usize,
}

/// Single-label classification report over (prediction, truth) pairs.
///
/// A `None` prediction is a parse failure: it is wrong for its truth class
/// and appears in no predicted-class tally. Macro averages cover only
/// classes with at least one truth record; weighted averages use truth
/// support. Micro precision, recall, and F1 all equal overall accuracy for
/// single-label data, parse failures included.
pub fn class_report<S: Scalar>(pairs: &[(Option<String>, String)]) -> ClassReport<S> {
    let mut support: BTreeMap<&str, usize> = BTreeMap::new();
    let mut predicted: BTreeMap<&str, usize> = BTreeMap::new();
    let mut correct_by_class: BTreeMap<&str, usize> = BTreeMap::new();
    let mut correct = 0usize;
    let mut parse_failures = 0usize;
    for (pred, truth) in pairs {
        *support.entry(truth.as_str()).or_insert(0) += 1;
        match pred {
            None => parse_failures += 1,
            Some(label) => {
                *predicted.entry(label.as_str()).or_insert(0) += 1;
                if label == truth {
                    correct += 1;
                    *correct_by_class.entry(truth.as_str()).or_insert(0) += 1;
                }
            }
        }
    }

    let mut universe: BTreeMap<&str, ()> = BTreeMap::new();
    universe.extend(support.keys().map(|k| (*k, ())));
    universe.extend(predicted.keys().map(|k| (*k, ())));

    let mut per_class = BTreeMap::new();
    let mut macro_sum = PrfTriple::<S>::zero();
    let mut macro_classes = 0usize;
    let mut weighted_sum = PrfTriple::<S>::zero();
    for class in universe.keys() {
        let tp = correct_by_class.get(class).copied().unwrap_or(0);
        let sup = support.get(class).copied().unwrap_or(0);
        let pred_count = predicted.get(class).copied().unwrap_or(0);
        let precision = ratio(tp, pred_count);
        let recall = ratio(tp, sup);
        let f1 = f1_of(precision, recall);
        per_class.insert(
            (*class).to_string(),
            ClassStats {
                precision,
                recall,
                f1,
                class_accuracy: recall,
                support: sup,
            },
        );
        if sup > 0 {
            macro_classes += 1;
            macro_sum.precision += precision;
            macro_sum.recall += recall;
            macro_sum.f1 += f1;
            let w = S::from_count(sup);
            weighted_sum.precision += w * precision;
            weighted_sum.recall += w * recall;
            weighted_sum.f1 += w * f1;
        }
    }

    let total = pairs.len();
    let overall_accuracy = ratio(correct, total);
    let macro_avg = if macro_classes == 0 {
        PrfTriple::zero()
    } else {
        let n = S::from_count(macro_classes);
        PrfTriple {
            precision: macro_sum.precision / n,
            recall: macro_sum.recall / n,
            f1: macro_sum.f1 / n,
        }
    };
    let weighted_avg = if total == 0 {
        PrfTriple::zero()
    } else {
        let n = S::from_count(total);
        PrfTriple {
            precision: weighted_sum.precision / n,
            recall: weighted_sum.recall / n,
            f1: weighted_sum.f1 / n,
        }
    };
    let micro_avg = PrfTriple {
        precision: overall_accuracy,
        recall: overall_accuracy,
        f1: overall_accuracy,
    };

    ClassReport {
        per_class,
        overall_accuracy,
        macro_avg,
        micro_avg,
        weighted_avg,
        parse_failures,
        total,
    }
}
