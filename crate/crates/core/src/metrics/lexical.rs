//! Reference-based text similarity: smoothed BLEU-4, ROUGE-L F1, and METEOR
//! with exact plus stemmed matching. All scores are on a 0..=100 scale.

use std::collections::HashMap;
use std::hash::Hash;

use crate::metrics::stem::porter_stem;
use crate::scalar::Scalar;

/// Lowercased alphanumeric runs; punctuation and symbols separate tokens and
/// are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU-4 with add-one smoothing on n >= 2 orders whose raw match count is
/// zero. Unigram precision is never smoothed, so candidates sharing no
/// unigram with the reference score exactly zero.
pub fn bleu4_smooth<S: Scalar>(candidate: &str, reference: &str) -> S {
    bleu4_smooth_tokens(&tokenize(candidate), &tokenize(reference))
}

pub fn bleu4_smooth_tokens<S: Scalar, T: Eq + Hash>(cand: &[T], refr: &[T]) -> S {
    if cand.is_empty() || refr.is_empty() {
        return S::zero();
    }
    let mut log_sum = S::zero();
    for n in 1..=4 {
        let cand_grams = ngram_counts(cand, n);
        let ref_grams = ngram_counts(refr, n);
        let total = cand.len().saturating_sub(n - 1);
        let matched: usize = cand_grams
            .iter()
            .map(|(gram, count)| (*count).min(ref_grams.get(gram).copied().unwrap_or(0)))
            .sum();
        let precision = if matched == 0 && n >= 2 {
            S::one() / S::from_count(total + 1)
        } else {
            S::from_count(matched) / S::from_count(total)
        };
        if precision <= S::zero() {
            return S::zero();
        }
        log_sum += precision.ln();
    }
    let geo = (log_sum / S::from_count(4)).exp();
    let brevity = if cand.len() < refr.len() {
        (S::one() - S::from_count(refr.len()) / S::from_count(cand.len())).exp()
    } else {
        S::one()
    };
    S::from_count(100) * brevity * geo
}

/// ROUGE-L F1: longest common subsequence of the token sequences.
pub fn rouge_l<S: Scalar>(candidate: &str, reference: &str) -> S {
    rouge_l_tokens(&tokenize(candidate), &tokenize(reference))
}

pub fn rouge_l_tokens<S: Scalar, T: PartialEq>(cand: &[T], refr: &[T]) -> S {
    if cand.is_empty() || refr.is_empty() {
        return S::zero();
    }
    let n = refr.len();
    let mut row = vec![0usize; n + 1];
    for c in cand {
        let mut prev_diag = 0;
        for j in 1..=n {
            let saved = row[j];
            row[j] = if *c == refr[j - 1] {
                prev_diag + 1
            } else {
                row[j].max(row[j - 1])
            };
            prev_diag = saved;
        }
    }
    let lcs = row[n];
    if lcs == 0 {
        return S::zero();
    }
    let p = S::from_count(lcs) / S::from_count(cand.len());
    let r = S::from_count(lcs) / S::from_count(refr.len());
    S::from_count(100) * (S::from_count(2) * p * r) / (p + r)
}

/// METEOR: greedy one-to-one alignment, exact matches first and Porter-stem
/// matches on the remainder, harmonic mean weighted 9:1 toward recall, and a
/// cubic fragmentation penalty capped at 0.5.
pub fn meteor<S: Scalar>(candidate: &str, reference: &str) -> S {
    meteor_tokens(&tokenize(candidate), &tokenize(reference))
}

pub fn meteor_tokens<S: Scalar, T: AsRef<str>>(cand: &[T], refr: &[T]) -> S {
    if cand.is_empty() || refr.is_empty() {
        return S::zero();
    }
    let mut ref_used = vec![false; refr.len()];
    let mut cand_match: Vec<Option<usize>> = vec![None; cand.len()];
    for (i, tok) in cand.iter().enumerate() {
        for (j, rtok) in refr.iter().enumerate() {
            if !ref_used[j] && rtok.as_ref() == tok.as_ref() {
                ref_used[j] = true;
                cand_match[i] = Some(j);
                break;
            }
        }
    }
    let cand_stems: Vec<String> = cand.iter().map(|t| porter_stem(t.as_ref())).collect();
    let ref_stems: Vec<String> = refr.iter().map(|t| porter_stem(t.as_ref())).collect();
    for (i, stem) in cand_stems.iter().enumerate() {
        if cand_match[i].is_some() {
            continue;
        }
        for (j, rstem) in ref_stems.iter().enumerate() {
            if !ref_used[j] && rstem == stem {
                ref_used[j] = true;
                cand_match[i] = Some(j);
                break;
            }
        }
    }
    let pairs: Vec<(usize, usize)> = cand_match
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|j| (i, j)))
        .collect();
    let matches = pairs.len();
    if matches == 0 {
        return S::zero();
    }
    // Pairs are already in candidate order; a chunk extends while both sides
    // advance by exactly one.
    let mut chunks = 1usize;
    for w in pairs.windows(2) {
        if !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1) {
            chunks += 1;
        }
    }
    let p = S::from_count(matches) / S::from_count(cand.len());
    let r = S::from_count(matches) / S::from_count(refr.len());
    let alpha = S::from_f64_lit(0.9);
    let fmean = p * r / (alpha * p + (S::one() - alpha) * r);
    let frag = S::from_count(chunks) / S::from_count(matches);
    let penalty = S::from_f64_lit(0.5) * frag.powi(3);
    S::from_count(100) * fmean * (S::one() - penalty)
}
