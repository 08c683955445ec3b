//! Brute-force reference scorers for the lexical metrics, deliberately
//! structured unlike the library: window scans instead of hash maps,
//! exhaustive subsequence search instead of DP, direct formula evaluation
//! instead of log-space accumulation.

pub fn bleu4(cand: &[u8], refr: &[u8]) -> f64 {
    if cand.is_empty() || refr.is_empty() {
        return 0.0;
    }
    let mut prod = 1.0f64;
    for n in 1..=4usize {
        let total = if cand.len() >= n { cand.len() - n + 1 } else { 0 };
        let mut matched = 0usize;
        if total > 0 {
            let mut seen: Vec<&[u8]> = Vec::new();
            for i in 0..=cand.len() - n {
                let gram = &cand[i..i + n];
                if seen.iter().any(|s| *s == gram) {
                    continue;
                }
                seen.push(gram);
                let in_cand = (0..=cand.len() - n)
                    .filter(|&j| &cand[j..j + n] == gram)
                    .count();
                let in_ref = if refr.len() >= n {
                    (0..=refr.len() - n)
                        .filter(|&j| &refr[j..j + n] == gram)
                        .count()
                } else {
                    0
                };
                matched += in_cand.min(in_ref);
            }
        }
        let p = if n == 1 {
            matched as f64 / total as f64
        } else if matched == 0 {
            1.0 / (total as f64 + 1.0)
        } else {
            matched as f64 / total as f64
        };
        if p == 0.0 {
            return 0.0;
        }
        prod *= p;
    }
    let geo = prod.sqrt().sqrt();
    let bp = if cand.len() < refr.len() {
        (1.0 - refr.len() as f64 / cand.len() as f64).exp()
    } else {
        1.0
    };
    100.0 * bp * geo
}

fn is_subsequence(needle: &[u8], hay: &[u8]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

pub fn rouge_l(cand: &[u8], refr: &[u8]) -> f64 {
    if cand.is_empty() || refr.is_empty() {
        return 0.0;
    }
    assert!(cand.len() <= 20, "exhaustive search only");
    let mut best = 0usize;
    for mask in 0u32..(1u32 << cand.len()) {
        let sub: Vec<u8> = (0..cand.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| cand[i])
            .collect();
        if sub.len() > best && is_subsequence(&sub, refr) {
            best = sub.len();
        }
    }
    if best == 0 {
        return 0.0;
    }
    let p = best as f64 / cand.len() as f64;
    let r = best as f64 / refr.len() as f64;
    100.0 * 2.0 * p * r / (p + r)
}

/// Symbol-level METEOR. Single-symbol tokens stem to themselves, so the
/// stemmed stage of the alignment can never add a pair here; the stemmer
/// itself is covered by its own fixed vectors.
pub fn meteor(cand: &[u8], refr: &[u8]) -> f64 {
    if cand.is_empty() || refr.is_empty() {
        return 0.0;
    }
    let mut taken = vec![false; refr.len()];
    let mut align: Vec<(usize, usize)> = Vec::new();
    for (i, c) in cand.iter().enumerate() {
        let mut j = 0;
        while j < refr.len() {
            if !taken[j] && refr[j] == *c {
                taken[j] = true;
                align.push((i, j));
                break;
            }
            j += 1;
        }
    }
    let m = align.len();
    if m == 0 {
        return 0.0;
    }
    let mut chunks = 0usize;
    let mut prev: Option<(usize, usize)> = None;
    for &(i, j) in &align {
        match prev {
            Some((pi, pj)) if i == pi + 1 && j == pj + 1 => {}
            _ => chunks += 1,
        }
        prev = Some((i, j));
    }
    let p = m as f64 / cand.len() as f64;
    let r = m as f64 / refr.len() as f64;
    let fmean = 10.0 * p * r / (9.0 * p + r);
    let penalty = 0.5 * (chunks as f64 / m as f64).powi(3);
    100.0 * fmean * (1.0 - penalty)
}
