//! Small dense-vector helpers shared by the embedder, the retrieval index,
//! and the semantic similarity metric.

use crate::scalar::Scalar;

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub fn l2_norm<S: Scalar>(v: &[S]) -> S {
    dot(v, v).sqrt()
}

/// Scales `v` to unit length. Returns false (leaving `v` untouched) when the
/// norm is zero.
pub fn l2_normalize<S: Scalar>(v: &mut [S]) -> bool {
    let norm = l2_norm(v);
    if norm <= S::zero() {
        return false;
    }
    for x in v {
        *x = *x / norm;
    }
    true
}

/// Cosine similarity; zero when either vector has zero norm.
pub fn cosine<S: Scalar>(a: &[S], b: &[S]) -> S {
    let na = l2_norm(a);
    let nb = l2_norm(b);
    if na <= S::zero() || nb <= S::zero() {
        return S::zero();
    }
    dot(a, b) / (na * nb)
}
