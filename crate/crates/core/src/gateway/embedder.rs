//! Local deterministic text embedder: unigram and bigram features hashed
//! into a fixed number of buckets, L2-normalized. Always available offline,
//! which keeps retrieval and the semantic metric reproducible.

use crate::gateway::GatewayError;
use crate::hash::content_hash;
use crate::metrics::tokenize;
use crate::scalar::Scalar;
use crate::vecmath::l2_normalize;

#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dim: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder::new(Self::DEFAULT_DIM)
    }
}

impl HashEmbedder {
    pub const DEFAULT_DIM: usize = 512;

    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedder dimension must be positive");
        HashEmbedder { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bucket for one feature string. Bigram features are "a b", which
    /// cannot collide with a unigram as a string since tokens have no spaces.
    pub fn bucket(&self, feature: &str) -> usize {
        (content_hash(feature.as_bytes()) % self.dim as u64) as usize
    }

    pub fn embed<S: Scalar>(&self, text: &str) -> Result<Vec<S>, GatewayError> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return Err(GatewayError::EmptyEmbedText);
        }
        let mut vector = vec![S::zero(); self.dim];
        for token in &tokens {
            vector[self.bucket(token)] += S::one();
        }
        for pair in tokens.windows(2) {
            vector[self.bucket(&format!("{} {}", pair[0], pair[1]))] += S::one();
        }
        let normalized = l2_normalize(&mut vector);
        debug_assert!(normalized, "nonzero counts always normalize");
        Ok(vector)
    }
}
