//! Exact nearest-neighbor index over historical incidents. Brute-force
//! cosine ranking: corpus sizes are hundreds to thousands, so exhaustive
//! search is both exact and fast, and approximation would only complicate
//! the leave-one-out evaluation guarantees.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::gateway::HashEmbedder;
use crate::hash::content_hash;
use crate::scalar::Scalar;
use crate::vecmath::{dot, l2_normalize};

pub const INDEX_MAGIC: &[u8; 7] = b"XLCIDX1";
pub const INDEX_FILE: &str = "index.bin";
pub const INDEX_META_FILE: &str = "index.meta.jsonl";

/// Examples retrieved per in-context prompt.
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("cannot embed incident {incident_id}: {source}")]
    Embed {
        incident_id: String,
        source: crate::gateway::GatewayError,
    },
    #[error("index file is not an XLCIDX1 file")]
    BadMagic,
    #[error("index file truncated or inconsistent: {0}")]
    Corrupt(String),
    #[error("index metadata line {line}: {message}")]
    BadMeta { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry<S> {
    pub incident_id: String,
    pub vector: Vec<S>,
    pub text_fingerprint: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor<S> {
    pub incident_id: String,
    pub score: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex<S> {
    dim: usize,
    entries: Vec<IndexEntry<S>>,
}

impl<S: Scalar> VectorIndex<S> {
    pub fn new(dim: usize) -> Self {
        VectorIndex { dim, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[IndexEntry<S>] {
        &self.entries
    }

    /// Entry vectors must already be unit norm; normalizes defensively so a
    /// hand-built entry cannot skew scores.
    pub fn push(&mut self, mut entry: IndexEntry<S>) -> Result<(), RetrievalError> {
        if entry.vector.len() != self.dim {
            return Err(RetrievalError::Corrupt(format!(
                "entry {} has dimension {}, index has {}",
                entry.incident_id,
                entry.vector.len(),
                self.dim
            )));
        }
        if !l2_normalize(&mut entry.vector) {
            return Err(RetrievalError::Corrupt(format!(
                "entry {} has a zero vector",
                entry.incident_id
            )));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Exact top-k by cosine, descending; ties broken by incident_id
    /// ascending; entries in `exclude` never returned.
    pub fn top_k(&self, query: &[S], k: usize, exclude: &BTreeSet<String>) -> Vec<Neighbor<S>> {
        assert!(k >= 1, "k must be positive");
        assert_eq!(query.len(), self.dim, "query dimension mismatch");
        let mut scored: Vec<(S, &str)> = self
            .entries
            .iter()
            .filter(|e| !exclude.contains(&e.incident_id))
            .map(|e| (dot(&e.vector, query), e.incident_id.as_str()))
            .collect();
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("cosine scores are finite")
                .then_with(|| a.1.cmp(b.1))
        });
        scored
            .into_iter()
            .take(k)
            .map(|(score, id)| Neighbor { incident_id: id.to_string(), score })
            .collect()
    }

    pub fn save(&self, dir: &Path) -> Result<(), RetrievalError> {
        std::fs::create_dir_all(dir)?;
        let mut bin = BufWriter::new(std::fs::File::create(dir.join(INDEX_FILE))?);
        bin.write_all(INDEX_MAGIC)?;
        bin.write_all(&(self.dim as u32).to_le_bytes())?;
        bin.write_all(&(self.entries.len() as u32).to_le_bytes())?;
        for entry in &self.entries {
            for value in &entry.vector {
                let v: f32 = value.to_f32().unwrap_or(0.0);
                bin.write_all(&v.to_le_bytes())?;
            }
        }
        bin.flush()?;

        let mut meta = BufWriter::new(std::fs::File::create(dir.join(INDEX_META_FILE))?);
        for entry in &self.entries {
            let line = serde_json::json!({
                "incident_id": entry.incident_id,
                "text_fingerprint": entry.text_fingerprint,
            });
            writeln!(meta, "{line}").map_err(RetrievalError::Io)?;
        }
        meta.flush()?;
        Ok(())
    }

    /// Vectors come back through f32, so they are re-normalized on load to
    /// restore the unit-norm invariant.
    pub fn load(dir: &Path) -> Result<Self, RetrievalError> {
        let mut bin = BufReader::new(std::fs::File::open(dir.join(INDEX_FILE))?);
        let mut magic = [0u8; 7];
        bin.read_exact(&mut magic).map_err(|_| RetrievalError::BadMagic)?;
        if &magic != INDEX_MAGIC {
            return Err(RetrievalError::BadMagic);
        }
        let mut word = [0u8; 4];
        bin.read_exact(&mut word)?;
        let dim = u32::from_le_bytes(word) as usize;
        bin.read_exact(&mut word)?;
        let count = u32::from_le_bytes(word) as usize;

        let mut vectors = Vec::with_capacity(count);
        let mut value = [0u8; 4];
        for i in 0..count {
            let mut vector = Vec::with_capacity(dim);
            for _ in 0..dim {
                bin.read_exact(&mut value).map_err(|_| {
                    RetrievalError::Corrupt(format!("vector {i} truncated"))
                })?;
                vector.push(S::from_f32_lit(f32::from_le_bytes(value)));
            }
            vectors.push(vector);
        }

        let meta = BufReader::new(std::fs::File::open(dir.join(INDEX_META_FILE))?);
        let mut index = VectorIndex::new(dim);
        let mut lines = 0;
        for (i, line) in meta.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            #[derive(Deserialize)]
            struct MetaLine {
                incident_id: String,
                text_fingerprint: u64,
            }
            let parsed: MetaLine = serde_json::from_str(&line).map_err(|e| {
                RetrievalError::BadMeta { line: i + 1, message: e.to_string() }
            })?;
            if lines >= vectors.len() {
                return Err(RetrievalError::Corrupt(
                    "more metadata lines than vectors".into(),
                ));
            }
            index.push(IndexEntry {
                incident_id: parsed.incident_id,
                vector: std::mem::take(&mut vectors[lines]),
                text_fingerprint: parsed.text_fingerprint,
            })?;
            lines += 1;
        }
        if lines != count {
            return Err(RetrievalError::Corrupt(format!(
                "{count} vectors but {lines} metadata lines"
            )));
        }
        Ok(index)
    }
}

/// Text a retrieval entry embeds: title, newline, best available summary.
pub fn embedded_text(title: &str, summary: &str) -> String {
    format!("{title}\n{summary}")
}

/// One entry per incident with any text; incidents with both title and
/// summary empty are skipped with a warning (nothing to embed).
pub fn build_index<S: Scalar>(
    corpus: &Corpus,
    embedder: &HashEmbedder,
) -> Result<VectorIndex<S>, RetrievalError> {
    let mut index = VectorIndex::new(embedder.dim());
    for incident in corpus.incidents.values() {
        let summary = incident.clean_summary.as_deref().unwrap_or(&incident.raw_summary);
        let text = embedded_text(&incident.title, summary);
        if text.trim().is_empty() {
            log::warn!("incident {} has no title or summary; skipped from index", incident.id);
            continue;
        }
        let vector = embedder.embed(&text).map_err(|source| RetrievalError::Embed {
            incident_id: incident.id.clone(),
            source,
        })?;
        index.push(IndexEntry {
            incident_id: incident.id.clone(),
            vector,
            text_fingerprint: content_hash(text.as_bytes()),
        })?;
    }
    Ok(index)
}
