//! Monitor classification ontology: a fixed resource taxonomy and a fixed
//! SLO taxonomy. Labels are matched case-insensitively with whitespace and
//! hyphen normalization, so "ram-memory" and "Ram-memory" name one class.

use serde::{Deserialize, Serialize};

/// The two monitor categorization tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Resource,
    Slo,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Resource => write!(f, "resource"),
            Task::Slo => write!(f, "slo"),
        }
    }
}

pub const RESOURCE_CLASS_COUNT: usize = 13;
pub const SLO_CLASS_COUNT: usize = 9;

/// Canonical resource classes, menu order.
pub const DEFAULT_RESOURCE_CLASSES: [&str; RESOURCE_CLASS_COUNT] = [
    "API",
    "Dependency",
    "Compute cluster",
    "Service level",
    "Cache-memory",
    "Ram-memory",
    "CPU",
    "Paging memory",
    "Container",
    "IO",
    "Storage",
    "Certificate",
    "None-of-the-above",
];

/// Canonical SLO classes, menu order.
pub const DEFAULT_SLO_CLASSES: [&str; SLO_CLASS_COUNT] = [
    "Availability",
    "Capacity",
    "Freshness",
    "Interruption Rate",
    "Latency",
    "Others",
    "Reliability",
    "Success Rate",
    "Throughput",
];

/// Normalized form used for label comparison: lowercase, hyphens and
/// underscores treated as spaces, interior whitespace collapsed.
pub fn normalize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c == '-' || c == '_' { ' ' } else { c })
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Class sets for both tasks. Cardinalities are fixed: 13 resource classes,
/// 9 SLO classes, unique under [`normalize_label`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ontology {
    pub resource_classes: Vec<String>,
    pub slo_classes: Vec<String>,
}

impl Default for Ontology {
    fn default() -> Self {
        Ontology {
            resource_classes: DEFAULT_RESOURCE_CLASSES.iter().map(|s| s.to_string()).collect(),
            slo_classes: DEFAULT_SLO_CLASSES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Ontology {
    /// Checks cardinality and uniqueness. Returns a human-readable complaint
    /// for the loader to wrap into its schema error.
    pub fn validate(&self) -> Result<(), String> {
        for (task, classes, want) in [
            (Task::Resource, &self.resource_classes, RESOURCE_CLASS_COUNT),
            (Task::Slo, &self.slo_classes, SLO_CLASS_COUNT),
        ] {
            if classes.len() != want {
                return Err(format!(
                    "{task} ontology must have exactly {want} classes, got {}",
                    classes.len()
                ));
            }
            let mut seen = std::collections::BTreeSet::new();
            for label in classes {
                if label.trim().is_empty() {
                    return Err(format!("{task} ontology contains an empty label"));
                }
                if !seen.insert(normalize_label(label)) {
                    return Err(format!("{task} ontology label {label:?} is not unique"));
                }
            }
        }
        Ok(())
    }

    pub fn classes(&self, task: Task) -> &[String] {
        match task {
            Task::Resource => &self.resource_classes,
            Task::Slo => &self.slo_classes,
        }
    }

    /// Maps an arbitrarily cased or hyphenated label to its canonical form.
    pub fn canonical(&self, task: Task, label: &str) -> Option<&str> {
        let norm = normalize_label(label);
        self.classes(task)
            .iter()
            .find(|c| normalize_label(c) == norm)
            .map(|c| c.as_str())
    }
}
