//! Corpus loading, validation, and lookups.
//!
//! A corpus is a directory of JSONL files (`incidents.jsonl`, `services.jsonl`,
//! `dependencies.jsonl`, `monitors.jsonl`) plus an optional `ontology.json`
//! override. Loading validates schema line by line, resolves every cross
//! reference, and canonicalizes monitor labels against the ontology.

mod ontology;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

pub use ontology::{
    normalize_label, Ontology, Task, DEFAULT_RESOURCE_CLASSES, DEFAULT_SLO_CLASSES,
    RESOURCE_CLASS_COUNT, SLO_CLASS_COUNT,
};

pub const INCIDENTS_FILE: &str = "incidents.jsonl";
pub const SERVICES_FILE: &str = "services.jsonl";
pub const DEPENDENCIES_FILE: &str = "dependencies.jsonl";
pub const MONITORS_FILE: &str = "monitors.jsonl";
pub const ONTOLOGY_FILE: &str = "ontology.json";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing corpus file: {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {message}")]
    Schema {
        file: String,
        line: usize,
        message: String,
    },
    #[error("unresolved reference: {0}")]
    Reference(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Incident {
    pub id: String,
    pub title: String,
    pub raw_summary: String,
    /// LLM-produced summary of the sanitized raw summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_summary: Option<String>,
    pub owning_service_id: String,
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth_root_cause: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_root_cause: Option<String>,
    /// Truth label: was this incident caused by an upstream dependency?
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_dependency_failure: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub id: String,
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Service {
    pub id: String,
    pub name: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summarized_description: Option<String>,
    #[serde(default)]
    pub components: Vec<Component>,
}

/// How a dependency edge was discovered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SharedSubscription,
    DnsLog,
    SharedResource,
    Declared,
}

/// `dependent` relies on `upstream`. Cycles are allowed; only one-hop
/// queries are ever made.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependencyEdge {
    pub dependent_service_id: String,
    pub upstream_service_id: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monitor {
    pub id: String,
    pub monitor_name: String,
    pub metric_name: String,
    pub service_id: String,
    pub alert_title: String,
    pub alert_conditions: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slo_label: Option<String>,
}

impl Monitor {
    pub fn label(&self, task: Task) -> Option<&str> {
        match task {
            Task::Resource => self.resource_label.as_deref(),
            Task::Slo => self.slo_label.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub services: BTreeMap<String, Service>,
    pub incidents: BTreeMap<String, Incident>,
    pub edges: Vec<DependencyEdge>,
    pub monitors: BTreeMap<String, Monitor>,
    pub ontology: Ontology,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus {
            services: BTreeMap::new(),
            incidents: BTreeMap::new(),
            edges: Vec::new(),
            monitors: BTreeMap::new(),
            ontology: Ontology::default(),
        }
    }
}

fn read_jsonl<T: DeserializeOwned>(dir: &Path, file: &str) -> Result<Vec<(usize, T)>, CorpusError> {
    let path = dir.join(file);
    let handle = fs::File::open(&path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CorpusError::MissingFile(path.clone())
        } else {
            CorpusError::Io { path: path.clone(), source: e }
        }
    })?;
    let reader = BufReader::new(handle);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io { path: path.clone(), source: e })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CorpusError::Schema {
            file: file.to_string(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push((idx + 1, record));
    }
    Ok(records)
}

fn schema_err(file: &str, line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Schema { file: file.to_string(), line, message: message.into() }
}

/// Loads and validates a corpus directory.
pub fn load_corpus(dir: &Path) -> Result<Corpus, CorpusError> {
    let ontology = match fs::read_to_string(dir.join(ONTOLOGY_FILE)) {
        Ok(raw) => {
            let ont: Ontology = serde_json::from_str(&raw)
                .map_err(|e| schema_err(ONTOLOGY_FILE, 1, e.to_string()))?;
            ont.validate().map_err(|m| schema_err(ONTOLOGY_FILE, 1, m))?;
            ont
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ontology::default(),
        Err(e) => return Err(CorpusError::Io { path: dir.join(ONTOLOGY_FILE), source: e }),
    };

    let mut services = BTreeMap::new();
    for (line, svc) in read_jsonl::<Service>(dir, SERVICES_FILE)? {
        if svc.id.trim().is_empty() {
            return Err(schema_err(SERVICES_FILE, line, "service id must be non-empty"));
        }
        let mut component_ids = BTreeSet::new();
        for comp in &svc.components {
            if comp.id.trim().is_empty() {
                return Err(schema_err(SERVICES_FILE, line, "component id must be non-empty"));
            }
            if !component_ids.insert(comp.id.clone()) {
                return Err(schema_err(
                    SERVICES_FILE,
                    line,
                    format!("duplicate component id {:?} in service {:?}", comp.id, svc.id),
                ));
            }
        }
        if let Some(prev) = services.insert(svc.id.clone(), svc) {
            return Err(schema_err(
                SERVICES_FILE,
                line,
                format!("duplicate service id {:?}", prev.id),
            ));
        }
    }

    let mut incidents = BTreeMap::new();
    for (line, inc) in read_jsonl::<Incident>(dir, INCIDENTS_FILE)? {
        if inc.id.trim().is_empty() {
            return Err(schema_err(INCIDENTS_FILE, line, "incident id must be non-empty"));
        }
        if !services.contains_key(&inc.owning_service_id) {
            return Err(CorpusError::Reference(format!(
                "incident {:?} references unknown service {:?}",
                inc.id, inc.owning_service_id
            )));
        }
        if let Some(prev) = incidents.insert(inc.id.clone(), inc) {
            return Err(schema_err(
                INCIDENTS_FILE,
                line,
                format!("duplicate incident id {:?}", prev.id),
            ));
        }
    }

    let mut edges = Vec::new();
    let mut edge_pairs = BTreeSet::new();
    for (line, edge) in read_jsonl::<DependencyEdge>(dir, DEPENDENCIES_FILE)? {
        if edge.dependent_service_id == edge.upstream_service_id {
            return Err(schema_err(
                DEPENDENCIES_FILE,
                line,
                format!("self-edge on service {:?}", edge.dependent_service_id),
            ));
        }
        for endpoint in [&edge.dependent_service_id, &edge.upstream_service_id] {
            if !services.contains_key(endpoint) {
                return Err(CorpusError::Reference(format!(
                    "dependency edge references unknown service {endpoint:?}"
                )));
            }
        }
        let pair = (edge.dependent_service_id.clone(), edge.upstream_service_id.clone());
        if !edge_pairs.insert(pair) {
            return Err(schema_err(
                DEPENDENCIES_FILE,
                line,
                format!(
                    "duplicate edge {:?} -> {:?}",
                    edge.dependent_service_id, edge.upstream_service_id
                ),
            ));
        }
        edges.push(edge);
    }
    edges.sort_by(|a, b| {
        (&a.dependent_service_id, &a.upstream_service_id)
            .cmp(&(&b.dependent_service_id, &b.upstream_service_id))
    });

    let mut monitors = BTreeMap::new();
    for (line, mut mon) in read_jsonl::<Monitor>(dir, MONITORS_FILE)? {
        if mon.id.trim().is_empty() {
            return Err(schema_err(MONITORS_FILE, line, "monitor id must be non-empty"));
        }
        if !services.contains_key(&mon.service_id) {
            return Err(CorpusError::Reference(format!(
                "monitor {:?} references unknown service {:?}",
                mon.id, mon.service_id
            )));
        }
        if let Some(raw) = &mon.resource_label {
            match ontology.canonical(Task::Resource, raw) {
                Some(canon) => mon.resource_label = Some(canon.to_string()),
                None => {
                    return Err(schema_err(
                        MONITORS_FILE,
                        line,
                        format!("monitor {:?} has unknown resource label {raw:?}", mon.id),
                    ))
                }
            }
        }
        if let Some(raw) = &mon.slo_label {
            match ontology.canonical(Task::Slo, raw) {
                Some(canon) => mon.slo_label = Some(canon.to_string()),
                None => {
                    return Err(schema_err(
                        MONITORS_FILE,
                        line,
                        format!("monitor {:?} has unknown SLO label {raw:?}", mon.id),
                    ))
                }
            }
        }
        if let Some(prev) = monitors.insert(mon.id.clone(), mon) {
            return Err(schema_err(
                MONITORS_FILE,
                line,
                format!("duplicate monitor id {:?}", prev.id),
            ));
        }
    }

    Ok(Corpus { services, incidents, edges, monitors, ontology })
}

fn write_jsonl<T: Serialize>(path: &Path, records: impl Iterator<Item = T>) -> Result<(), CorpusError> {
    let io_err = |e| CorpusError::Io { path: path.to_path_buf(), source: e };
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
    for record in records {
        let line = serde_json::to_string(&record)
            .map_err(|e| CorpusError::Io { path: path.to_path_buf(), source: e.into() })?;
        out.write_all(line.as_bytes()).map_err(io_err)?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Writes a corpus back to `dir` in canonical order (ids ascending, edges by
/// endpoint pair). Loading the result reproduces the corpus field for field.
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<(), CorpusError> {
    fs::create_dir_all(dir).map_err(|e| CorpusError::Io { path: dir.to_path_buf(), source: e })?;
    write_jsonl(&dir.join(SERVICES_FILE), corpus.services.values())?;
    write_jsonl(&dir.join(INCIDENTS_FILE), corpus.incidents.values())?;
    let mut edges = corpus.edges.clone();
    edges.sort_by(|a, b| {
        (&a.dependent_service_id, &a.upstream_service_id)
            .cmp(&(&b.dependent_service_id, &b.upstream_service_id))
    });
    write_jsonl(&dir.join(DEPENDENCIES_FILE), edges.iter())?;
    write_jsonl(&dir.join(MONITORS_FILE), corpus.monitors.values())?;
    let ont_path = dir.join(ONTOLOGY_FILE);
    let raw = serde_json::to_string_pretty(&corpus.ontology)
        .map_err(|e| CorpusError::Io { path: ont_path.clone(), source: e.into() })?;
    fs::write(&ont_path, raw + "\n").map_err(|e| CorpusError::Io { path: ont_path, source: e })
}

impl Corpus {
    pub fn service(&self, id: &str) -> Result<&Service, CorpusError> {
        self.services
            .get(id)
            .ok_or_else(|| CorpusError::Reference(format!("unknown service {id:?}")))
    }

    pub fn incident(&self, id: &str) -> Result<&Incident, CorpusError> {
        self.incidents
            .get(id)
            .ok_or_else(|| CorpusError::Reference(format!("unknown incident {id:?}")))
    }

    /// One-hop upstream services of `service_id`, sorted by id, deduplicated.
    /// Cycles elsewhere in the graph are irrelevant to a one-hop query.
    pub fn upstream_services(&self, service_id: &str) -> Result<Vec<&Service>, CorpusError> {
        if !self.services.contains_key(service_id) {
            return Err(CorpusError::Reference(format!("unknown service {service_id:?}")));
        }
        let ids: BTreeSet<&str> = self
            .edges
            .iter()
            .filter(|e| e.dependent_service_id == service_id)
            .map(|e| e.upstream_service_id.as_str())
            .collect();
        Ok(ids
            .into_iter()
            .map(|id| self.services.get(id).expect("edge endpoints are validated"))
            .collect())
    }

    /// Monitors carrying a label for `task`, sorted by id.
    pub fn labeled_monitors(&self, task: Task) -> Vec<&Monitor> {
        self.monitors.values().filter(|m| m.label(task).is_some()).collect()
    }
}
