//! End-to-end runs: root-cause analysis over incidents and classification
//! over monitors, producing one prediction record per input for evaluation.
//! Provider failures and parse failures land in the records; only broken
//! preconditions (unknown ids, missing index, every call failing) abort.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Incident, Task};
use crate::gateway::{
    summarize_incident_fields, summarize_service_descriptions, ChatProvider, CompletionRequest,
    GatewayError, HashEmbedder, ProviderKind,
};
use crate::hash::content_hash;
use crate::prompt::{
    build_monitor_prompt_with, build_rca_prompt, parse_monitor_response, parse_rca_response,
    ClassAnswer, MonitorCase, RcaExample, RcaStrategy,
};
use crate::retrieval::{embedded_text, DEFAULT_K};
use crate::sanitize;
use crate::{Index, Score};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown incident {0}")]
    UnknownIncident(String),
    #[error("unknown service {service_id} referenced by {referrer}")]
    UnknownService { service_id: String, referrer: String },
    #[error("strategy {strategy} needs a retrieval index")]
    MissingIndex { strategy: RcaStrategy },
    #[error("no monitors carry a {task} label")]
    NoLabeledMonitors { task: Task },
    #[error("all {count} provider calls failed; first error: {first}")]
    AllFailed { count: usize, first: String },
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("record file {path}, line {line}: {message}")]
    BadRecordFile { path: String, line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcaRunRecord {
    pub incident_id: String,
    pub strategy: RcaStrategy,
    pub prompt_hash: u64,
    pub predicted_root_cause: String,
    /// None is a parse failure; it scores as a negative prediction.
    pub predicted_dependency: Option<bool>,
    pub examples_used: Vec<String>,
    pub elapsed_ms: u64,
    pub provider: ProviderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorRunRecord {
    pub monitor_id: String,
    pub task: Task,
    pub case: MonitorCase,
    pub prompt_hash: u64,
    pub predicted: ClassAnswer,
    pub elapsed_ms: u64,
    pub provider: ProviderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub model: String,
    pub k: usize,
    pub concurrency: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { model: "gpt-4".into(), k: DEFAULT_K, concurrency: 4 }
    }
}

/// Incident with the summary the prompt should carry: the cached clean
/// summary when present, otherwise the sanitized raw text.
fn effective_incident(incident: &Incident) -> Cow<'_, Incident> {
    if incident.clean_summary.is_some() {
        return Cow::Borrowed(incident);
    }
    let mut patched = incident.clone();
    patched.clean_summary = Some(sanitize::clean_text(&incident.raw_summary).0);
    Cow::Owned(patched)
}

fn example_from(incident: &Incident) -> RcaExample {
    let summary = incident
        .clean_summary
        .clone()
        .unwrap_or_else(|| sanitize::clean_text(&incident.raw_summary).0);
    let root_cause = incident
        .clean_root_cause
        .clone()
        .or_else(|| incident.ground_truth_root_cause.clone())
        .unwrap_or_else(|| "Root cause not recorded.".to_string());
    RcaExample { title: incident.title.clone(), summary, root_cause }
}

/// Retrieval query text, matching build_index's choice of summary field.
fn query_text(incident: &Incident) -> String {
    let summary = incident.clean_summary.as_deref().unwrap_or(&incident.raw_summary);
    embedded_text(&incident.title, summary)
}

pub fn run_rca<P: ChatProvider + ?Sized>(
    corpus: &Corpus,
    index: Option<&Index>,
    embedder: &HashEmbedder,
    provider: &P,
    incident_id: &str,
    strategy: RcaStrategy,
    options: &RunOptions,
) -> Result<RcaRunRecord, PipelineError> {
    let started = Instant::now();
    let incident = corpus
        .incidents
        .get(incident_id)
        .ok_or_else(|| PipelineError::UnknownIncident(incident_id.to_string()))?;
    let owning_service = corpus.services.get(&incident.owning_service_id).ok_or_else(|| {
        PipelineError::UnknownService {
            service_id: incident.owning_service_id.clone(),
            referrer: incident.id.clone(),
        }
    })?;

    let mut examples = Vec::new();
    let mut examples_used = Vec::new();
    if strategy.uses_examples() {
        let index = index.ok_or(PipelineError::MissingIndex { strategy })?;
        let query = embedder
            .embed::<Score>(&query_text(incident))
            .map_err(PipelineError::Gateway)?;
        let exclude: BTreeSet<String> = [incident.id.clone()].into();
        for neighbor in index.top_k(&query, options.k, &exclude) {
            let Some(historical) = corpus.incidents.get(&neighbor.incident_id) else {
                continue; // index built from an older corpus revision
            };
            examples_used.push(historical.id.clone());
            examples.push(example_from(historical));
        }
    }

    let upstream: Vec<(String, String)> = if strategy.uses_upstream() {
        corpus
            .upstream_services(&incident.owning_service_id)
            .map_err(|_| PipelineError::UnknownService {
                service_id: incident.owning_service_id.clone(),
                referrer: incident.id.clone(),
            })?
            .iter()
            .map(|svc| {
                let description = svc
                    .summarized_description
                    .clone()
                    .unwrap_or_else(|| svc.description.clone());
                (svc.name.clone(), description)
            })
            .collect()
    } else {
        Vec::new()
    };

    let prompt = build_rca_prompt(
        strategy,
        &effective_incident(incident),
        owning_service,
        &upstream,
        &examples,
    )
    .map_err(|e| GatewayError::InvalidRequest(e.to_string()))
    .map_err(PipelineError::Gateway)?;

    let mut record = RcaRunRecord {
        incident_id: incident.id.clone(),
        strategy,
        prompt_hash: prompt.hash,
        predicted_root_cause: String::new(),
        predicted_dependency: None,
        examples_used,
        elapsed_ms: 0,
        provider: provider.kind(),
        error: None,
    };

    match provider.complete(&CompletionRequest::new(&options.model, &prompt.text)) {
        Ok(response) => match parse_rca_response(&response) {
            Ok(answer) => {
                record.predicted_root_cause = answer.root_cause;
                record.predicted_dependency = Some(answer.is_dependency_failure);
            }
            Err(parse_error) => {
                record.error = Some(format!("parse: {}", parse_error.kind()));
            }
        },
        Err(provider_error) => {
            record.error = Some(format!("provider: {provider_error}"));
        }
    }
    record.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(record)
}

/// Runs indexes 0..count over a bounded worker pool, preserving input order.
fn run_indexed<T, F>(count: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = workers.min(count).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= count {
                    break;
                }
                *slots[i].lock().unwrap() = Some(job(i));
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

pub fn run_rca_batch<P: ChatProvider + ?Sized>(
    corpus: &Corpus,
    index: Option<&Index>,
    embedder: &HashEmbedder,
    provider: &P,
    strategy: RcaStrategy,
    eval_ids: &[String],
    options: &RunOptions,
) -> Result<Vec<RcaRunRecord>, PipelineError> {
    for id in eval_ids {
        if !corpus.incidents.contains_key(id) {
            return Err(PipelineError::UnknownIncident(id.clone()));
        }
    }
    if strategy.uses_examples() && index.is_none() {
        return Err(PipelineError::MissingIndex { strategy });
    }
    if eval_ids.is_empty() {
        return Ok(Vec::new());
    }

    let results = run_indexed(eval_ids.len(), options.concurrency, |i| {
        run_rca(corpus, index, embedder, provider, &eval_ids[i], strategy, options)
    });
    let mut records = Vec::with_capacity(results.len());
    for result in results {
        records.push(result?);
    }
    fail_if_all_failed(records.iter().map(|r| r.error.as_deref()))?;
    Ok(records)
}

pub fn run_monitor_batch<P: ChatProvider + ?Sized>(
    corpus: &Corpus,
    provider: &P,
    task: Task,
    case: MonitorCase,
    options: &RunOptions,
) -> Result<Vec<MonitorRunRecord>, PipelineError> {
    let monitors = corpus.labeled_monitors(task);
    if monitors.is_empty() {
        return Err(PipelineError::NoLabeledMonitors { task });
    }
    for monitor in &monitors {
        if !corpus.services.contains_key(&monitor.service_id) {
            return Err(PipelineError::UnknownService {
                service_id: monitor.service_id.clone(),
                referrer: monitor.id.clone(),
            });
        }
    }

    let records = run_indexed(monitors.len(), options.concurrency, |i| {
        let monitor = monitors[i];
        let service = &corpus.services[&monitor.service_id];
        let started = Instant::now();
        let prompt = build_monitor_prompt_with(task, case, monitor, service, &corpus.ontology);
        let mut record = MonitorRunRecord {
            monitor_id: monitor.id.clone(),
            task,
            case,
            prompt_hash: prompt.hash,
            predicted: ClassAnswer { predicted: None, rationale: String::new() },
            elapsed_ms: 0,
            provider: provider.kind(),
            error: None,
        };
        match provider.complete(&CompletionRequest::new(&options.model, &prompt.text)) {
            Ok(response) => {
                record.predicted = parse_monitor_response(&response, task, &corpus.ontology);
            }
            Err(provider_error) => {
                record.error = Some(format!("provider: {provider_error}"));
            }
        }
        record.elapsed_ms = started.elapsed().as_millis() as u64;
        record
    });
    fail_if_all_failed(records.iter().map(|r| r.error.as_deref()))?;
    Ok(records)
}

fn fail_if_all_failed<'a>(
    errors: impl Iterator<Item = Option<&'a str>>,
) -> Result<(), PipelineError> {
    let mut count = 0;
    let mut failed = 0;
    let mut first = None;
    for error in errors {
        count += 1;
        if let Some(message) = error {
            failed += 1;
            first.get_or_insert_with(|| message.to_string());
        }
    }
    if count > 0 && failed == count {
        return Err(PipelineError::AllFailed { count, first: first.unwrap_or_default() });
    }
    Ok(())
}

/// Tracks which raw text produced each cached clean_* field, keyed by
/// content hash, so edits to raw text invalidate stale summaries.
#[derive(Debug, Default, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummarizeCache {
    #[serde(default)]
    pub services: std::collections::BTreeMap<String, u64>,
    #[serde(default)]
    pub incident_summaries: std::collections::BTreeMap<String, u64>,
    #[serde(default)]
    pub incident_root_causes: std::collections::BTreeMap<String, u64>,
}

pub const SUMMARIZE_CACHE_FILE: &str = "summarize_cache.json";

impl SummarizeCache {
    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let path = dir.join(SUMMARIZE_CACHE_FILE);
        match std::fs::read_to_string(&path) {
            Ok(raw) => serde_json::from_str(&raw).map_err(|e| PipelineError::BadRecordFile {
                path: path.display().to_string(),
                line: 1,
                message: e.to_string(),
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(SummarizeCache::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        let path = dir.join(SUMMARIZE_CACHE_FILE);
        let mut raw = serde_json::to_string_pretty(self).expect("cache serializes");
        raw.push('\n');
        std::fs::write(path, raw)?;
        Ok(())
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SummarizeStats {
    pub services_summarized: usize,
    pub incidents_summarized: usize,
    pub reused: usize,
}

/// Fills summarized_description / clean_summary / clean_root_cause for every
/// record whose cached value is missing or produced from different raw text.
pub fn summarize_corpus<P: ChatProvider + ?Sized>(
    corpus: &mut Corpus,
    provider: &P,
    model: &str,
    cache: &mut SummarizeCache,
) -> Result<SummarizeStats, PipelineError> {
    let mut stats = SummarizeStats::default();

    let service_ids: Vec<String> = corpus.services.keys().cloned().collect();
    for id in service_ids {
        let service = &corpus.services[&id];
        if service.description.trim().is_empty() {
            continue;
        }
        let raw_hash = content_hash(service.description.as_bytes());
        let fresh = service.summarized_description.is_some()
            && cache.services.get(&id) == Some(&raw_hash);
        if fresh {
            stats.reused += 1;
            continue;
        }
        let bundle = summarize_service_descriptions(provider, model, &[service])?;
        let service = corpus.services.get_mut(&id).expect("id enumerated above");
        service.summarized_description = Some(bundle.summary);
        cache.services.insert(id, raw_hash);
        stats.services_summarized += 1;
    }

    let incident_ids: Vec<String> = corpus.incidents.keys().cloned().collect();
    for id in incident_ids {
        let incident = &corpus.incidents[&id];
        let summary_hash = content_hash(incident.raw_summary.as_bytes());
        let cause_hash = incident
            .ground_truth_root_cause
            .as_ref()
            .map(|rc| content_hash(rc.as_bytes()));
        let summary_fresh = incident.clean_summary.is_some()
            && cache.incident_summaries.get(&id) == Some(&summary_hash);
        let cause_fresh = match cause_hash {
            Some(hash) => {
                incident.clean_root_cause.is_some()
                    && cache.incident_root_causes.get(&id) == Some(&hash)
            }
            None => true,
        };
        if summary_fresh && cause_fresh {
            stats.reused += 1;
            continue;
        }
        let (clean_summary, clean_root_cause) =
            summarize_incident_fields(provider, model, incident)?;
        let incident = corpus.incidents.get_mut(&id).expect("id enumerated above");
        incident.clean_summary = Some(clean_summary);
        incident.clean_root_cause = clean_root_cause;
        cache.incident_summaries.insert(id.clone(), summary_hash);
        if let Some(hash) = cause_hash {
            cache.incident_root_causes.insert(id.clone(), hash);
        }
        stats.incidents_summarized += 1;
    }

    Ok(stats)
}

pub fn write_records<T: Serialize>(path: &Path, records: &[T]) -> Result<(), PipelineError> {
    let file = std::fs::File::create(path)?;
    write_to(file, records)
}

pub fn append_records<T: Serialize>(path: &Path, records: &[T]) -> Result<(), PipelineError> {
    let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    write_to(file, records)
}

fn write_to<T: Serialize>(file: std::fs::File, records: &[T]) -> Result<(), PipelineError> {
    let mut writer = BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(record).expect("records serialize");
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| PipelineError::BadRecordFile {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}
