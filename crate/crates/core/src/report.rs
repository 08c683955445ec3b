//! Joins run records to corpus truth and renders the evaluation report:
//! a metric-by-strategy table for root cause runs, a dependency
//! classification block, and per-case class tables for monitor runs.
//! Rendering is deterministic so replayed runs reproduce identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Task};
use crate::gateway::HashEmbedder;
use crate::metrics::{
    aggregate_scores, binary_prf, class_report, score_text, AggregateRow, ClassReport, PrfTriple,
    TextScore, METRIC_ROW_LABELS,
};
use crate::pipelines::{MonitorRunRecord, RcaRunRecord};
use crate::prompt::{MonitorCase, RcaStrategy};
use crate::sanitize;
use crate::Score;

/// Strategy columns in table order. The finetuned column is structural only:
/// it needs a trainable model and a multiyear archive, so its cells carry a
/// note instead of numbers.
pub const RCA_COLUMNS: [&str; 5] = ["FtGPT", "NoDEP", "DEP", "InC NoDEP", "InC DEP"];

pub const FTGPT_NOTE: &str =
    "excluded: needs a finetunable model and a multiyear incident archive";

pub const REPORT_JSON_FILE: &str = "report.json";
pub const REPORT_TEXT_FILE: &str = "report.txt";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("incident {0} appears in runs but not in the corpus")]
    UnknownIncident(String),
    #[error("monitor {0} appears in runs but not in the corpus")]
    UnknownMonitor(String),
    #[error("incident {0} has no dependency-failure truth label")]
    MissingDependencyTruth(String),
    #[error("monitor {0} has no truth label for this task")]
    MissingMonitorTruth(String),
    #[error(transparent)]
    Gateway(#[from] crate::gateway::GatewayError),
}

/// Binary dependency-failure scoring: `true` is the positive class and a
/// missing prediction counts as negative. Every record needs a truth label.
pub fn dependency_f1(
    records: &[RcaRunRecord],
    truth: &BTreeMap<String, bool>,
) -> Result<PrfTriple<Score>, ReportError> {
    let mut pairs = Vec::with_capacity(records.len());
    for record in records {
        let label = truth
            .get(&record.incident_id)
            .ok_or_else(|| ReportError::MissingDependencyTruth(record.incident_id.clone()))?;
        pairs.push((record.predicted_dependency, *label));
    }
    Ok(binary_prf(&pairs))
}

/// Class report over monitor records joined to their truth labels.
pub fn monitor_class_report(
    records: &[MonitorRunRecord],
    truth: &BTreeMap<String, String>,
) -> Result<ClassReport<Score>, ReportError> {
    let mut pairs = Vec::with_capacity(records.len());
    for record in records {
        let label = truth
            .get(&record.monitor_id)
            .ok_or_else(|| ReportError::MissingMonitorTruth(record.monitor_id.clone()))?;
        pairs.push((record.predicted.predicted.clone(), label.clone()));
    }
    Ok(class_report(&pairs))
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcaCounts {
    pub records: usize,
    /// Records that contributed a text-score row.
    pub scored: usize,
    pub provider_failures: usize,
    pub parse_failures: usize,
    /// Incidents with neither a clean nor a raw root cause to score against.
    pub missing_reference: usize,
    /// Parsed responses whose root-cause text was blank.
    pub empty_predictions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcaSection {
    pub columns: Vec<String>,
    pub excluded: BTreeMap<String, String>,
    pub metric_rows: Vec<String>,
    /// Strategy name -> rows in [`METRIC_ROW_LABELS`] order. Strategies with
    /// no scorable records have no entry.
    pub metrics: BTreeMap<String, Vec<AggregateRow<Score>>>,
    pub dependency_f1: BTreeMap<String, PrfTriple<Score>>,
    pub counts: BTreeMap<String, RcaCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSection {
    /// Canonical class order from the ontology, table row order.
    pub classes: Vec<String>,
    /// Case name ("C1".."C4") -> class report for records of that case.
    pub cases: BTreeMap<String, ClassReport<Score>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rca: RcaSection,
    /// Task name ("resource"/"slo") -> class tables. Tasks without records
    /// have no entry.
    pub monitors: BTreeMap<String, TaskSection>,
}

/// The reference text a predicted root cause is scored against.
fn reference_for(corpus: &Corpus, incident_id: &str) -> Result<Option<String>, ReportError> {
    let incident = corpus
        .incidents
        .get(incident_id)
        .ok_or_else(|| ReportError::UnknownIncident(incident_id.to_string()))?;
    if let Some(clean) = &incident.clean_root_cause {
        if !clean.trim().is_empty() {
            return Ok(Some(clean.clone()));
        }
    }
    match &incident.ground_truth_root_cause {
        Some(raw) => {
            let cleaned = sanitize::clean_text(raw).0;
            Ok((!cleaned.trim().is_empty()).then_some(cleaned))
        }
        None => Ok(None),
    }
}

fn dependency_truth(
    corpus: &Corpus,
    records: &[RcaRunRecord],
) -> Result<BTreeMap<String, bool>, ReportError> {
    let mut truth = BTreeMap::new();
    for record in records {
        let incident = corpus
            .incidents
            .get(&record.incident_id)
            .ok_or_else(|| ReportError::UnknownIncident(record.incident_id.clone()))?;
        let label = incident
            .is_dependency_failure
            .ok_or_else(|| ReportError::MissingDependencyTruth(record.incident_id.clone()))?;
        truth.insert(record.incident_id.clone(), label);
    }
    Ok(truth)
}

pub fn build_report(
    corpus: &Corpus,
    rca_records: &[RcaRunRecord],
    monitor_records: &[MonitorRunRecord],
    embedder: &HashEmbedder,
) -> Result<Report, ReportError> {
    let mut rca = RcaSection {
        columns: RCA_COLUMNS.iter().map(|s| s.to_string()).collect(),
        excluded: [("FtGPT".to_string(), FTGPT_NOTE.to_string())].into(),
        metric_rows: METRIC_ROW_LABELS.iter().map(|s| s.to_string()).collect(),
        metrics: BTreeMap::new(),
        dependency_f1: BTreeMap::new(),
        counts: BTreeMap::new(),
    };

    for strategy in RcaStrategy::ALL {
        let records: Vec<&RcaRunRecord> =
            rca_records.iter().filter(|r| r.strategy == strategy).collect();
        if records.is_empty() {
            continue;
        }
        let name = strategy.to_string();
        let owned: Vec<RcaRunRecord> = records.iter().map(|r| (*r).clone()).collect();
        let truth = dependency_truth(corpus, &owned)?;
        rca.dependency_f1.insert(name.clone(), dependency_f1(&owned, &truth)?);

        let mut counts = RcaCounts { records: records.len(), ..RcaCounts::default() };
        let mut scores: Vec<TextScore<Score>> = Vec::new();
        for record in &records {
            if let Some(error) = &record.error {
                if error.starts_with("parse:") {
                    counts.parse_failures += 1;
                } else {
                    counts.provider_failures += 1;
                }
                continue;
            }
            let Some(reference) = reference_for(corpus, &record.incident_id)? else {
                counts.missing_reference += 1;
                continue;
            };
            let candidate = record.predicted_root_cause.trim();
            if candidate.is_empty() {
                counts.empty_predictions += 1;
                continue;
            }
            let candidate_vec = embedder.embed::<Score>(candidate)?;
            let reference_vec = embedder.embed::<Score>(&reference)?;
            scores.push(score_text(candidate, &reference, &candidate_vec, &reference_vec));
            counts.scored += 1;
        }
        if !scores.is_empty() {
            let rows = aggregate_scores(&scores).expect("non-empty scores aggregate");
            rca.metrics.insert(name.clone(), rows);
        }
        rca.counts.insert(name, counts);
    }

    let mut monitors: BTreeMap<String, TaskSection> = BTreeMap::new();
    for task in [Task::Resource, Task::Slo] {
        let task_records: Vec<&MonitorRunRecord> =
            monitor_records.iter().filter(|r| r.task == task).collect();
        if task_records.is_empty() {
            continue;
        }
        let mut truth = BTreeMap::new();
        for record in &task_records {
            let monitor = corpus
                .monitors
                .get(&record.monitor_id)
                .ok_or_else(|| ReportError::UnknownMonitor(record.monitor_id.clone()))?;
            let label = monitor
                .label(task)
                .ok_or_else(|| ReportError::MissingMonitorTruth(record.monitor_id.clone()))?;
            truth.insert(record.monitor_id.clone(), label.to_string());
        }
        let mut section = TaskSection {
            classes: corpus.ontology.classes(task).to_vec(),
            cases: BTreeMap::new(),
        };
        for case in MonitorCase::ALL {
            let case_records: Vec<MonitorRunRecord> = task_records
                .iter()
                .filter(|r| r.case == case)
                .map(|r| (*r).clone())
                .collect();
            if case_records.is_empty() {
                continue;
            }
            section
                .cases
                .insert(case.to_string(), monitor_class_report(&case_records, &truth)?);
        }
        monitors.insert(task.to_string(), section);
    }

    Ok(Report { rca, monitors })
}

const METRIC_COL: usize = 22;
const VALUE_COL: usize = 16;
const CLASS_COL: usize = 22;
const CASE_COL: usize = 7;

fn pad(text: &str, width: usize) -> String {
    format!("{text:<width$}")
}

fn rca_cell(report: &Report, column: &str, row_index: usize) -> String {
    if report.rca.excluded.contains_key(column) {
        return "excluded".to_string();
    }
    match report.rca.metrics.get(column) {
        Some(rows) => {
            let row = &rows[row_index];
            format!("{:.2} \u{00b1} {:.2}", row.mean, row.std)
        }
        None => "n/a".to_string(),
    }
}

/// Aligned plain-text rendering: one metric-by-strategy table, a dependency
/// classification block, then one class table per task with the four metric
/// groups spread over the C1..C4 case columns.
pub fn render_report_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str("Root cause recommendation quality (mean \u{00b1} std, scale 0-100)\n\n");
    out.push_str(&pad("Metric", METRIC_COL));
    for column in &report.rca.columns {
        out.push_str(&pad(column, VALUE_COL));
    }
    out.push('\n');
    for (i, metric) in report.rca.metric_rows.iter().enumerate() {
        out.push_str(&pad(metric, METRIC_COL));
        for column in &report.rca.columns {
            out.push_str(&pad(&rca_cell(report, column, i), VALUE_COL));
        }
        out.push('\n');
    }
    for (column, note) in &report.rca.excluded {
        out.push_str(&format!("\n{column}: {note}\n"));
    }

    out.push_str("\nDependency failure classification (positive class = dependency failure)\n\n");
    out.push_str(&pad("Strategy", METRIC_COL));
    for header in ["Precision", "Recall", "F1", "Records"] {
        out.push_str(&pad(header, 11));
    }
    out.push('\n');
    for column in &report.rca.columns {
        if report.rca.excluded.contains_key(column.as_str()) {
            continue;
        }
        let Some(prf) = report.rca.dependency_f1.get(column) else {
            continue;
        };
        let records = report.rca.counts.get(column).map_or(0, |c| c.records);
        out.push_str(&pad(column, METRIC_COL));
        out.push_str(&pad(&format!("{:.2}", prf.precision), 11));
        out.push_str(&pad(&format!("{:.2}", prf.recall), 11));
        out.push_str(&pad(&format!("{:.2}", prf.f1), 11));
        out.push_str(&format!("{records}\n"));
    }

    for (task, section) in &report.monitors {
        let title = match task.as_str() {
            "resource" => "Resource class assignment",
            "slo" => "SLO class assignment",
            other => other,
        };
        out.push_str(&format!("\n{title}\n\n"));
        let groups = ["precision", "recall", "f1-score", "accuracy"];
        let cases = ["C1", "C2", "C3", "C4"];
        out.push_str(&pad("", CLASS_COL));
        for group in groups {
            out.push_str(&pad(group, CASE_COL * cases.len()));
        }
        out.push('\n');
        out.push_str(&pad("Class", CLASS_COL));
        for _ in groups {
            for case in cases {
                out.push_str(&pad(case, CASE_COL));
            }
        }
        out.push('\n');
        for class in &section.classes {
            out.push_str(&pad(class, CLASS_COL));
            for group in groups {
                for case in cases {
                    let cell = section
                        .cases
                        .get(case)
                        .and_then(|report| report.per_class.get(class))
                        .map(|stats| {
                            let value = match group {
                                "precision" => stats.precision,
                                "recall" => stats.recall,
                                "f1-score" => stats.f1,
                                _ => stats.class_accuracy,
                            };
                            format!("{value:.2}")
                        })
                        .unwrap_or_else(|| "-".to_string());
                    out.push_str(&pad(&cell, CASE_COL));
                }
            }
            out.push('\n');
        }
        out.push('\n');
        for (label, value_of) in [
            ("Overall accuracy", 0usize),
            ("Macro F1", 1),
            ("Weighted F1", 2),
            ("Parse failures", 3),
        ] {
            out.push_str(&pad(label, CLASS_COL));
            for case in cases {
                let cell = section
                    .cases
                    .get(case)
                    .map(|report| match value_of {
                        0 => format!("{:.2}", report.overall_accuracy),
                        1 => format!("{:.2}", report.macro_avg.f1),
                        2 => format!("{:.2}", report.weighted_avg.f1),
                        _ => report.parse_failures.to_string(),
                    })
                    .unwrap_or_else(|| "-".to_string());
                out.push_str(&pad(&cell, CASE_COL));
            }
            out.push('\n');
        }
    }
    out
}
