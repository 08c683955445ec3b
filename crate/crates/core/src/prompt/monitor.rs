//! Monitor-classification prompt rendering and response parsing.

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_label, Monitor, Ontology, Service, Task};
use crate::prompt::templates::*;
use crate::prompt::{join_blocks, MonitorCase, RenderedPrompt, SectionTag};

/// Parsed classification answer. `predicted` is None on ParseFailure, which
/// is a real evaluation outcome, not an error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassAnswer {
    pub predicted: Option<String>,
    pub rationale: String,
}

fn task_word(task: Task) -> &'static str {
    match task {
        Task::Resource => "resource",
        Task::Slo => "SLO",
    }
}

/// Menu display form for a label: default resource classes render in their
/// menu spelling, everything else as stored.
pub fn menu_form(label: &str) -> &str {
    let key = normalize_label(label);
    for (norm, form) in RESOURCE_MENU_FORMS {
        if norm == key {
            return form;
        }
    }
    label
}

pub fn build_monitor_prompt(
    task: Task,
    case: MonitorCase,
    monitor: &Monitor,
    service: &Service,
) -> RenderedPrompt {
    let ontology = Ontology::default();
    build_monitor_prompt_with(task, case, monitor, service, &ontology)
}

pub fn build_monitor_prompt_with(
    task: Task,
    case: MonitorCase,
    monitor: &Monitor,
    service: &Service,
    ontology: &Ontology,
) -> RenderedPrompt {
    let word = task_word(task);
    let mut blocks: Vec<String> = Vec::new();
    let mut sections = Vec::new();

    sections.push(SectionTag::TaskDescription);
    blocks.push(MONITOR_TASK_HEADER.to_string());
    blocks.push(MONITOR_ROLE_LINE.replace("{class}", word));
    blocks.push(MONITOR_Q1_LINE.to_string());
    blocks.push(MONITOR_Q2_LINE.to_string());
    let menu: Vec<String> = ontology
        .classes(task)
        .iter()
        .enumerate()
        .map(|(i, label)| format!("{}. {}", i + 1, menu_form(label)))
        .collect();
    blocks.push(menu.join("\n"));

    sections.push(SectionTag::AdditionalGuidance);
    blocks.push(MONITOR_GUIDANCE_HEADER.to_string());
    blocks.push(MONITOR_GUIDANCE_1.to_string());
    blocks.push(MONITOR_GUIDANCE_2.replace("{class}", word));
    blocks.push(MONITOR_GUIDANCE_3.to_string());
    blocks.push(MONITOR_GUIDANCE_4.to_string());

    sections.push(SectionTag::MonitorMetadata);
    blocks.push(MONITOR_METADATA_HEADER.to_string());
    blocks.push(format!("- Monitor Name: {}", monitor.monitor_name));
    blocks.push(format!("- Metric Name: {}", monitor.metric_name));
    blocks.push(format!("- Service Name: {}", service.name));
    blocks.push(format!("- Alert Title: {}", monitor.alert_title));
    blocks.push(format!("- Alert Conditions: {}", monitor.alert_conditions));

    if case.includes_service_description() {
        sections.push(SectionTag::ServiceDescription);
        blocks.push(MONITOR_SERVICE_HEADER.to_string());
        let description = service
            .summarized_description
            .as_deref()
            .unwrap_or(&service.description);
        if description.trim().is_empty() {
            blocks.push(MONITOR_NO_SERVICE_DESCRIPTION_LINE.to_string());
        } else {
            blocks.push(description.to_string());
        }
    }

    if case.includes_components() {
        sections.push(SectionTag::ComponentDescriptions);
        blocks.push(MONITOR_COMPONENTS_HEADER.to_string());
        if service.components.is_empty() {
            blocks.push(MONITOR_NO_COMPONENTS_LINE.to_string());
        } else {
            for component in &service.components {
                blocks.push(format!("- {}: {}", component.name, component.description));
            }
        }
    }

    RenderedPrompt::new(join_blocks(&blocks), sections)
}

pub fn parse_monitor_response(text: &str, task: Task, ontology: &Ontology) -> ClassAnswer {
    let (rationale, scan) = match text.rfind("Q2") {
        Some(pos) => (text[..pos].trim().to_string(), &text[pos..]),
        None => (text.trim().to_string(), text),
    };
    let mut best: Option<(usize, usize, &str)> = None;
    for label in ontology.classes(task) {
        let pattern = label_pattern(label);
        for m in pattern.find_iter(scan) {
            let key: (usize, usize, &str) = (m.start(), m.end() - m.start(), label);
            if best.map_or(true, |b| key > b) {
                best = Some(key);
            }
        }
    }
    ClassAnswer {
        predicted: best.map(|(_, _, label)| label.to_string()),
        rationale,
    }
}

/// Case-insensitive, hyphen/space/underscore-insensitive label matcher with
/// an optional "N." menu-number prefix.
fn label_pattern(label: &str) -> Regex {
    let tokens: Vec<String> = normalize_label(label)
        .split_whitespace()
        .map(regex::escape)
        .collect();
    let body = tokens.join(r"[\s_\-]+");
    Regex::new(&format!(r"(?i)(?:\d+\.\s*)?\b{body}\b")).expect("label pattern compiles")
}
