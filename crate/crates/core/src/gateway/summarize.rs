//! Summarization steps: condensing upstream service descriptions for prompt
//! context, and condensing raw incident summaries / root causes into the
//! clean_* corpus fields.

use serde::{Deserialize, Serialize};

use crate::corpus::{Incident, Service};
use crate::gateway::{
    prompt_fingerprint, ChatProvider, CompletionRequest, GatewayError,
};
use crate::sanitize;

pub const SERVICE_SUMMARY_ROLE_LINE: &str =
    "I want you to act as an expert software engineer. Consider the service descriptions.";
pub const SERVICE_SUMMARY_TASK_LINE: &str =
    "Your task is to summarize these service descriptions.";
pub const SERVICE_SUMMARY_FOCUS_LINE: &str =
    "Focus on the following aspects of the service functionality:";
pub const SERVICE_SUMMARY_BULLETS: &str = "* The functionality provided by the service\n* References to resources it operates\n* Distinguishing features of the service that clearly explains its operation";
pub const SERVICE_SUMMARY_CONSTRAINT_LINE: &str =
    "Your summary should be at most 2-3 sentences and should be in third person.";

/// Instruction text for incident-field summarization. The wording is this
/// artifact's own fixed template, versioned via prompt::TEMPLATE_VERSION.
pub const INCIDENT_SUMMARY_ROLE_LINE: &str =
    "You are an expert incident responder. Summarize the following incident text in a concise form.";
pub const INCIDENT_SUMMARY_CONSTRAINT_LINE: &str = "Keep exact service names, error codes, and numbers. Remove greetings, speculation, and boilerplate. Your summary should be at most 2-3 sentences.";
pub const INCIDENT_SUMMARY_TEXT_HEADER: &str = "Text:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryBundle {
    pub summary: String,
    pub source_ids: Vec<String>,
    pub prompt_hash: u64,
}

pub fn render_service_summary_prompt(services: &[&Service]) -> String {
    let mut blocks = vec![SERVICE_SUMMARY_ROLE_LINE.to_string()];
    for (i, service) in services.iter().enumerate() {
        blocks.push(format!("Upstream service {} - {}", i + 1, service.description));
    }
    blocks.push(SERVICE_SUMMARY_TASK_LINE.to_string());
    blocks.push(SERVICE_SUMMARY_FOCUS_LINE.to_string());
    blocks.push(SERVICE_SUMMARY_BULLETS.to_string());
    blocks.push(SERVICE_SUMMARY_CONSTRAINT_LINE.to_string());
    let mut text = blocks.join("\n\n");
    text.push('\n');
    text
}

pub fn summarize_service_descriptions<P: ChatProvider + ?Sized>(
    provider: &P,
    model: &str,
    services: &[&Service],
) -> Result<SummaryBundle, GatewayError> {
    if services.is_empty() {
        return Err(GatewayError::InvalidRequest("no services to summarize".into()));
    }
    for service in services {
        if service.description.trim().is_empty() {
            return Err(GatewayError::InvalidRequest(format!(
                "service {} has no description to summarize",
                service.id
            )));
        }
    }
    let prompt = render_service_summary_prompt(services);
    let summary = provider.complete(&CompletionRequest::new(model, &prompt))?;
    let summary = summary.trim().to_string();
    if summary.is_empty() {
        return Err(GatewayError::MalformedResponse("provider returned an empty summary".into()));
    }
    Ok(SummaryBundle {
        summary,
        source_ids: services.iter().map(|s| s.id.clone()).collect(),
        prompt_hash: prompt_fingerprint(&prompt),
    })
}

pub fn render_incident_summary_prompt(text: &str) -> String {
    format!(
        "{INCIDENT_SUMMARY_ROLE_LINE}\n\n{INCIDENT_SUMMARY_CONSTRAINT_LINE}\n\n{INCIDENT_SUMMARY_TEXT_HEADER}\n\n{text}\n"
    )
}

/// Summarizes the sanitized raw summary, and the ground-truth root cause when
/// one exists. Fields that sanitize to nothing come back empty rather than
/// erroring, so markup-only records do not poison a batch.
pub fn summarize_incident_fields<P: ChatProvider + ?Sized>(
    provider: &P,
    model: &str,
    incident: &Incident,
) -> Result<(String, Option<String>), GatewayError> {
    let clean_summary = summarize_text(provider, model, &incident.raw_summary)?;
    let clean_root_cause = match &incident.ground_truth_root_cause {
        Some(root_cause) => Some(summarize_text(provider, model, root_cause)?),
        None => None,
    };
    Ok((clean_summary, clean_root_cause))
}

fn summarize_text<P: ChatProvider + ?Sized>(
    provider: &P,
    model: &str,
    raw: &str,
) -> Result<String, GatewayError> {
    let (clean, _) = sanitize::clean_text(raw);
    if clean.is_empty() {
        return Ok(String::new());
    }
    let prompt = render_incident_summary_prompt(&clean);
    Ok(provider.complete(&CompletionRequest::new(model, &prompt))?.trim().to_string())
}
