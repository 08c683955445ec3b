//! Root-cause-analysis prompt rendering and response parsing.

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{Incident, Service};
use crate::prompt::templates::*;
use crate::prompt::{join_blocks, PromptError, RcaStrategy, RenderedPrompt, SectionTag};

/// One retrieved historical incident, in the order the prompt presents it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcaExample {
    pub title: String,
    pub summary: String,
    pub root_cause: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcaAnswer {
    pub root_cause: String,
    pub is_dependency_failure: bool,
}

pub const EXAMPLE_TARGET: usize = 5;

/// Renders the root-cause prompt for `strategy`. `upstream` pairs are
/// (service name, summarized description) in the order they should appear;
/// `examples` are retrieval-ranked, most similar first.
pub fn build_rca_prompt(
    strategy: RcaStrategy,
    incident: &Incident,
    owning_service: &Service,
    upstream: &[(String, String)],
    examples: &[RcaExample],
) -> Result<RenderedPrompt, PromptError> {
    if strategy.uses_examples() {
        if examples.is_empty() {
            return Err(PromptError::MissingExamples { strategy });
        }
        if examples.len() < EXAMPLE_TARGET {
            warn!(
                "incident {}: only {} in-context examples available (target {})",
                incident.id,
                examples.len(),
                EXAMPLE_TARGET
            );
        }
    }

    let mut blocks: Vec<String> = Vec::new();
    let mut sections = Vec::new();

    sections.push(SectionTag::TaskDescription);
    blocks.push(RCA_TASK_HEADER.to_string());
    blocks.push(RCA_ROLE_LINE.to_string());
    blocks.push(RCA_METADATA_LINE.to_string());
    if strategy.uses_upstream() {
        blocks.push(RCA_UPSTREAM_INTRO_LINE.to_string());
        blocks.push(RCA_UPSTREAM_DEFINITION_LINE.to_string());
        blocks.push(RCA_UPSTREAM_PURPOSE_LINE.to_string());
    }

    if strategy.uses_examples() {
        sections.push(SectionTag::HistoricalExamples);
        blocks.push(RCA_EXAMPLES_HEADER.to_string());
        blocks.push(RCA_EXAMPLES_INTRO_LINE.to_string());
        for (i, ex) in examples.iter().enumerate() {
            let n = i + 1;
            blocks.push(format!("- Historical Incident Summary {n}: {}", ex.summary));
            blocks.push(format!("- Historical Incident Title {n}: {}", ex.title));
            blocks.push(format!(
                "- Historical Incident Root Cause {n}: {}",
                ex.root_cause
            ));
        }
    }

    sections.push(SectionTag::AnsweringFormat);
    blocks.push(RCA_ANSWER_HEADER.to_string());
    blocks.push(RCA_OBJECTIVE1_LINE.to_string());
    blocks.push(RCA_OBJECTIVE2_LINE.to_string());

    sections.push(SectionTag::IncidentDetails);
    blocks.push(RCA_DETAILS_HEADER.to_string());
    blocks.push(format!("- Service: {}", owning_service.name));
    let functionality = owning_service
        .summarized_description
        .as_deref()
        .unwrap_or(&owning_service.description);
    blocks.push(format!("- Functionality: {functionality}"));
    let summary = incident
        .clean_summary
        .as_deref()
        .unwrap_or(&incident.raw_summary);
    blocks.push(format!("- Incident Summary: {summary}"));
    blocks.push(format!("- Incident Title: {}", incident.title));

    if strategy.uses_upstream() {
        sections.push(SectionTag::UpstreamDependencies);
        blocks.push(RCA_UPSTREAM_HEADER.to_string());
        if upstream.is_empty() {
            blocks.push(RCA_NO_UPSTREAM_LINE.to_string());
        } else {
            for (i, (name, description)) in upstream.iter().enumerate() {
                blocks.push(format!("{}. {name} \u{2013} {description}", i + 1));
            }
        }
    }

    Ok(RenderedPrompt::new(join_blocks(&blocks), sections))
}

/// Extracts the first well-formed JSON object anywhere in the response
/// (models wrap it in prose and code fences) and reads the two objectives.
pub fn parse_rca_response(text: &str) -> Result<RcaAnswer, PromptError> {
    let object = first_json_object(text).ok_or(PromptError::NoJson)?;
    let root_cause = field_ci(&object, "Objective1")
        .and_then(Value::as_str)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or(PromptError::MissingField { field: "Objective1" })?
        .to_string();
    let objective2 = field_ci(&object, "Objective2")
        .ok_or(PromptError::MissingField { field: "Objective2" })?;
    let is_dependency_failure = match objective2 {
        Value::Bool(b) => *b,
        Value::String(s) => {
            let norm = s.trim().trim_matches(|c: char| c == '"' || c == '\'');
            if norm.eq_ignore_ascii_case("yes") {
                true
            } else if norm.eq_ignore_ascii_case("no") {
                false
            } else {
                return Err(PromptError::BadLabel { got: s.clone() });
            }
        }
        other => {
            return Err(PromptError::BadLabel {
                got: other.to_string(),
            })
        }
    };
    Ok(RcaAnswer {
        root_cause,
        is_dependency_failure,
    })
}

/// First position where a `{` starts a parseable JSON object. A stream
/// deserializer reads exactly one value and ignores whatever follows, which
/// is what tolerating surrounding prose needs.
fn first_json_object(text: &str) -> Option<Value> {
    for (pos, _) in text.match_indices('{') {
        let mut stream = serde_json::Deserializer::from_str(&text[pos..]).into_iter::<Value>();
        if let Some(Ok(value @ Value::Object(_))) = stream.next() {
            return Some(value);
        }
    }
    None
}

fn field_ci<'v>(object: &'v Value, name: &str) -> Option<&'v Value> {
    let map = object.as_object()?;
    map.get(name)
        .or_else(|| map.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v))
}
