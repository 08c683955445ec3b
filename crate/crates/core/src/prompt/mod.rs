//! Deterministic prompt rendering for the two pipelines and parsing of the
//! model responses into typed answers.

pub mod monitor;
pub mod rca;
pub mod templates;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::content_hash;
pub use monitor::{
    build_monitor_prompt, build_monitor_prompt_with, parse_monitor_response, ClassAnswer,
};
pub use rca::{build_rca_prompt, parse_rca_response, RcaAnswer, RcaExample};
pub use templates::TEMPLATE_VERSION;

/// Prompting strategies for root cause analysis. In-context variants carry
/// retrieved historical examples; DEP variants carry upstream dependency
/// descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RcaStrategy {
    #[serde(rename = "NoDEP")]
    NoDep,
    #[serde(rename = "DEP")]
    Dep,
    #[serde(rename = "InC_NoDEP")]
    InCNoDep,
    #[serde(rename = "InC_DEP")]
    InCDep,
}

impl RcaStrategy {
    pub const ALL: [RcaStrategy; 4] = [
        RcaStrategy::NoDep,
        RcaStrategy::Dep,
        RcaStrategy::InCNoDep,
        RcaStrategy::InCDep,
    ];

    pub fn uses_examples(self) -> bool {
        matches!(self, RcaStrategy::InCNoDep | RcaStrategy::InCDep)
    }

    pub fn uses_upstream(self) -> bool {
        matches!(self, RcaStrategy::Dep | RcaStrategy::InCDep)
    }
}

impl fmt::Display for RcaStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RcaStrategy::NoDep => "NoDEP",
            RcaStrategy::Dep => "DEP",
            RcaStrategy::InCNoDep => "InC NoDEP",
            RcaStrategy::InCDep => "InC DEP",
        })
    }
}

impl FromStr for RcaStrategy {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "nodep" => Ok(RcaStrategy::NoDep),
            "dep" => Ok(RcaStrategy::Dep),
            "incnodep" => Ok(RcaStrategy::InCNoDep),
            "incdep" => Ok(RcaStrategy::InCDep),
            _ => Err(PromptError::UnknownStrategy { got: s.to_string() }),
        }
    }
}

/// Context configurations for monitor classification: C1 metadata only,
/// C2 adds the service description, C3 adds service plus component
/// descriptions, C4 component descriptions only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonitorCase {
    C1,
    C2,
    C3,
    C4,
}

impl MonitorCase {
    pub const ALL: [MonitorCase; 4] = [
        MonitorCase::C1,
        MonitorCase::C2,
        MonitorCase::C3,
        MonitorCase::C4,
    ];

    pub fn includes_service_description(self) -> bool {
        matches!(self, MonitorCase::C2 | MonitorCase::C3)
    }

    pub fn includes_components(self) -> bool {
        matches!(self, MonitorCase::C3 | MonitorCase::C4)
    }
}

impl fmt::Display for MonitorCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonitorCase::C1 => "C1",
            MonitorCase::C2 => "C2",
            MonitorCase::C3 => "C3",
            MonitorCase::C4 => "C4",
        })
    }
}

impl FromStr for MonitorCase {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "C1" | "1" => Ok(MonitorCase::C1),
            "C2" | "2" => Ok(MonitorCase::C2),
            "C3" | "3" => Ok(MonitorCase::C3),
            "C4" | "4" => Ok(MonitorCase::C4),
            _ => Err(PromptError::UnknownCase { got: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionTag {
    TaskDescription,
    HistoricalExamples,
    AnsweringFormat,
    IncidentDetails,
    UpstreamDependencies,
    AdditionalGuidance,
    MonitorMetadata,
    ServiceDescription,
    ComponentDescriptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPrompt {
    pub text: String,
    pub sections: Vec<SectionTag>,
    /// Hash over the template version and the rendered text, so a template
    /// revision invalidates recorded runs even when the bytes happen to
    /// collide.
    pub hash: u64,
}

impl RenderedPrompt {
    pub(crate) fn new(text: String, sections: Vec<SectionTag>) -> Self {
        let hash = content_hash(format!("{TEMPLATE_VERSION}\u{0}{text}").as_bytes());
        RenderedPrompt { text, sections, hash }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("strategy {strategy} requires retrieved examples but none were provided")]
    MissingExamples { strategy: RcaStrategy },
    #[error("response contains no JSON object")]
    NoJson,
    #[error("JSON answer is missing field {field}")]
    MissingField { field: &'static str },
    #[error("Objective2 must be Yes or No, got {got:?}")]
    BadLabel { got: String },
    #[error("unknown strategy {got:?} (expected NoDEP, DEP, InC_NoDEP, or InC_DEP)")]
    UnknownStrategy { got: String },
    #[error("unknown case {got:?} (expected C1, C2, C3, or C4)")]
    UnknownCase { got: String },
}

impl PromptError {
    /// Short machine-readable kind, recorded in run records.
    pub fn kind(&self) -> &'static str {
        match self {
            PromptError::MissingExamples { .. } => "missing_examples",
            PromptError::NoJson => "no_json",
            PromptError::MissingField { .. } => "missing_field",
            PromptError::BadLabel { .. } => "bad_label",
            PromptError::UnknownStrategy { .. } => "unknown_strategy",
            PromptError::UnknownCase { .. } => "unknown_case",
        }
    }
}

/// Joins prompt blocks with blank lines and a trailing newline; every
/// rendered prompt goes through this so spacing stays uniform.
pub(crate) fn join_blocks(blocks: &[String]) -> String {
    let mut text = blocks.join("\n\n");
    text.push('\n');
    text
}
