//! Incident text cleanup: markup removal, stack-trace elision, whitespace
//! normalization. `clean_text` is total and idempotent; it never fails on
//! arbitrary input.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub const STACK_TRACE_MARKER: &str = "[stack trace elided]";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SanitizeOptions {
    /// Maximum run of consecutive stack-frame lines kept verbatim. Longer
    /// runs keep this many lines and gain an elision marker.
    pub stack_trace_limit: usize,
}

impl Default for SanitizeOptions {
    fn default() -> Self {
        SanitizeOptions { stack_trace_limit: 3 }
    }
}

/// Counts of constructs removed from the input, by category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedCounts {
    pub html_tags: usize,
    pub image_tags: usize,
    pub table_blocks: usize,
    pub stack_trace_lines: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub input_chars: usize,
    pub output_chars: usize,
    pub removed: RemovedCounts,
}

fn md_image_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"!\[[^\]]*\]\([^)]*\)").unwrap())
}

fn frame_call_re() -> &'static Regex {
    // `at <identifier chain>(...)`: the chain must contain a dot so that
    // prose like "at noon (approx)" stays untouched.
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^at\s+[A-Za-z_$<][\w$.:<>\[\]/,-]*\.[\w$.:<>\[\]/,-]* ?\(.*\)$").unwrap()
    })
}

fn strip_markdown_images(input: &str, removed: &mut RemovedCounts) -> String {
    let mut out = String::with_capacity(input.len());
    let mut last = 0;
    for m in md_image_re().find_iter(input) {
        out.push_str(&input[last..m.start()]);
        removed.image_tags += 1;
        last = m.end();
    }
    out.push_str(&input[last..]);
    out
}

fn tag_name(tag_body: &str) -> String {
    tag_body
        .trim_start_matches('/')
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

/// Removes HTML tags keeping inner text, `<img>` tags, and whole
/// `<table>...</table>` blocks including their contents.
fn strip_markup(input: &str, removed: &mut RemovedCounts) -> String {
    let bytes = input.as_bytes();
    let mut out = String::with_capacity(input.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            let ch_len = input[i..].chars().next().map_or(1, char::len_utf8);
            out.push_str(&input[i..i + ch_len]);
            i += ch_len;
            continue;
        }
        let rest = &input[i + 1..];
        let looks_like_tag = rest
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '/' || c == '!' || c == '?');
        let close = rest.find('>');
        match (looks_like_tag, close) {
            (true, Some(off)) => {
                let body = &rest[..off];
                let name = tag_name(body);
                if name == "table" && !body.starts_with('/') {
                    // Drop the whole block. An unterminated table runs to
                    // the end of the input.
                    removed.table_blocks += 1;
                    let after_open = i + 1 + off + 1;
                    let block_rest = &input[after_open..];
                    let lower = block_rest.to_ascii_lowercase();
                    if let Some(end_at) = lower.find("</table") {
                        match block_rest[end_at..].find('>') {
                            Some(gt) => i = after_open + end_at + gt + 1,
                            None => i = input.len(),
                        }
                    } else {
                        i = input.len();
                    }
                } else {
                    if name == "img" {
                        removed.image_tags += 1;
                    } else {
                        removed.html_tags += 1;
                    }
                    i = i + 1 + off + 1;
                }
            }
            _ => {
                out.push('<');
                i += 1;
            }
        }
    }
    out
}

fn is_frame_line(line: &str) -> bool {
    let indented = line.starts_with('\t') || line.starts_with("    ");
    let trimmed = line.trim_start();
    if indented && (trimmed.starts_with("File ") || trimmed.starts_with("at ")) {
        return true;
    }
    frame_call_re().is_match(line.trim())
}

fn flush_frame_run<'a>(
    run: &mut Vec<&'a str>,
    out: &mut Vec<&'a str>,
    limit: usize,
    removed: &mut RemovedCounts,
) {
    if run.len() > limit {
        out.extend(run.iter().take(limit));
        removed.stack_trace_lines += run.len() - limit;
        out.push(STACK_TRACE_MARKER);
    } else {
        out.extend(run.iter());
    }
    run.clear();
}

fn elide_stack_traces(input: &str, limit: usize, removed: &mut RemovedCounts) -> String {
    let mut out: Vec<&str> = Vec::new();
    let mut run: Vec<&str> = Vec::new();
    for line in input.lines() {
        if is_frame_line(line) {
            run.push(line);
        } else {
            flush_frame_run(&mut run, &mut out, limit, removed);
            out.push(line);
        }
    }
    flush_frame_run(&mut run, &mut out, limit, removed);
    out.join("\n")
}

fn collapse_whitespace(input: &str) -> String {
    let mut out = String::with_capacity(input.len());
    let mut pending_space = false;
    for ch in input.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(ch);
        }
    }
    out
}

/// Cleans incident prose with the given options. Returns the cleaned text and
/// a report of what was removed. Idempotent: cleaning the output changes
/// nothing and reports zero removals.
pub fn clean_text_with(raw: &str, opts: &SanitizeOptions) -> (String, CleanReport) {
    let mut removed = RemovedCounts::default();
    // Tags first: dropping a tag can complete a split markdown image, never
    // the other way around (image syntax starts with `!`, which the tag
    // scanner already treats as tag-like after `<`).
    let no_tags = strip_markup(raw, &mut removed);
    let no_md = strip_markdown_images(&no_tags, &mut removed);
    let no_traces = elide_stack_traces(&no_md, opts.stack_trace_limit.max(1), &mut removed);
    let text = collapse_whitespace(&no_traces);
    let report = CleanReport {
        input_chars: raw.chars().count(),
        output_chars: text.chars().count(),
        removed,
    };
    (text, report)
}

/// [`clean_text_with`] under default options.
pub fn clean_text(raw: &str) -> (String, CleanReport) {
    clean_text_with(raw, &SanitizeOptions::default())
}
