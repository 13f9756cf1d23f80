//! Parsing LLM completions into [`Annotation`] records.
//!
//! Each field is read from the last line that starts with its label, compared
//! case-insensitively. Verbose completions often restate the rubric first, so
//! the final answer block is the one that counts.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::language::UNDETERMINED;
use crate::taxonomy::{Annotation, AnnotationSource, DocumentType, DomainLabel, EducationalScore};

pub const EXPLANATION_LABEL: &str = "Explanation";
pub const SCORE_LABEL: &str = "Educational score";
pub const DOMAIN_LABEL: &str = "Domain";
pub const DOC_TYPE_LABEL: &str = "Document type";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResponseError {
    #[error("missing field {0:?}")]
    MissingField(&'static str),
    #[error("educational score {0} outside 1..=5")]
    ScoreOutOfRange(i64),
    #[error("unknown {0} label {1:?}")]
    UnknownLabel(&'static str, String),
}

/// Parses one completion. `language` is left as `und`; it is filled in from
/// the paragraph text by the pipeline, not by the model.
pub fn parse_llm_response(response: &str, paragraph_id: &str) -> Result<Annotation, ResponseError> {
    let mut explanation = None;
    let mut score = None;
    let mut domain = None;
    let mut doc_type = None;

    for line in response.lines() {
        let line = strip_decoration(line);
        if let Some(v) = labeled_value(line, DOC_TYPE_LABEL) {
            doc_type = Some(v);
        } else if let Some(v) = labeled_value(line, SCORE_LABEL) {
            score = Some(v);
        } else if let Some(v) = labeled_value(line, DOMAIN_LABEL) {
            domain = Some(v);
        } else if let Some(v) = labeled_value(line, EXPLANATION_LABEL) {
            explanation = Some(v);
        }
    }

    let score = score.ok_or(ResponseError::MissingField(SCORE_LABEL))?;
    let domain = domain.ok_or(ResponseError::MissingField(DOMAIN_LABEL))?;
    let doc_type = doc_type.ok_or(ResponseError::MissingField(DOC_TYPE_LABEL))?;

    Ok(Annotation {
        paragraph_id: paragraph_id.to_string(),
        doc_type: parse_doc_type(doc_type)?,
        domain: parse_domain(domain)?,
        edu_score: parse_score(score)?,
        language: UNDETERMINED.to_string(),
        explanation: explanation
            .map(|e| clean_value(e).to_string())
            .filter(|e| !e.is_empty()),
        source: AnnotationSource::Llm,
    })
}

/// Leading list markers (`-`, `3.`, `2)`), markdown emphasis and heading
/// marks.
fn strip_decoration(line: &str) -> &str {
    let marks = |c: char| matches!(c, '*' | '#' | '-' | '>' | '_' | '`') || c.is_whitespace();
    let line = line.trim().trim_start_matches(marks);
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    match line.as_bytes().get(digits) {
        Some(b'.' | b')') if digits > 0 => line[digits + 1..].trim_start_matches(marks),
        _ => line,
    }
}

fn labeled_value<'a>(line: &'a str, label: &str) -> Option<&'a str> {
    let head = line.get(..label.len())?;
    if !head.eq_ignore_ascii_case(label) {
        return None;
    }
    let rest = line[label.len()..].trim_start_matches(['*', '_']).trim_start();
    rest.strip_prefix(':').map(str::trim)
}

fn clean_value(value: &str) -> &str {
    value
        .trim()
        .trim_matches(|c: char| matches!(c, '*' | '_' | '`' | '"' | '\'' | '<' | '>' | '[' | ']') || c.is_whitespace())
        .trim_end_matches('.')
        .trim()
}

/// Lowercases, maps `_`/`-` to spaces, collapses whitespace and drops an
/// enumerator such as `1.` or `2)`.
fn normalize_label(value: &str) -> String {
    let value = clean_value(value);
    let value = match value.find(|c: char| !c.is_ascii_digit()) {
        Some(i) if i > 0 && matches!(value.as_bytes()[i], b'.' | b')') => &value[i + 1..],
        _ => value,
    };
    let mapped: String = value
        .chars()
        .map(|c| {
            if c == '_' || c == '-' {
                ' '
            } else {
                c.to_ascii_lowercase()
            }
        })
        .collect();
    let parts: Vec<&str> = mapped.split_whitespace().collect();
    parts.join(" ")
}

fn parse_doc_type(raw: &str) -> Result<DocumentType, ResponseError> {
    let label = normalize_label(raw);
    let doc_type = match label.as_str() {
        "clinical case" | "clinical case report" | "case report" | "clinicalcase" => DocumentType::ClinicalCase,
        "study" | "research study" | "research" | "original research" => DocumentType::Study,
        "review" | "literature review" | "systematic review" | "narrative review" => DocumentType::Review,
        "other" => DocumentType::Other,
        _ => return Err(ResponseError::UnknownLabel(DOC_TYPE_LABEL, raw.to_string())),
    };
    Ok(doc_type)
}

fn parse_domain(raw: &str) -> Result<DomainLabel, ResponseError> {
    let label = normalize_label(raw);
    let domain = match label.as_str() {
        "clinical" => DomainLabel::Clinical,
        "biomedical" | "bio medical" | "biomedicine" => DomainLabel::Biomedical,
        "other" => DomainLabel::Other,
        _ => return Err(ResponseError::UnknownLabel(DOMAIN_LABEL, raw.to_string())),
    };
    Ok(domain)
}

/// Accepts `4`, `4/5`, `4 points`, `**4**`; anything without a leading
/// integer is an unknown label.
fn parse_score(raw: &str) -> Result<EducationalScore, ResponseError> {
    let value = clean_value(raw);
    let (negative, digits_from) = match value.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, value),
    };
    let end = digits_from
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(digits_from.len());
    let digits = &digits_from[..end];
    if digits.is_empty() {
        return Err(ResponseError::UnknownLabel(SCORE_LABEL, raw.to_string()));
    }
    // Digit strings too long for i64 are certainly out of range.
    let magnitude: i64 = digits.parse().unwrap_or(i64::MAX);
    let value = if negative { -magnitude } else { magnitude };
    u8::try_from(value)
        .ok()
        .and_then(EducationalScore::new)
        .ok_or(ResponseError::ScoreOutOfRange(value))
}
