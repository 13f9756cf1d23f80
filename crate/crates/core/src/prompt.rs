//! The paragraph annotation prompt.

use alloc::string::String;

use thiserror::Error;

/// Annotation instructions, stored byte-for-byte as published.
pub const PROMPT_TEMPLATE: &str = include_str!("../assets/annotation_prompt.txt");

/// Template version recorded alongside LLM annotations.
pub const PROMPT_VERSION: &str = "annotation-prompt-v1";

/// The extract goes immediately before this line of the template.
const INSERT_BEFORE: &str = "After examining the extract:";
const EXTRACT_HEADER: &str = "The extract:\n";
const EXTRACT_TRAILER: &str = "\n\n";

/// Bytes added around the extract on top of the template.
pub const SEPARATOR_LEN: usize = EXTRACT_HEADER.len() + EXTRACT_TRAILER.len();

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("extract is empty")]
    EmptyExtract,
}

fn insertion_offset() -> usize {
    PROMPT_TEMPLATE
        .find(INSERT_BEFORE)
        .expect("prompt template lost its closing instructions")
}

/// Renders the annotation prompt for one paragraph.
///
/// The template's closing output-format instructions are left untouched and
/// remain the last lines of the prompt.
pub fn build_prompt(extract: &str) -> Result<String, PromptError> {
    if extract.is_empty() {
        return Err(PromptError::EmptyExtract);
    }
    let (head, tail) = PROMPT_TEMPLATE.split_at(insertion_offset());
    let mut prompt = String::with_capacity(PROMPT_TEMPLATE.len() + extract.len() + SEPARATOR_LEN);
    prompt.push_str(head);
    prompt.push_str(EXTRACT_HEADER);
    prompt.push_str(extract);
    prompt.push_str(EXTRACT_TRAILER);
    prompt.push_str(tail);
    Ok(prompt)
}
