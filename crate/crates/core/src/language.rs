//! Language identification contract.

use alloc::string::{String, ToString};

use thiserror::Error;

use crate::taxonomy::is_valid_language_code;

/// Code for text whose language cannot be decided.
pub const UNDETERMINED: &str = "und";

/// A language identifier. Implementations return an ISO 639-1 code, or `None`
/// when they cannot decide.
pub trait LanguageDetector: Sync {
    fn id(&self) -> &str;
    fn detect(&self, text: &str) -> Option<&'static str>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LanguageError {
    #[error("text is empty")]
    EmptyText,
}

/// Runs `detector` on `text`, normalizing anything that is not a valid
/// two-letter code to `und`. Text without a single letter is `und` without
/// consulting the detector.
pub fn detect_language(detector: &dyn LanguageDetector, text: &str) -> Result<String, LanguageError> {
    if text.is_empty() {
        return Err(LanguageError::EmptyText);
    }
    if !text.chars().any(char::is_alphabetic) {
        return Ok(UNDETERMINED.to_string());
    }
    Ok(match detector.detect(text) {
        Some(code) if is_valid_language_code(code) => code.to_string(),
        _ => UNDETERMINED.to_string(),
    })
}
