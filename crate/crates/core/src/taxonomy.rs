//! Paragraph label taxonomy and the annotation record.

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

/// What kind of writing a paragraph is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentType {
    ClinicalCase,
    Study,
    Review,
    Other,
}

impl DocumentType {
    pub const ALL: [DocumentType; 4] = [
        DocumentType::ClinicalCase,
        DocumentType::Study,
        DocumentType::Review,
        DocumentType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DocumentType::ClinicalCase => "clinical_case",
            DocumentType::Study => "study",
            DocumentType::Review => "review",
            DocumentType::Other => "other",
        }
    }

    /// The label as the annotation prompt spells it.
    pub fn display_name(self) -> &'static str {
        match self {
            DocumentType::ClinicalCase => "Clinical case",
            DocumentType::Study => "Study",
            DocumentType::Review => "Review",
            DocumentType::Other => "Other",
        }
    }
}

/// Subject area of a paragraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainLabel {
    Clinical,
    Biomedical,
    Other,
}

impl DomainLabel {
    pub const ALL: [DomainLabel; 3] = [DomainLabel::Clinical, DomainLabel::Biomedical, DomainLabel::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            DomainLabel::Clinical => "clinical",
            DomainLabel::Biomedical => "biomedical",
            DomainLabel::Other => "other",
        }
    }
}

/// Educational value on the additive 1..=5 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct EducationalScore(u8);

impl EducationalScore {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 5;

    pub fn new(value: u8) -> Option<Self> {
        (Self::MIN..=Self::MAX)
            .contains(&value)
            .then_some(EducationalScore(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = EducationalScore> {
        (Self::MIN..=Self::MAX).map(EducationalScore)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreRangeError(pub u8);

impl fmt::Display for ScoreRangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "educational score {} outside 1..=5", self.0)
    }
}

impl TryFrom<u8> for EducationalScore {
    type Error = ScoreRangeError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        EducationalScore::new(value).ok_or(ScoreRangeError(value))
    }
}

impl From<EducationalScore> for u8 {
    fn from(score: EducationalScore) -> u8 {
        score.0
    }
}

impl fmt::Display for EducationalScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Who produced an annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationSource {
    Llm,
    Distilled,
    Fixture,
}

/// Predicted labels for one paragraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub paragraph_id: String,
    pub doc_type: DocumentType,
    pub domain: DomainLabel,
    pub edu_score: EducationalScore,
    pub language: String,
    pub explanation: Option<String>,
    pub source: AnnotationSource,
}

/// Two lowercase ASCII letters, or `und`.
pub fn is_valid_language_code(code: &str) -> bool {
    code == crate::language::UNDETERMINED || (code.len() == 2 && code.bytes().all(|b| b.is_ascii_lowercase()))
}
