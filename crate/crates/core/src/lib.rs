//! Pure building blocks for curating paragraph-annotated biomedical corpora.
//!
//! Everything in this crate works on in-memory values and needs only an
//! allocator: token counting, the article/paragraph model, the annotation
//! taxonomy, prompt construction and response parsing, annotation sampling,
//! dataset-variant construction, context-window packing, score statistics and
//! manifest hashing. File formats, XML parsing and the command line live in the
//! `paracurate` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod annotated;
pub mod article;
pub mod language;
pub mod manifest;
pub mod pack;
pub mod prompt;
pub mod response;
pub mod sample;
pub mod stats;
pub mod taxonomy;
pub mod tokens;
pub mod variant;

pub use annotated::{AnnotatedArticle, AnnotationJoiner, JoinError, UnannotatedParagraph};
pub use article::{segment_and_filter, Article, License, Paragraph, DEFAULT_MIN_TOKENS};
pub use language::{detect_language, LanguageDetector, LanguageError, UNDETERMINED};
pub use manifest::{write_manifest, DatasetManifest, ManifestEntry, ManifestError, ShardRecord};
pub use pack::{pack_article, TrainingDocument, DEFAULT_CONTEXT_BUDGET};
pub use prompt::{build_prompt, PromptError, PROMPT_TEMPLATE};
pub use response::{parse_llm_response, ResponseError};
pub use sample::sample_for_annotation;
pub use stats::{score_distribution, GroupBy, Rational, ScoreDistribution, ScoreTally, StatsError};
pub use taxonomy::{Annotation, AnnotationSource, DocumentType, DomainLabel, EducationalScore};
pub use tokens::{count_tokens, TokenCounter, WhitespaceCounter};
pub use variant::{
    build_variant, extract_clinical_subset, filter_educational, has_clinical_case, has_language,
    is_predominantly_clinical, prefix_paragraphs, replicate, strip_prefix, BuiltVariant, ClinicalMajority,
    ClinicalSubsetFilter, VariantConfig, VariantError, VariantName,
};
