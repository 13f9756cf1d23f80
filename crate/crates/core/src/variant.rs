//! Dataset variants built from an annotated corpus.
//!
//! Every variant runs the same ordered pipeline per article:
//!
//! 1. quality filter (drop paragraphs below the educational threshold; drop
//!    the article if nothing survives),
//! 2. upsampling predicates evaluated on the surviving paragraphs; the
//!    replication count is the largest factor of any predicate that holds,
//!    or 1,
//! 3. metadata prefixing.
//!
//! Replicated articles are materialized as adjacent copies.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::annotated::{AnnotatedArticle, UnannotatedParagraph};
use crate::article::{Article, License, Paragraph};
use crate::manifest::ManifestEntry;
use crate::taxonomy::{Annotation, DocumentType, DomainLabel, EducationalScore};
use crate::tokens::TokenCounter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariantName {
    BeBase,
    BeEducational,
    BeClinical,
    BeClinicalCase,
    BePrefix,
    BeFrench,
    BeAll,
}

impl VariantName {
    pub const ALL: [VariantName; 7] = [
        VariantName::BeBase,
        VariantName::BeEducational,
        VariantName::BeClinical,
        VariantName::BeClinicalCase,
        VariantName::BePrefix,
        VariantName::BeFrench,
        VariantName::BeAll,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariantName::BeBase => "be_base",
            VariantName::BeEducational => "be_educational",
            VariantName::BeClinical => "be_clinical",
            VariantName::BeClinicalCase => "be_clinical_case",
            VariantName::BePrefix => "be_prefix",
            VariantName::BeFrench => "be_french",
            VariantName::BeAll => "be_all",
        }
    }

    fn filters_quality(self) -> bool {
        matches!(self, VariantName::BeEducational | VariantName::BeAll)
    }

    fn upsamples(self) -> &'static [Upsample] {
        match self {
            VariantName::BeClinical => &[Upsample::Clinical],
            VariantName::BeClinicalCase => &[Upsample::ClinicalCase],
            VariantName::BeFrench => &[Upsample::Language],
            VariantName::BeAll => &[Upsample::Clinical, Upsample::ClinicalCase, Upsample::Language],
            _ => &[],
        }
    }
}

impl fmt::Display for VariantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantName {
    type Err = VariantError;

    /// Accepts `be_all`, `be-all`, `BE-All` and `be-clinicalcase` spellings.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_'))
            .map(|c| c.to_ascii_lowercase())
            .collect();
        VariantName::ALL
            .into_iter()
            .find(|v| v.as_str().replace('_', "") == key)
            .ok_or_else(|| VariantError::InvalidConfig(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Upsample {
    Clinical,
    ClinicalCase,
    Language,
}

/// How "predominantly clinical" is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClinicalMajority {
    /// Strictly more than half of the paragraphs are clinical.
    #[default]
    ParagraphCount,
    /// Strictly more than half of the tokens are in clinical paragraphs.
    TokenWeighted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantConfig {
    pub name: VariantName,
    pub edu_threshold: u8,
    pub replication_factor: u32,
    pub prefix_enabled: bool,
    pub language_target: String,
    pub clinical_rule: ClinicalMajority,
}

impl VariantConfig {
    pub const DEFAULT_EDU_THRESHOLD: u8 = 3;
    pub const DEFAULT_REPLICATION_FACTOR: u32 = 10;
    pub const DEFAULT_LANGUAGE: &'static str = "fr";

    pub fn new(name: VariantName) -> Self {
        VariantConfig {
            name,
            edu_threshold: Self::DEFAULT_EDU_THRESHOLD,
            replication_factor: Self::DEFAULT_REPLICATION_FACTOR,
            prefix_enabled: matches!(name, VariantName::BePrefix | VariantName::BeAll),
            language_target: Self::DEFAULT_LANGUAGE.to_string(),
            clinical_rule: ClinicalMajority::default(),
        }
    }

    pub fn validate(&self) -> Result<(), VariantError> {
        if !(EducationalScore::MIN..=EducationalScore::MAX).contains(&self.edu_threshold) {
            return Err(VariantError::InvalidConfig(format!(
                "edu_threshold {} outside 1..=5",
                self.edu_threshold
            )));
        }
        if self.replication_factor < 1 {
            return Err(VariantError::InvalidConfig(
                "replication_factor must be at least 1".into(),
            ));
        }
        if !crate::taxonomy::is_valid_language_code(&self.language_target) {
            return Err(VariantError::InvalidConfig(format!(
                "language_target {:?} is not a two-letter code",
                self.language_target
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariantError {
    #[error(transparent)]
    UnannotatedParagraph(#[from] UnannotatedParagraph),
    #[error("invalid variant config: {0}")]
    InvalidConfig(String),
}

fn labels(article: &AnnotatedArticle) -> Result<Vec<&Annotation>, VariantError> {
    Ok(article.annotated_paragraphs()?.into_iter().map(|(_, a)| a).collect())
}

/// Keeps the paragraphs scoring at least `threshold`. The result may have no
/// paragraphs; variant construction drops such articles.
pub fn filter_educational(mut article: AnnotatedArticle, threshold: u8) -> Result<AnnotatedArticle, VariantError> {
    article.annotated_paragraphs()?;
    article.retain(|_, a| a.as_ref().is_some_and(|a| a.edu_score.get() >= threshold));
    Ok(article)
}

pub fn is_predominantly_clinical(article: &AnnotatedArticle, rule: ClinicalMajority) -> Result<bool, VariantError> {
    let pairs = article.annotated_paragraphs()?;
    let weight = |p: &Paragraph| match rule {
        ClinicalMajority::ParagraphCount => 1,
        ClinicalMajority::TokenWeighted => p.token_count,
    };
    let total: usize = pairs.iter().map(|(p, _)| weight(p)).sum();
    let clinical: usize = pairs
        .iter()
        .filter(|(_, a)| a.domain == DomainLabel::Clinical)
        .map(|(p, _)| weight(p))
        .sum();
    Ok(total > 0 && 2 * clinical > total)
}

pub fn has_clinical_case(article: &AnnotatedArticle) -> Result<bool, VariantError> {
    Ok(labels(article)?
        .iter()
        .any(|a| a.doc_type == DocumentType::ClinicalCase))
}

pub fn has_language(article: &AnnotatedArticle, code: &str) -> Result<bool, VariantError> {
    Ok(labels(article)?.iter().any(|a| a.language == code))
}

/// Replication count per article: `factor` where `predicate` holds, else 1.
pub fn replicate<'a, I, P>(articles: I, mut predicate: P, factor: u32) -> Result<Vec<ManifestEntry>, VariantError>
where
    I: IntoIterator<Item = &'a AnnotatedArticle>,
    P: FnMut(&AnnotatedArticle) -> Result<bool, VariantError>,
{
    articles
        .into_iter()
        .map(|a| {
            let replication_count = if predicate(a)? { factor.max(1) } else { 1 };
            Ok(ManifestEntry {
                article_id: a.article.article_id.clone(),
                replication_count,
                token_count: a.article.token_count() as u64,
            })
        })
        .collect()
}

/// `<type=review|domain=biomedical|edu=4|lang=en>`
pub fn prefix_line(annotation: &Annotation) -> String {
    format!(
        "<type={}|domain={}|edu={}|lang={}>",
        annotation.doc_type.as_str(),
        annotation.domain.as_str(),
        annotation.edu_score,
        annotation.language
    )
}

/// Puts each paragraph's labels on a first line of its own and recounts tokens.
pub fn prefix_paragraphs(article: &AnnotatedArticle, counter: &dyn TokenCounter) -> Result<Article, VariantError> {
    let paragraphs = article
        .annotated_paragraphs()?
        .into_iter()
        .map(|(p, a)| {
            let text = format!("{}\n{}", prefix_line(a), p.text);
            Paragraph {
                paragraph_id: p.paragraph_id.clone(),
                token_count: counter.count(&text),
                section_path: p.section_path.clone(),
                text,
            }
        })
        .collect();
    Ok(Article {
        paragraphs,
        ..article.article.clone()
    })
}

/// Inverse of prefixing: the text after the label line, if there is one.
pub fn strip_prefix(text: &str) -> Option<&str> {
    if !text.starts_with("<type=") {
        return None;
    }
    let (first, rest) = text.split_once('\n')?;
    first.ends_with('>').then_some(rest)
}

/// Runs the variant pipeline on one article. `None` means the article is not
/// part of the variant.
pub fn transform_article(
    config: &VariantConfig,
    mut article: AnnotatedArticle,
    counter: &dyn TokenCounter,
) -> Result<Option<(Article, u32)>, VariantError> {
    if config.name.filters_quality() {
        article = filter_educational(article, config.edu_threshold)?;
        if article.article.paragraphs.is_empty() {
            return Ok(None);
        }
    }

    let mut replication_count = 1;
    for upsample in config.name.upsamples() {
        let holds = match upsample {
            Upsample::Clinical => is_predominantly_clinical(&article, config.clinical_rule)?,
            Upsample::ClinicalCase => has_clinical_case(&article)?,
            Upsample::Language => has_language(&article, &config.language_target)?,
        };
        if holds {
            replication_count = replication_count.max(config.replication_factor);
        }
    }

    let output = if config.prefix_enabled {
        prefix_paragraphs(&article, counter)?
    } else {
        article.article
    };
    if output.paragraphs.is_empty() {
        return Ok(None);
    }
    Ok(Some((output, replication_count)))
}

/// A variant held in memory: the ledger plus every materialized document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltVariant {
    pub entries: Vec<ManifestEntry>,
    pub documents: Vec<Article>,
}

pub fn build_variant<I>(
    config: &VariantConfig,
    corpus: I,
    counter: &dyn TokenCounter,
) -> Result<BuiltVariant, VariantError>
where
    I: IntoIterator<Item = AnnotatedArticle>,
{
    config.validate()?;
    let mut built = BuiltVariant {
        entries: Vec::new(),
        documents: Vec::new(),
    };
    for article in corpus {
        if let Some((doc, copies)) = transform_article(config, article, counter)? {
            built.entries.push(ManifestEntry {
                article_id: doc.article_id.clone(),
                replication_count: copies,
                token_count: doc.token_count() as u64,
            });
            for _ in 1..copies {
                built.documents.push(doc.clone());
            }
            built.documents.push(doc);
        }
    }
    Ok(built)
}

/// Which clinical-case paragraphs to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClinicalSubsetFilter {
    pub min_score: u8,
    pub require_commercial: bool,
}

impl Default for ClinicalSubsetFilter {
    fn default() -> Self {
        ClinicalSubsetFilter {
            min_score: 4,
            require_commercial: true,
        }
    }
}

/// Clinical-case paragraphs, optionally restricted by score and license.
/// Unannotated paragraphs are never selected.
pub fn extract_clinical_subset<'a, I>(corpus: I, filter: ClinicalSubsetFilter) -> Vec<(Paragraph, Annotation)>
where
    I: IntoIterator<Item = &'a AnnotatedArticle>,
{
    corpus
        .into_iter()
        .filter(|a| !filter.require_commercial || a.article.license == License::CommercialOk)
        .flat_map(|a| a.article.paragraphs.iter().zip(&a.annotations))
        .filter_map(|(p, a)| {
            let a = a.as_ref()?;
            (a.doc_type == DocumentType::ClinicalCase && a.edu_score.get() >= filter.min_score)
                .then(|| (p.clone(), a.clone()))
        })
        .collect()
}
