//! Materializing variants, clinical subsets and packed windows on disk.

use std::path::Path;

use paracurate_core::manifest::ManifestEntry;
use paracurate_core::variant::transform_article;
use paracurate_core::{
    extract_clinical_subset, pack_article, write_manifest, Annotation, Article, ClinicalSubsetFilter, DatasetManifest,
    License, Paragraph, ShardRecord, TokenCounter, VariantConfig,
};
use serde::{Deserialize, Serialize};

use crate::corpus::for_each_joined;
use crate::error::Error;
use crate::shards::{read_dir_records, write_json, ShardWriter, DOCUMENT_PREFIX, PACKED_PREFIX};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Builds one variant into `output`: document shards (replicated copies
/// adjacent, in `article_id` order) plus `manifest.json`.
pub fn build_variant_dir(
    config: &VariantConfig,
    corpus_dir: &Path,
    annotation_dir: &Path,
    output: &Path,
    counter: &dyn TokenCounter,
    shard_size: usize,
) -> Result<DatasetManifest, Error> {
    config.validate()?;
    let mut writer = ShardWriter::create(output, DOCUMENT_PREFIX, shard_size)?;
    let mut entries = Vec::new();
    for_each_joined(corpus_dir, annotation_dir, |article| {
        if let Some((doc, copies)) = transform_article(config, article, counter)? {
            for _ in 0..copies {
                writer.write(&doc)?;
            }
            entries.push(ManifestEntry {
                article_id: doc.article_id.clone(),
                replication_count: copies,
                token_count: doc.token_count() as u64,
            });
        }
        Ok(())
    })?;
    let shards = writer.finish()?;
    let manifest = write_manifest(config.name.as_str(), entries, shards, counter.id())?;
    write_json(&output.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// One extracted clinical-case paragraph with its labels and provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClinicalCaseRecord {
    pub article_id: String,
    pub license: License,
    #[serde(flatten)]
    pub paragraph: Paragraph,
    pub doc_type: paracurate_core::DocumentType,
    pub domain: paracurate_core::DomainLabel,
    pub edu_score: paracurate_core::EducationalScore,
    pub language: String,
}

impl ClinicalCaseRecord {
    fn new(article: &Article, paragraph: Paragraph, annotation: Annotation) -> Self {
        ClinicalCaseRecord {
            article_id: article.article_id.clone(),
            license: article.license,
            paragraph,
            doc_type: annotation.doc_type,
            domain: annotation.domain,
            edu_score: annotation.edu_score,
            language: annotation.language,
        }
    }
}

/// Writes the selected clinical-case paragraphs to `output` shards and
/// returns how many were written.
pub fn extract_clinical_dir(
    corpus_dir: &Path,
    annotation_dir: &Path,
    filter: ClinicalSubsetFilter,
    output: &Path,
    shard_size: usize,
) -> Result<u64, Error> {
    let mut writer = ShardWriter::create(output, "clinical-cases", shard_size)?;
    let mut written = 0;
    for_each_joined(corpus_dir, annotation_dir, |article| {
        for (p, a) in extract_clinical_subset([&article], filter) {
            writer.write(&ClinicalCaseRecord::new(&article.article, p, a))?;
            written += 1;
        }
        Ok(())
    })?;
    writer.finish()?;
    Ok(written)
}

/// Packs every document of a variant directory into training windows.
///
/// Window indices run on across adjacent copies of a replicated article, so
/// `(article_id, window_index)` stays unique in the output.
pub fn pack_dir(
    input: &Path,
    output: &Path,
    budget: usize,
    counter: &dyn TokenCounter,
    shard_size: usize,
) -> Result<Vec<ShardRecord>, Error> {
    let mut writer = ShardWriter::create(output, PACKED_PREFIX, shard_size)?;
    let mut last_article: Option<String> = None;
    let mut next_index = 0;
    for article in read_dir_records::<Article>(input)? {
        let article = article?;
        if last_article.as_deref() != Some(article.article_id.as_str()) {
            next_index = 0;
            last_article = Some(article.article_id.clone());
        }
        let windows = pack_article(&article, budget, counter);
        let count = windows.len();
        for mut window in windows {
            window.window_index += next_index;
            writer.write(&window)?;
        }
        next_index += count;
    }
    writer.finish()
}
