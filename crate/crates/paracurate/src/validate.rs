//! Schema and invariant checks for any shard directory the pipeline reads or
//! writes.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use paracurate_core::article::paragraph_id;
use paracurate_core::manifest::{content_hash, total_tokens};
use paracurate_core::taxonomy::is_valid_language_code;
use paracurate_core::{strip_prefix, Annotation, Article, DatasetManifest, TokenCounter, TrainingDocument};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{io_err, Error};
use crate::shards::{read_records, sha256_file, shard_files};
use crate::variants::MANIFEST_FILE;

const MAX_REPORTED: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShardKind {
    Corpus,
    Annotations,
    Variant,
    Packed,
    Empty,
}

impl fmt::Display for ShardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShardKind::Corpus => "corpus",
            ShardKind::Annotations => "annotations",
            ShardKind::Variant => "variant",
            ShardKind::Packed => "packed",
            ShardKind::Empty => "empty",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub min_tokens: usize,
    pub context_budget: usize,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub kind: ShardKind,
    pub files: usize,
    pub records: u64,
    pub error_count: usize,
    /// The first few problems, one line each.
    pub errors: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.error_count == 0
    }

    fn fail(&mut self, message: String) {
        self.error_count += 1;
        if self.errors.len() < MAX_REPORTED {
            self.errors.push(message);
        }
    }
}

/// True if `text` contains something shaped like an XML tag.
pub fn has_markup(text: &str) -> bool {
    let bytes = text.as_bytes();
    bytes.iter().enumerate().any(|(i, &b)| {
        if b != b'<' {
            return false;
        }
        let rest = &bytes[i + 1..];
        let start = usize::from(rest.first() == Some(&b'/'));
        if !rest.get(start).is_some_and(u8::is_ascii_alphabetic) {
            return false;
        }
        let name_end = rest[start..]
            .iter()
            .position(|c| !(c.is_ascii_alphanumeric() || matches!(c, b'-' | b'_' | b':' | b'.')))
            .map_or(rest.len(), |p| p + start);
        match rest.get(name_end) {
            Some(b'>') => true,
            Some(b'/') => rest.get(name_end + 1) == Some(&b'>'),
            Some(c) if c.is_ascii_whitespace() => {
                let attr = &rest[name_end + 1..];
                let attr_end = attr
                    .iter()
                    .position(|c| !(c.is_ascii_alphanumeric() || matches!(c, b'-' | b'_' | b':')))
                    .unwrap_or(attr.len());
                attr_end > 0 && attr.get(attr_end) == Some(&b'=')
            }
            _ => false,
        }
    })
}

fn detect_kind(path: &Path) -> Result<ShardKind, Error> {
    if path.is_dir() && path.join(MANIFEST_FILE).is_file() {
        return Ok(ShardKind::Variant);
    }
    for file in shard_files(path)? {
        if let Some(first) = read_records::<Value>(&file)?.next() {
            let value = first?;
            let has = |k: &str| value.get(k).is_some();
            return Ok(if has("paragraphs") {
                ShardKind::Corpus
            } else if has("doc_type") && has("edu_score") {
                ShardKind::Annotations
            } else if has("window_index") {
                ShardKind::Packed
            } else {
                return Err(Error::Invalid(format!(
                    "{}: records match no known shard schema",
                    file.display()
                )));
            });
        }
    }
    Ok(ShardKind::Empty)
}

fn each_record<T, F>(path: &Path, report: &mut ValidationReport, mut check: F) -> Result<(), Error>
where
    T: DeserializeOwned,
    F: FnMut(T, &mut ValidationReport),
{
    let files = shard_files(path)?;
    report.files = files.len();
    for file in files {
        for record in read_records::<T>(&file)? {
            report.records += 1;
            match record {
                Ok(r) => check(r, report),
                Err(Error::Json { path, line, source }) => report.fail(format!("{}:{line}: {source}", path.display())),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

fn check_paragraphs(
    a: &Article,
    counter: &dyn TokenCounter,
    prefixed: bool,
    min_tokens: Option<usize>,
    report: &mut ValidationReport,
) {
    if a.article_id.is_empty() {
        report.fail("article with empty article_id".into());
    }
    if a.paragraphs.is_empty() {
        report.fail(format!("{}: article has no paragraphs", a.article_id));
    }
    for (i, p) in a.paragraphs.iter().enumerate() {
        let expected = counter.count(&p.text);
        if p.token_count != expected {
            report.fail(format!(
                "{}: token_count {} but text has {expected} tokens",
                p.paragraph_id, p.token_count
            ));
        }
        if let Some(min) = min_tokens {
            if p.token_count < min {
                report.fail(format!(
                    "{}: {} tokens, below minimum {min}",
                    p.paragraph_id, p.token_count
                ));
            }
            if p.paragraph_id != paragraph_id(&a.article_id, i) {
                report.fail(format!(
                    "{}: expected paragraph id {}",
                    p.paragraph_id,
                    paragraph_id(&a.article_id, i)
                ));
            }
        } else if !p.paragraph_id.starts_with(&format!("{}-p", a.article_id)) {
            report.fail(format!(
                "{}: paragraph id does not belong to {}",
                p.paragraph_id, a.article_id
            ));
        }
        let body = if prefixed {
            strip_prefix(&p.text).unwrap_or(&p.text)
        } else {
            &p.text
        };
        if has_markup(body) {
            report.fail(format!("{}: text contains markup", p.paragraph_id));
        }
    }
}

fn validate_corpus(
    path: &Path,
    options: ValidateOptions,
    counter: &dyn TokenCounter,
    report: &mut ValidationReport,
) -> Result<(), Error> {
    let mut last: Option<String> = None;
    each_record::<Article, _>(path, report, |a, report| {
        if let Some(prev) = &last {
            if a.article_id <= *prev {
                report.fail(format!(
                    "{}: article ids not strictly ascending after {prev}",
                    a.article_id
                ));
            }
        }
        check_paragraphs(&a, counter, false, Some(options.min_tokens), report);
        last = Some(a.article_id);
    })
}

fn validate_annotations(path: &Path, report: &mut ValidationReport) -> Result<(), Error> {
    let mut seen = HashSet::new();
    each_record::<Annotation, _>(path, report, |a, report| {
        if !is_valid_language_code(&a.language) {
            report.fail(format!("{}: invalid language code {:?}", a.paragraph_id, a.language));
        }
        if a.paragraph_id.is_empty() {
            report.fail("annotation with empty paragraph_id".into());
        }
        if !seen.insert(a.paragraph_id.clone()) {
            report.fail(format!("{}: duplicate annotation", a.paragraph_id));
        }
    })
}

fn validate_variant(path: &Path, counter: &dyn TokenCounter, report: &mut ValidationReport) -> Result<(), Error> {
    let manifest_path = path.join(MANIFEST_FILE);
    let bytes = fs::read(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: DatasetManifest = serde_json::from_slice(&bytes).map_err(|source| Error::Json {
        path: manifest_path.clone(),
        line: 0,
        source,
    })?;
    if manifest.token_counter != counter.id() {
        report.fail(format!(
            "manifest counted with {}, validating with {}",
            manifest.token_counter,
            counter.id()
        ));
    }
    if manifest.total_tokens != total_tokens(&manifest.entries) {
        report.fail("manifest total_tokens disagrees with its entries".into());
    }
    if manifest.content_hash != content_hash(&manifest.entries) {
        report.fail("manifest content_hash disagrees with its entries".into());
    }
    for shard in &manifest.shards {
        let file = path.join(&shard.file);
        if !file.is_file() {
            report.fail(format!("listed shard {} is missing", shard.file));
        } else if sha256_file(&file)? != shard.sha256 {
            report.fail(format!("shard {} does not match its recorded sha256", shard.file));
        }
    }

    // Adjacent identical documents form one replicated run.
    let mut runs: Vec<(Article, u32)> = Vec::new();
    let mut recount: u64 = 0;
    each_record::<Article, _>(path, report, |a, report| {
        check_paragraphs(&a, counter, true, None, report);
        recount += a.paragraphs.iter().map(|p| counter.count(&p.text) as u64).sum::<u64>();
        match runs.last_mut() {
            Some((prev, n)) if prev.article_id == a.article_id => {
                if *prev != a {
                    report.fail(format!("{}: replicated copies differ", a.article_id));
                }
                *n += 1;
            }
            Some((prev, _)) if prev.article_id > a.article_id => {
                report.fail(format!("{}: documents out of article_id order", a.article_id));
                runs.push((a, 1));
            }
            _ => runs.push((a, 1)),
        }
    })?;
    if recount != manifest.total_tokens {
        report.fail(format!(
            "shards hold {recount} tokens, manifest says {}",
            manifest.total_tokens
        ));
    }
    if runs.len() != manifest.entries.len() {
        report.fail(format!(
            "{} articles in shards, {} in manifest",
            runs.len(),
            manifest.entries.len()
        ));
    }
    for ((article, copies), entry) in runs.iter().zip(&manifest.entries) {
        if article.article_id != entry.article_id || *copies != entry.replication_count {
            report.fail(format!(
                "{} x{copies} in shards, manifest has {} x{}",
                article.article_id, entry.article_id, entry.replication_count
            ));
        } else if article.token_count() as u64 != entry.token_count {
            report.fail(format!("{}: manifest token_count mismatch", entry.article_id));
        }
    }
    Ok(())
}

fn validate_packed(
    path: &Path,
    options: ValidateOptions,
    counter: &dyn TokenCounter,
    report: &mut ValidationReport,
) -> Result<(), Error> {
    let mut seen = HashSet::new();
    each_record::<TrainingDocument, _>(path, report, |d, report| {
        let tokens = counter.count(&d.text);
        if tokens != d.token_count {
            report.fail(format!(
                "{}#{}: token_count {} but text has {tokens}",
                d.article_id, d.window_index, d.token_count
            ));
        }
        if d.token_count > options.context_budget {
            report.fail(format!(
                "{}#{}: {} tokens exceed budget {}",
                d.article_id, d.window_index, d.token_count, options.context_budget
            ));
        }
        if !seen.insert((d.article_id.clone(), d.window_index)) {
            report.fail(format!("{}#{}: duplicate window", d.article_id, d.window_index));
        }
    })
}

/// Detects what `path` holds (corpus, annotations, variant or packed
/// windows) and checks it.
pub fn validate_path(
    path: &Path,
    options: ValidateOptions,
    counter: &dyn TokenCounter,
) -> Result<ValidationReport, Error> {
    if !path.exists() {
        return Err(Error::Invalid(format!("{} does not exist", path.display())));
    }
    let kind = detect_kind(path)?;
    let mut report = ValidationReport {
        kind,
        files: 0,
        records: 0,
        error_count: 0,
        errors: Vec::new(),
    };
    match kind {
        ShardKind::Corpus => validate_corpus(path, options, counter, &mut report)?,
        ShardKind::Annotations => validate_annotations(path, &mut report)?,
        ShardKind::Variant => validate_variant(path, counter, &mut report)?,
        ShardKind::Packed => validate_packed(path, options, counter, &mut report)?,
        ShardKind::Empty => report.files = shard_files(path)?.len(),
    }
    Ok(report)
}
