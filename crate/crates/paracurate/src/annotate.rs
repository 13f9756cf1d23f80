//! Annotation-side IO: picking paragraphs for the LLM and turning its
//! completions into annotation records.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use paracurate_core::{build_prompt, detect_language, parse_llm_response, sample_for_annotation, LanguageDetector};
use serde::{Deserialize, Serialize};

use crate::corpus::read_corpus;
use crate::error::{io_err, Error};
use crate::shards::read_records;

/// One paragraph queued for LLM annotation, with its ready-to-send prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub paragraph_id: String,
    pub article_id: String,
    pub text: String,
    pub prompt: String,
}

/// One LLM completion for a paragraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub paragraph_id: String,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedResponse {
    pub paragraph_id: String,
    pub error: String,
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<u64, Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    let mut n = 0;
    for record in records {
        serde_json::to_writer(&mut out, &record).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            line: n as usize + 1,
            source,
        })?;
        out.write_all(b"\n").map_err(io_err(path))?;
        n += 1;
    }
    out.flush().map_err(io_err(path))?;
    Ok(n)
}

/// Draws the annotation sample from a corpus directory. Two passes: ids
/// first, then texts of the chosen paragraphs.
pub fn sample_corpus(corpus_dir: &Path, n: usize, seed: u64) -> Result<Vec<SampleRecord>, Error> {
    let mut articles = Vec::new();
    for article in read_corpus(corpus_dir)? {
        let article = article?;
        let ids = article.paragraphs.iter().map(|p| p.paragraph_id.clone()).collect();
        articles.push((article.article_id, ids));
    }
    let chosen = sample_for_annotation(articles, n, seed);
    let wanted: HashSet<&str> = chosen.iter().map(String::as_str).collect();

    let mut found: HashMap<String, SampleRecord> = HashMap::with_capacity(chosen.len());
    for article in read_corpus(corpus_dir)? {
        let article = article?;
        for p in article.paragraphs {
            if wanted.contains(p.paragraph_id.as_str()) {
                let prompt = build_prompt(&p.text).map_err(|e| Error::Invalid(format!("{}: {e}", p.paragraph_id)))?;
                found.insert(
                    p.paragraph_id.clone(),
                    SampleRecord {
                        paragraph_id: p.paragraph_id,
                        article_id: article.article_id.clone(),
                        text: p.text,
                        prompt,
                    },
                );
            }
        }
    }
    Ok(chosen.iter().filter_map(|id| found.remove(id)).collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseSummary {
    pub parsed: u64,
    pub rejected: u64,
}

/// `annotations.jsonl` → `annotations.rejected.ndjson`. Not `.jsonl`, so a
/// rejected file next to annotation shards is never read as one.
pub fn rejected_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}.rejected.ndjson"))
}

/// Parses every completion in `input`. Good ones go to `output` as
/// annotation records; failures go to the rejected file beside it with the
/// structured error. When `corpus` is given, each annotation's language is
/// detected from its paragraph text; otherwise it is `und`.
pub fn parse_responses(
    input: &Path,
    output: &Path,
    corpus: Option<&Path>,
    detector: &dyn LanguageDetector,
) -> Result<ParseSummary, Error> {
    let texts: HashMap<String, String> = match corpus {
        Some(dir) => {
            let mut texts = HashMap::new();
            for article in read_corpus(dir)? {
                for p in article?.paragraphs {
                    texts.insert(p.paragraph_id, p.text);
                }
            }
            texts
        }
        None => HashMap::new(),
    };

    let mut annotations = Vec::new();
    let mut rejected = Vec::new();
    for record in read_records::<ResponseRecord>(input)? {
        let record = record?;
        match parse_llm_response(&record.response, &record.paragraph_id) {
            Ok(mut annotation) => {
                if let Some(text) = texts.get(&record.paragraph_id) {
                    annotation.language = detect_language(detector, text)
                        .map_err(|e| Error::Invalid(format!("{}: {e}", record.paragraph_id)))?;
                } else if corpus.is_some() {
                    rejected.push(RejectedResponse {
                        paragraph_id: record.paragraph_id,
                        error: "paragraph not in corpus".into(),
                    });
                    continue;
                }
                annotations.push(annotation);
            }
            Err(e) => rejected.push(RejectedResponse {
                paragraph_id: record.paragraph_id,
                error: e.to_string(),
            }),
        }
    }
    let summary = ParseSummary {
        parsed: write_jsonl(output, &annotations)?,
        rejected: rejected.len() as u64,
    };
    write_jsonl(&rejected_path(output), &rejected)?;
    Ok(summary)
}
