//! Corpus ingest and the corpus/annotation join.

use std::fs;
use std::path::{Path, PathBuf};

use paracurate_core::{
    segment_and_filter, AnnotatedArticle, Annotation, AnnotationJoiner, Article, ShardRecord, TokenCounter,
};
use rayon::prelude::*;
use walkdir::WalkDir;

use crate::error::{io_err, Error};
use crate::jats::parse_article_with;
use crate::shards::{read_dir_records, ShardWriter, CORPUS_PREFIX};

/// All `.xml` files under `dir`, sorted by path.
pub fn xml_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).follow_links(true) {
        let entry = entry.map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e.into(),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}

pub(crate) fn thread_pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("failed to start worker pool")
}

/// Parses and filters in-memory documents on `jobs` workers.
///
/// Articles left without paragraphs are dropped; the rest come back sorted
/// by `article_id`, so the result does not depend on `jobs`.
pub fn ingest_documents<S>(
    documents: &[(S, Vec<u8>)],
    min_tokens: usize,
    counter: &dyn TokenCounter,
    jobs: usize,
) -> Result<Vec<Article>, Error>
where
    S: AsRef<Path> + Sync,
{
    let parse = |(name, bytes): &(S, Vec<u8>)| -> Result<Option<Article>, Error> {
        let article = parse_article_with(bytes, counter).map_err(|source| Error::Jats {
            path: name.as_ref().to_path_buf(),
            source,
        })?;
        let article = segment_and_filter(article, min_tokens);
        Ok((!article.paragraphs.is_empty()).then_some(article))
    };
    let parsed: Vec<Option<Article>> = if jobs <= 1 {
        documents.iter().map(parse).collect::<Result<_, _>>()?
    } else {
        thread_pool(jobs).install(|| documents.par_iter().map(parse).collect::<Result<_, _>>())?
    };
    finalize(parsed.into_iter().flatten().collect())
}

fn finalize(mut articles: Vec<Article>) -> Result<Vec<Article>, Error> {
    articles.sort_by(|a, b| a.article_id.cmp(&b.article_id));
    if let Some(w) = articles.windows(2).find(|w| w[0].article_id == w[1].article_id) {
        return Err(Error::DuplicateArticle(w[0].article_id.clone()));
    }
    Ok(articles)
}

/// Reads, parses and filters every XML file under `input`.
pub fn ingest_dir(
    input: &Path,
    min_tokens: usize,
    counter: &dyn TokenCounter,
    jobs: usize,
) -> Result<Vec<Article>, Error> {
    let files = xml_files(input)?;
    let read = |path: &PathBuf| -> Result<(PathBuf, Vec<u8>), Error> {
        Ok((path.clone(), fs::read(path).map_err(io_err(path))?))
    };
    let documents: Vec<(PathBuf, Vec<u8>)> = if jobs <= 1 {
        files.iter().map(read).collect::<Result<_, _>>()?
    } else {
        thread_pool(jobs).install(|| files.par_iter().map(read).collect::<Result<_, _>>())?
    };
    ingest_documents(&documents, min_tokens, counter, jobs)
}

pub fn write_corpus(articles: &[Article], output: &Path, shard_size: usize) -> Result<Vec<ShardRecord>, Error> {
    let mut writer = ShardWriter::create(output, CORPUS_PREFIX, shard_size)?;
    for article in articles {
        writer.write(article)?;
    }
    writer.finish()
}

pub fn read_corpus(dir: &Path) -> Result<impl Iterator<Item = Result<Article, Error>>, Error> {
    read_dir_records::<Article>(dir)
}

pub fn read_annotations(dir: &Path) -> Result<impl Iterator<Item = Result<Annotation, Error>>, Error> {
    read_dir_records::<Annotation>(dir)
}

/// Counts from a completed join.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JoinSummary {
    pub articles: usize,
    pub paragraphs: usize,
    pub unannotated: usize,
}

/// Streams the corpus in `corpus_dir` joined with every annotation in
/// `annotation_dir` through `visit`, in ascending `article_id` order.
///
/// Annotations are indexed in memory; articles are streamed one at a time.
/// Fails on duplicate annotations, annotations without a paragraph, and
/// corpus shards that are not sorted.
pub fn for_each_joined<F>(corpus_dir: &Path, annotation_dir: &Path, mut visit: F) -> Result<JoinSummary, Error>
where
    F: FnMut(AnnotatedArticle) -> Result<(), Error>,
{
    let mut joiner = AnnotationJoiner::new();
    for annotation in read_annotations(annotation_dir)? {
        joiner.insert(annotation?)?;
    }
    let mut summary = JoinSummary::default();
    for article in read_corpus(corpus_dir)? {
        let joined = joiner.attach(article?)?;
        summary.articles += 1;
        summary.paragraphs += joined.article.paragraphs.len();
        summary.unannotated += joined.unannotated_ids().count();
        visit(joined)?;
    }
    joiner.finish()?;
    Ok(summary)
}

/// Loads the whole joined corpus.
pub fn load_joined(corpus_dir: &Path, annotation_dir: &Path) -> Result<Vec<AnnotatedArticle>, Error> {
    let mut all = Vec::new();
    for_each_joined(corpus_dir, annotation_dir, |a| {
        all.push(a);
        Ok(())
    })?;
    Ok(all)
}
