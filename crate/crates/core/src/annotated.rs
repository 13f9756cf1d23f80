//! Articles joined with their paragraph annotations.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::article::{Article, Paragraph};
use crate::taxonomy::Annotation;

/// An article plus at most one annotation per paragraph, aligned by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedArticle {
    pub article: Article,
    pub annotations: Vec<Option<Annotation>>,
}

/// A paragraph had no annotation where one was required.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("paragraph {0} has no annotation")]
pub struct UnannotatedParagraph(pub String);

impl AnnotatedArticle {
    /// Pairs `article` with `annotations` given in paragraph order.
    ///
    /// # Panics
    /// If the lengths differ or an annotation's id does not match its paragraph.
    pub fn new(article: Article, annotations: Vec<Option<Annotation>>) -> Self {
        assert_eq!(article.paragraphs.len(), annotations.len());
        for (p, a) in article.paragraphs.iter().zip(&annotations) {
            if let Some(a) = a {
                assert_eq!(p.paragraph_id, a.paragraph_id);
            }
        }
        AnnotatedArticle { article, annotations }
    }

    pub fn is_fully_annotated(&self) -> bool {
        self.annotations.iter().all(Option::is_some)
    }

    pub fn unannotated_ids(&self) -> impl Iterator<Item = &str> {
        self.article
            .paragraphs
            .iter()
            .zip(&self.annotations)
            .filter(|(_, a)| a.is_none())
            .map(|(p, _)| p.paragraph_id.as_str())
    }

    /// Paragraph/annotation pairs, failing on the first unannotated paragraph.
    pub fn annotated_paragraphs(&self) -> Result<Vec<(&Paragraph, &Annotation)>, UnannotatedParagraph> {
        self.article
            .paragraphs
            .iter()
            .zip(&self.annotations)
            .map(|(p, a)| match a {
                Some(a) => Ok((p, a)),
                None => Err(UnannotatedParagraph(p.paragraph_id.clone())),
            })
            .collect()
    }

    /// Keeps the paragraphs (and their annotations) for which `keep` holds.
    pub fn retain<F>(&mut self, mut keep: F)
    where
        F: FnMut(&Paragraph, &Option<Annotation>) -> bool,
    {
        let paragraphs = core::mem::take(&mut self.article.paragraphs);
        let annotations = core::mem::take(&mut self.annotations);
        for (p, a) in paragraphs.into_iter().zip(annotations) {
            if keep(&p, &a) {
                self.article.paragraphs.push(p);
                self.annotations.push(a);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JoinError {
    #[error("paragraph {0} is annotated more than once")]
    DuplicateAnnotation(String),
    #[error("annotation for {0} matches no corpus paragraph")]
    OrphanAnnotation(String),
    #[error("corpus article {0} is out of ascending article_id order")]
    OutOfOrder(String),
}

/// Attaches annotations to articles by `paragraph_id`.
///
/// Load every annotation with [`insert`](Self::insert), feed articles in
/// ascending `article_id` order to [`attach`](Self::attach), then call
/// [`finish`](Self::finish) to surface annotations nothing claimed.
#[derive(Debug, Default)]
pub struct AnnotationJoiner {
    pending: BTreeMap<String, Annotation>,
    last_article: Option<String>,
}

impl AnnotationJoiner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, annotation: Annotation) -> Result<(), JoinError> {
        if self.pending.contains_key(&annotation.paragraph_id) {
            return Err(JoinError::DuplicateAnnotation(annotation.paragraph_id));
        }
        self.pending.insert(annotation.paragraph_id.clone(), annotation);
        Ok(())
    }

    pub fn attach(&mut self, article: Article) -> Result<AnnotatedArticle, JoinError> {
        if let Some(last) = &self.last_article {
            if article.article_id <= *last {
                return Err(JoinError::OutOfOrder(article.article_id));
            }
        }
        self.last_article = Some(article.article_id.clone());
        let annotations = article
            .paragraphs
            .iter()
            .map(|p| self.pending.remove(&p.paragraph_id))
            .collect();
        Ok(AnnotatedArticle { article, annotations })
    }

    pub fn finish(self) -> Result<(), JoinError> {
        match self.pending.into_keys().next() {
            Some(id) => Err(JoinError::OrphanAnnotation(id)),
            None => Ok(()),
        }
    }
}
