//! Articles and the paragraphs they are segmented into.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::tokens::TokenCounter;

/// Paragraphs shorter than this many tokens are dropped at ingest.
pub const DEFAULT_MIN_TOKENS: usize = 64;

/// Reuse terms attached to an article.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum License {
    CommercialOk,
    NonCommercial,
    Unknown,
}

impl License {
    pub fn as_str(self) -> &'static str {
        match self {
            License::CommercialOk => "commercial_ok",
            License::NonCommercial => "non_commercial",
            License::Unknown => "unknown",
        }
    }

    /// Maps one license descriptor (a URI, a `license-type` value or a short
    /// license name) onto the three license classes.
    ///
    /// Non-commercial markers win over everything else, so
    /// `http://creativecommons.org/licenses/by-nc/4.0/` is never read as CC BY.
    pub fn classify(descriptor: &str) -> License {
        let d = descriptor.trim().to_ascii_lowercase();
        if d.is_empty() {
            return License::Unknown;
        }
        const NON_COMMERCIAL: [&str; 7] = [
            "by-nc",
            "by_nc",
            "cc-nc",
            "cc nc",
            "noncommercial",
            "non-commercial",
            "non_commercial",
        ];
        if NON_COMMERCIAL.iter().any(|m| d.contains(m)) || d == "nc" || d.contains("cc by-nc") || d.contains("cc-by-nc")
        {
            return License::NonCommercial;
        }
        const COMMERCIAL: [&str; 13] = [
            "creativecommons.org/licenses/by/",
            "creativecommons.org/licenses/by-sa/",
            "creativecommons.org/licenses/by-nd/",
            "creativecommons.org/publicdomain/zero/",
            "creativecommons.org/publicdomain/mark/",
            "creative commons attribution",
            "cc by",
            "cc-by",
            "cc0",
            "cc-0",
            "public domain",
            "public-domain",
            "commercial_ok",
        ];
        if COMMERCIAL.iter().any(|m| d.contains(m)) {
            return License::CommercialOk;
        }
        match d.as_str() {
            "by" | "by-sa" | "by-nd" | "open-access-by" => License::CommercialOk,
            _ => License::Unknown,
        }
    }

    /// Classifies several descriptors of the same article. The most
    /// restrictive known class wins; all-unknown stays unknown.
    pub fn classify_all<'a, I>(descriptors: I) -> License
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut result = License::Unknown;
        for d in descriptors {
            match License::classify(d) {
                License::NonCommercial => return License::NonCommercial,
                License::CommercialOk => result = License::CommercialOk,
                License::Unknown => {}
            }
        }
        result
    }
}

/// One text unit of an article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub paragraph_id: String,
    pub text: String,
    pub section_path: Vec<String>,
    pub token_count: usize,
}

impl Paragraph {
    /// A paragraph without an id yet; ids are assigned by [`segment_and_filter`].
    pub fn unassigned(text: String, section_path: Vec<String>, counter: &dyn TokenCounter) -> Self {
        let token_count = counter.count(&text);
        Paragraph {
            paragraph_id: String::new(),
            text,
            section_path,
            token_count,
        }
    }
}

/// One scientific article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub article_id: String,
    pub license: License,
    pub title: String,
    pub paragraphs: Vec<Paragraph>,
}

impl Article {
    pub fn token_count(&self) -> usize {
        self.paragraphs.iter().map(|p| p.token_count).sum()
    }
}

/// `PMC123-p00007`: article id plus zero-padded dense ordinal.
pub fn paragraph_id(article_id: &str, ordinal: usize) -> String {
    format!("{article_id}-p{ordinal:05}")
}

/// Drops paragraphs with fewer than `min_tokens` tokens and assigns dense
/// paragraph ids to the survivors.
pub fn segment_and_filter(mut article: Article, min_tokens: usize) -> Article {
    article.paragraphs.retain(|p| p.token_count >= min_tokens);
    for (ordinal, p) in article.paragraphs.iter_mut().enumerate() {
        p.paragraph_id = paragraph_id(&article.article_id, ordinal);
    }
    article
}
