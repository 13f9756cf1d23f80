//! Greedy packing of an article into fixed-budget training windows.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::article::Article;
use crate::tokens::TokenCounter;

pub const DEFAULT_CONTEXT_BUDGET: usize = 8192;

/// Paragraphs inside a window are joined with one blank line.
pub const PARAGRAPH_SEPARATOR: &str = "\n\n";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingDocument {
    pub text: String,
    pub article_id: String,
    pub window_index: usize,
    pub token_count: usize,
}

/// Splits `text` into pieces of at most `budget` tokens at token starts.
/// Whitespace between pieces is dropped.
fn hard_split<'a>(text: &'a str, budget: usize, counter: &dyn TokenCounter) -> Vec<&'a str> {
    let starts = counter.token_starts(text);
    starts
        .chunks(budget)
        .enumerate()
        .map(|(i, chunk)| {
            let from = chunk[0];
            let to = starts.get((i + 1) * budget).copied().unwrap_or(text.len());
            text[from..to].trim_end()
        })
        .collect()
}

/// Packs paragraphs in order into windows of at most `budget` tokens.
///
/// A paragraph never straddles two windows unless it alone exceeds the
/// budget; such a paragraph is cut into `budget`-token pieces, the last of
/// which packs like an ordinary paragraph.
///
/// # Panics
/// If `budget` is zero.
pub fn pack_article(article: &Article, budget: usize, counter: &dyn TokenCounter) -> Vec<TrainingDocument> {
    assert!(budget > 0, "context budget must be positive");
    let separator_tokens = counter.count(PARAGRAPH_SEPARATOR);

    let mut units: Vec<(&str, usize)> = Vec::with_capacity(article.paragraphs.len());
    for p in &article.paragraphs {
        let tokens = counter.count(&p.text);
        if tokens > budget {
            units.extend(
                hard_split(&p.text, budget, counter)
                    .into_iter()
                    .map(|s| (s, counter.count(s))),
            );
        } else {
            units.push((&p.text, tokens));
        }
    }

    let mut windows = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut current_tokens = 0;
    let flush = |current: &mut Vec<&str>, windows: &mut Vec<TrainingDocument>| {
        let text = current.join(PARAGRAPH_SEPARATOR);
        windows.push(TrainingDocument {
            token_count: counter.count(&text),
            text,
            article_id: article.article_id.clone(),
            window_index: windows.len(),
        });
        current.clear();
    };

    for (text, tokens) in units {
        if !current.is_empty() && current_tokens + separator_tokens + tokens > budget {
            flush(&mut current, &mut windows);
            current_tokens = 0;
        }
        if !current.is_empty() {
            current_tokens += separator_tokens;
        }
        current.push(text);
        current_tokens += tokens;
    }
    if !current.is_empty() {
        flush(&mut current, &mut windows);
    }
    windows
}
