//! Token counting.
//!
//! The default counter treats every maximal run of non-whitespace characters
//! as one token. Other counters (for instance a subword tokenizer) plug in
//! through [`TokenCounter`].

use alloc::vec::Vec;

/// A strategy for measuring text length in tokens.
pub trait TokenCounter: Sync {
    /// Stable identifier recorded in manifests and run records.
    fn id(&self) -> &str;

    /// Number of tokens in `text`.
    fn count(&self, text: &str) -> usize;

    /// Byte offset of the first character of every token, ascending.
    ///
    /// Used to hard-split text at token boundaries; `token_starts(t).len()`
    /// must equal `count(t)`.
    fn token_starts(&self, text: &str) -> Vec<usize>;
}

/// Maximal runs of non-whitespace characters (Unicode `White_Space`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WhitespaceCounter;

impl WhitespaceCounter {
    pub const ID: &'static str = "whitespace-v1";
}

impl TokenCounter for WhitespaceCounter {
    fn id(&self) -> &str {
        Self::ID
    }

    fn count(&self, text: &str) -> usize {
        text.split_whitespace().count()
    }

    fn token_starts(&self, text: &str) -> Vec<usize> {
        let mut starts = Vec::new();
        let mut in_token = false;
        for (offset, ch) in text.char_indices() {
            if ch.is_whitespace() {
                in_token = false;
            } else if !in_token {
                starts.push(offset);
                in_token = true;
            }
        }
        starts
    }
}

/// Counts tokens with the default whitespace counter.
pub fn count_tokens(text: &str) -> usize {
    WhitespaceCounter.count(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_has_no_tokens() {
        assert_eq!(count_tokens(""), 0);
        assert_eq!(count_tokens(" \t\n "), 0);
    }

    #[test]
    fn counts_whitespace_separated_words() {
        assert_eq!(count_tokens("the patient presented with fever"), 5);
        assert_eq!(count_tokens("  leading and\u{00A0}trailing\u{2003}  "), 3);
    }

    #[test]
    fn token_starts_are_char_boundaries() {
        let text = "été  fièvre\nà 39°C";
        let starts = WhitespaceCounter.token_starts(text);
        assert_eq!(starts.len(), count_tokens(text));
        let words: Vec<&str> = starts
            .iter()
            .map(|&s| text[s..].split_whitespace().next().unwrap())
            .collect();
        assert_eq!(words, ["été", "fièvre", "à", "39°C"]);
    }

    proptest! {
        #[test]
        fn count_matches_split_oracle(text in "\\PC{0,200}") {
            let oracle = text.split(|c: char| c.is_whitespace()).filter(|w| !w.is_empty()).count();
            prop_assert_eq!(count_tokens(&text), oracle);
            prop_assert_eq!(WhitespaceCounter.token_starts(&text).len(), oracle);
        }
    }
}
