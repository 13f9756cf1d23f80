//! Seeded selection of paragraphs for LLM annotation.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws `min(n, total)` distinct paragraph ids by two-stage uniform
/// sampling: pick an article uniformly among those with paragraphs left, then
/// a paragraph uniformly within it. Long articles therefore cannot crowd out
/// short ones.
///
/// `articles` yields `(article_id, paragraph_ids)`; input order does not
/// matter. The result is sorted.
pub fn sample_for_annotation<I>(articles: I, n: usize, seed: u64) -> Vec<String>
where
    I: IntoIterator<Item = (String, Vec<String>)>,
{
    let mut pools: Vec<(String, Vec<String>)> = articles
        .into_iter()
        .filter(|(_, paragraphs)| !paragraphs.is_empty())
        .collect();
    pools.sort_by(|a, b| a.0.cmp(&b.0));
    for (_, paragraphs) in pools.iter_mut() {
        paragraphs.sort();
    }

    let total: usize = pools.iter().map(|(_, p)| p.len()).sum();
    if n >= total {
        let mut all: Vec<String> = pools.into_iter().flat_map(|(_, p)| p).collect();
        all.sort();
        return all;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::with_capacity(n);
    while picked.len() < n {
        let a = rng.gen_range(0..pools.len());
        let paragraphs = &mut pools[a].1;
        let p = rng.gen_range(0..paragraphs.len());
        picked.push(paragraphs.swap_remove(p));
        if paragraphs.is_empty() {
            pools.swap_remove(a);
        }
    }
    picked.sort();
    picked
}
