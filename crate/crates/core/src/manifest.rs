//! Dataset manifests: replication ledger, token totals and content digest.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const HASH_ALGORITHM: &str = "sha256";

/// How many times one article appears in a variant and how long it is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub article_id: String,
    pub replication_count: u32,
    /// Tokens of a single copy.
    pub token_count: u64,
}

impl ManifestEntry {
    fn line(&self) -> String {
        format!(
            "{}\t{}\t{}\n",
            self.article_id, self.replication_count, self.token_count
        )
    }
}

/// One materialized shard file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardRecord {
    pub file: String,
    pub sha256: String,
    pub documents: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub variant_name: String,
    pub hash_algorithm: String,
    pub token_counter: String,
    pub entries: Vec<ManifestEntry>,
    pub shards: Vec<ShardRecord>,
    pub total_tokens: u64,
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("variant {0} has no articles")]
    EmptyVariant(String),
    #[error("article {0} has replication count 0")]
    ZeroReplication(String),
}

/// Σ replication × tokens over `entries`.
pub fn total_tokens(entries: &[ManifestEntry]) -> u64 {
    entries
        .iter()
        .map(|e| u64::from(e.replication_count) * e.token_count)
        .sum()
}

/// SHA-256 over the sorted `article_id\treplication\ttokens\n` lines.
pub fn content_hash(entries: &[ManifestEntry]) -> String {
    let mut lines: Vec<String> = entries.iter().map(ManifestEntry::line).collect();
    lines.sort();
    let mut hasher = Sha256::new();
    for line in &lines {
        hasher.update(line.as_bytes());
    }
    hex::encode(hasher.finalize())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_manifest(
    variant_name: &str,
    entries: Vec<ManifestEntry>,
    shards: Vec<ShardRecord>,
    token_counter: &str,
) -> Result<DatasetManifest, ManifestError> {
    if entries.is_empty() {
        return Err(ManifestError::EmptyVariant(variant_name.to_string()));
    }
    if let Some(e) = entries.iter().find(|e| e.replication_count == 0) {
        return Err(ManifestError::ZeroReplication(e.article_id.clone()));
    }
    Ok(DatasetManifest {
        variant_name: variant_name.to_string(),
        hash_algorithm: HASH_ALGORITHM.to_string(),
        token_counter: token_counter.to_string(),
        total_tokens: total_tokens(&entries),
        content_hash: content_hash(&entries),
        entries,
        shards,
    })
}
