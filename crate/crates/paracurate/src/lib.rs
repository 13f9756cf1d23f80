//! Corpus ingest, shard IO, variant materialization and the command-line
//! pipeline built on `paracurate-core`.

pub mod annotate;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod jats;
pub mod lang;
pub mod record;
pub mod report;
pub mod shards;
pub mod validate;
pub mod variants;

pub use error::Error;
