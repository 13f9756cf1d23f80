//! Pipeline configuration shared by every subcommand.
//!
//! Values come from, in increasing precedence: built-in defaults, a TOML
//! configuration file, `PARACURATE_*` environment variables and command-line
//! flags.

use std::fs;
use std::path::{Path, PathBuf};

use paracurate_core::taxonomy::is_valid_language_code;
use paracurate_core::{TokenCounter, WhitespaceCounter};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error};

pub const ENV_PREFIX: &str = "PARACURATE_";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub min_tokens: usize,
    pub edu_threshold: u8,
    pub replication_factor: u32,
    pub language_target: String,
    pub context_budget: usize,
    pub seed: u64,
    pub sample_size: usize,
    pub clinical_min_score: u8,
    pub commercial_only: bool,
    pub shard_size: usize,
    pub token_counter: String,
    pub hash: String,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            corpus: None,
            annotations: None,
            output: None,
            min_tokens: paracurate_core::DEFAULT_MIN_TOKENS,
            edu_threshold: paracurate_core::VariantConfig::DEFAULT_EDU_THRESHOLD,
            replication_factor: paracurate_core::VariantConfig::DEFAULT_REPLICATION_FACTOR,
            language_target: paracurate_core::VariantConfig::DEFAULT_LANGUAGE.to_string(),
            context_budget: paracurate_core::DEFAULT_CONTEXT_BUDGET,
            seed: 0,
            sample_size: 400_000,
            clinical_min_score: 4,
            commercial_only: true,
            shard_size: 1000,
            token_counter: WhitespaceCounter::ID.to_string(),
            hash: paracurate_core::manifest::HASH_ALGORITHM.to_string(),
            jobs: 1,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fail = |m: String| Err(Error::Config(m));
        if !(1..=5).contains(&self.edu_threshold) {
            return fail(format!("edu_threshold {} outside 1..=5", self.edu_threshold));
        }
        if self.replication_factor < 1 {
            return fail("replication_factor must be at least 1".into());
        }
        if !is_valid_language_code(&self.language_target) || self.language_target == "und" {
            return fail(format!(
                "language_target {:?} is not a two-letter code",
                self.language_target
            ));
        }
        if !(1..=5).contains(&self.clinical_min_score) {
            return fail(format!("clinical_min_score {} outside 1..=5", self.clinical_min_score));
        }
        if self.context_budget < 1 {
            return fail("context_budget must be at least 1".into());
        }
        if self.shard_size < 1 {
            return fail("shard_size must be at least 1".into());
        }
        if self.jobs < 1 {
            return fail("jobs must be at least 1".into());
        }
        if self.hash != paracurate_core::manifest::HASH_ALGORITHM {
            return fail(format!("unsupported hash {:?} (only sha256)", self.hash));
        }
        self.counter()?;
        Ok(())
    }

    /// The token counter named by `token_counter`.
    pub fn counter(&self) -> Result<&'static dyn TokenCounter, Error> {
        match self.token_counter.as_str() {
            WhitespaceCounter::ID | "whitespace" => Ok(&WhitespaceCounter),
            other => Err(Error::Config(format!("unknown token counter {other:?}"))),
        }
    }
}
