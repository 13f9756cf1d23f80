//! Run records: what produced an output directory, and from which bytes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::config::PipelineConfig;
use crate::error::Error;
use crate::shards::{sha256_file, write_json};

pub const RUN_RECORD_FILE: &str = "run-record.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub args: Vec<String>,
    pub config: PipelineConfig,
    pub inputs: Vec<InputDigest>,
}

/// Digests of every regular file under each input (or the input itself).
/// Run records and rejected-response logs from earlier stages are skipped.
pub fn digest_inputs(inputs: &[&Path]) -> Result<Vec<InputDigest>, Error> {
    let mut digests = Vec::new();
    for root in inputs {
        let mut files: Vec<PathBuf> = WalkDir::new(root)
            .follow_links(true)
            .into_iter()
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file())
            .map(|e| e.into_path())
            .filter(|p| p.file_name().is_some_and(|n| n != RUN_RECORD_FILE))
            .collect();
        files.sort();
        for path in files {
            digests.push(InputDigest {
                sha256: sha256_file(&path)?,
                path,
            });
        }
    }
    Ok(digests)
}

/// Where the record for an output goes: inside an output directory, or
/// `<file>.run-record.json` beside an output file.
pub fn record_path(output: &Path, output_is_dir: bool) -> PathBuf {
    if output_is_dir {
        output.join(RUN_RECORD_FILE)
    } else {
        let name = output
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        output.with_file_name(format!("{name}.{RUN_RECORD_FILE}"))
    }
}

pub fn write_run_record(
    subcommand: &str,
    args: &[String],
    config: &PipelineConfig,
    inputs: &[&Path],
    output: &Path,
    output_is_dir: bool,
) -> Result<PathBuf, Error> {
    let record = RunRecord {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: subcommand.to_string(),
        args: args.to_vec(),
        config: config.clone(),
        inputs: digest_inputs(inputs)?,
    };
    let path = record_path(output, output_is_dir);
    write_json(&path, &record)?;
    Ok(path)
}
