//! Line-delimited JSON shard files.
//!
//! A shard directory holds `<prefix>-00000.jsonl`, `<prefix>-00001.jsonl`, ...
//! Readers take every `*.jsonl` file in the directory in name order.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use paracurate_core::ShardRecord;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{io_err, Error};

pub const CORPUS_PREFIX: &str = "corpus";
pub const ANNOTATION_PREFIX: &str = "annotations";
pub const DOCUMENT_PREFIX: &str = "documents";
pub const PACKED_PREFIX: &str = "packed";

/// Writes records round-robin into fixed-size shards, hashing as it goes.
pub struct ShardWriter {
    dir: PathBuf,
    prefix: String,
    per_shard: usize,
    current: Option<(BufWriter<File>, Sha256, u64)>,
    finished: Vec<ShardRecord>,
    line: Vec<u8>,
}

impl ShardWriter {
    /// # Panics
    /// If `per_shard` is zero.
    pub fn create(dir: &Path, prefix: &str, per_shard: usize) -> Result<Self, Error> {
        assert!(per_shard > 0, "shard size must be positive");
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(ShardWriter {
            dir: dir.to_path_buf(),
            prefix: prefix.to_string(),
            per_shard,
            current: None,
            finished: Vec::new(),
            line: Vec::new(),
        })
    }

    fn shard_name(&self, index: usize) -> String {
        format!("{}-{index:05}.jsonl", self.prefix)
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<(), Error> {
        if self
            .current
            .as_ref()
            .is_some_and(|(_, _, n)| *n as usize >= self.per_shard)
        {
            self.close_current()?;
        }
        if self.current.is_none() {
            let path = self.dir.join(self.shard_name(self.finished.len()));
            let file = File::create(&path).map_err(io_err(&path))?;
            self.current = Some((BufWriter::new(file), Sha256::new(), 0));
        }
        self.line.clear();
        serde_json::to_writer(&mut self.line, record).map_err(|e| Error::Json {
            path: self.dir.clone(),
            line: 0,
            source: e,
        })?;
        self.line.push(b'\n');
        let (writer, hasher, count) = self.current.as_mut().expect("shard open");
        writer.write_all(&self.line).map_err(io_err(&self.dir))?;
        hasher.update(&self.line);
        *count += 1;
        Ok(())
    }

    fn close_current(&mut self) -> Result<(), Error> {
        if let Some((mut writer, hasher, documents)) = self.current.take() {
            writer.flush().map_err(io_err(&self.dir))?;
            self.finished.push(ShardRecord {
                file: self.shard_name(self.finished.len()),
                sha256: hex::encode(hasher.finalize()),
                documents,
            });
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<Vec<ShardRecord>, Error> {
        self.close_current()?;
        Ok(self.finished)
    }
}

/// Every `*.jsonl` file directly inside `dir`, sorted by name. A path to a
/// single file is returned as is.
pub fn shard_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    if dir.is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

/// Records of one shard, deserialized lazily with line numbers for errors.
/// Blank lines are skipped.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<impl Iterator<Item = Result<T, Error>>, Error> {
    let file = File::open(path).map_err(io_err(path))?;
    let path = path.to_path_buf();
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .filter(|(_, line)| line.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(move |(i, line)| {
            let line = line.map_err(io_err(&path))?;
            serde_json::from_str(&line).map_err(|e| Error::Json {
                path: path.clone(),
                line: i + 1,
                source: e,
            })
        }))
}

/// Records of every shard in `dir`, in shard order.
pub fn read_dir_records<T: DeserializeOwned + 'static>(
    dir: &Path,
) -> Result<impl Iterator<Item = Result<T, Error>>, Error> {
    let files = shard_files(dir)?;
    let iters = files
        .iter()
        .map(|f| read_records::<T>(f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(iters.into_iter().flatten())
}

pub fn sha256_file(path: &Path) -> Result<String, Error> {
    let mut file = File::open(path).map_err(io_err(path))?;
    let mut hasher = Sha256::new();
    std::io::copy(&mut file, &mut hasher).map_err(io_err(path))?;
    Ok(hex::encode(hasher.finalize()))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        line: 0,
        source: e,
    })?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(io_err(path))
}
