//! Golden sets: JSON Lines of `{"subject_dir": ..., "truth": ...}`.

use std::io::BufRead;
use std::path::{Path, PathBuf};

use idprov_core::eval::GoldenPair;
use rayon::prelude::*;
use serde::Deserialize;

use crate::ingest::{read_release, IngestError};

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenEntry {
    pub subject_dir: PathBuf,
    pub truth: String,
    /// Line of the golden file, from 1.
    #[serde(skip)]
    pub line: usize,
}

/// Parses a golden set. Relative subject directories are resolved against `base`.
pub fn read_golden<R: BufRead>(reader: R, base: &Path) -> Result<Vec<GoldenEntry>, IngestError> {
    let mut entries = Vec::new();
    for (at, line) in reader.lines().enumerate() {
        let parse = |message: String| IngestError::Parse { line: at + 1, message };
        let line = line.map_err(|e| parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut entry: GoldenEntry = serde_json::from_str(&line).map_err(|e| parse(e.to_string()))?;
        entry.line = at + 1;
        if entry.subject_dir.is_relative() {
            entry.subject_dir = base.join(&entry.subject_dir);
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Reads every subject directory as a single release.
pub fn load_subjects(entries: &[GoldenEntry]) -> Vec<GoldenPair> {
    entries
        .par_iter()
        .map(|e| GoldenPair {
            subject: read_release(&e.subject_dir, "subject", 0),
            truth: e.truth.clone(),
        })
        .collect()
}
