//! Loading corpora from disk: a `<root>/<product>/<release>/...` tree of
//! unpacked releases, or a JSON Lines manifest of pre-extracted identifiers.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use idprov_core::corpus::{ProductRecord, ReleaseRecord};
use idprov_core::extract::{extract_release, is_python_path, IdentKind, SourceFile};
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

/// One manifest line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub product: String,
    pub release: String,
    pub kind: ManifestKind,
    pub name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifestKind {
    Class,
    Filename,
    Function,
}

/// Reads every product directory under `root`.
///
/// Releases are ordered most recent first (directory mtime, then version)
/// and cut to `max_releases`. Products come back sorted by name. Files that
/// cannot be read are logged and skipped.
pub fn ingest_directory(root: &Path, max_releases: usize) -> Result<Vec<ProductRecord>, IngestError> {
    let product_dirs = subdirectories(root)?;
    let mut products = product_dirs
        .par_iter()
        .map(|(name, dir)| {
            let mut product = ProductRecord::new(name.clone());
            for (release_id, release_dir) in subdirectories(dir)? {
                product
                    .releases
                    .push(read_release(&release_dir, release_id, modified_hint(&release_dir)));
            }
            product.retain_most_recent(max_releases);
            if !product.has_identifiers() {
                warn!("product {name} contributes no identifiers");
            }
            Ok(product)
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    products.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(products)
}

/// Reads one release directory: every `.py` file below it, with paths
/// relative to `dir`.
pub fn read_release(dir: &Path, release_id: impl Into<String>, order_hint: i64) -> ReleaseRecord {
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = match entry {
            Ok(entry) => entry,
            Err(err) => {
                warn!("skipping unreadable entry: {err}");
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let relative = relative_path(dir, entry.path());
        if !is_python_path(&relative) {
            continue;
        }
        match fs::read(entry.path()) {
            Ok(bytes) => files.push(SourceFile::from_bytes(relative, &bytes)),
            Err(err) => warn!("skipping {}: {err}", entry.path().display()),
        }
    }
    ReleaseRecord::from_extracted(release_id, extract_release(&files), order_hint)
}

/// Counts the `.py` files below `dir`.
pub fn count_python_files(dir: &Path) -> usize {
    WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && is_python_path(&e.file_name().to_string_lossy()))
        .count()
}

fn relative_path(base: &Path, path: &Path) -> String {
    let relative = path.strip_prefix(base).unwrap_or(path);
    relative
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn subdirectories(dir: &Path) -> Result<Vec<(String, PathBuf)>, IngestError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| IngestError::io(dir, e))? {
        let entry = entry.map_err(|e| IngestError::io(dir, e))?;
        let path = entry.path();
        if !path.is_dir() {
            continue;
        }
        let name = entry.file_name();
        let Some(name) = name.to_str() else {
            warn!("skipping non-UTF-8 directory name {}", path.display());
            continue;
        };
        out.push((name.to_owned(), path));
    }
    out.sort();
    Ok(out)
}

/// Seconds since the epoch of the directory's mtime; 0 when unavailable,
/// leaving the order to the version labels.
fn modified_hint(dir: &Path) -> i64 {
    fs::metadata(dir)
        .and_then(|m| m.modified())
        .ok()
        .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
        .map_or(0, |d| d.as_secs() as i64)
}

/// Builds products from manifest lines. Releases carry no file boundaries.
pub fn ingest_manifest<R: BufRead>(reader: R, max_releases: usize) -> Result<Vec<ProductRecord>, IngestError> {
    let mut products: BTreeMap<String, BTreeMap<String, ReleaseRecord>> = BTreeMap::new();
    for (at, line) in reader.lines().enumerate() {
        let line_no = at + 1;
        let line = line.map_err(|e| IngestError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let release = products
            .entry(entry.product)
            .or_default()
            .entry(entry.release.clone())
            .or_insert_with(|| ReleaseRecord::flat(entry.release, 0));
        match entry.kind {
            ManifestKind::Class => release.insert_code(None, &entry.name, IdentKind::Class),
            ManifestKind::Function => release.insert_code(None, &entry.name, IdentKind::Function),
            ManifestKind::Filename => {
                release.filenames.insert(entry.name);
            }
        }
    }
    Ok(products
        .into_iter()
        .map(|(name, releases)| {
            let mut product = ProductRecord::new(name);
            product.releases = releases.into_values().collect();
            product.retain_most_recent(max_releases);
            product
        })
        .collect())
}

/// Manifest lines for a corpus, sorted by product, release, kind and name.
pub fn manifest_entries(products: &[ProductRecord]) -> Vec<ManifestEntry> {
    let mut entries = Vec::new();
    for product in products {
        for release in &product.releases {
            let entry = |kind, name: &str| ManifestEntry {
                product: product.name.clone(),
                release: release.release_id.clone(),
                kind,
                name: name.to_owned(),
            };
            for (name, kinds) in &release.kinds {
                if kinds.contains(IdentKind::Class) {
                    entries.push(entry(ManifestKind::Class, name));
                }
                if kinds.contains(IdentKind::Function) {
                    entries.push(entry(ManifestKind::Function, name));
                }
            }
            for name in &release.filenames {
                entries.push(entry(ManifestKind::Filename, name));
            }
        }
    }
    entries.sort();
    entries.dedup();
    entries
}

pub fn write_manifest<W: Write>(products: &[ProductRecord], mut out: W) -> io::Result<()> {
    for entry in manifest_entries(products) {
        serde_json::to_writer(&mut out, &entry)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads `product<TAB>score` lines and attaches the scores to `products`.
/// Products missing from the file keep no score.
pub fn apply_scores<R: BufRead>(products: &mut [ProductRecord], reader: R) -> Result<(), IngestError> {
    let mut scores = BTreeMap::new();
    for (at, line) in reader.lines().enumerate() {
        let parse = |message: String| IngestError::Parse { line: at + 1, message };
        let line = line.map_err(|e| parse(e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let (name, score) = line
            .split_once('\t')
            .ok_or_else(|| parse("expected product<TAB>score".into()))?;
        let score: f64 = score
            .parse()
            .map_err(|_| parse(format!("invalid score {score:?}")))?;
        if !score.is_finite() || score < 0.0 {
            return Err(parse(format!("score must be finite and non-negative, got {score}")));
        }
        scores.insert(name.to_owned(), score);
    }
    for product in products {
        if let Some(&score) = scores.get(&product.name) {
            product.score = Some(score);
        }
    }
    Ok(())
}
