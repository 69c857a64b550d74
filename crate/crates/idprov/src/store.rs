//! On-disk index: a directory of tab-separated files.
//!
//! ```text
//! meta.tsv       IDPROV-IDX v1 / products<TAB>D
//! products.tsv   product_id<TAB>name<TAB>score
//! postings.tsv   namespace<TAB>name<TAB>kinds<TAB>id,id,...
//! blocklist.tsv  namespace<TAB>name            (optional)
//! ```
//!
//! Rows are sorted bytewise and every line ends with `\n`. Each file is
//! written to a temporary file in the target directory and renamed into place.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use idprov_core::corpus::KindSet;
use idprov_core::index::{Blocklist, IndexError, InvertedIndex, Namespace, Posting, ProductEntry, ProductId};
use tempfile::NamedTempFile;
use thiserror::Error;

pub const FORMAT_HEADER: &str = "IDPROV-IDX v1";
const HEADER_PREFIX: &str = "IDPROV-IDX ";

pub const META_FILE: &str = "meta.tsv";
pub const PRODUCTS_FILE: &str = "products.tsv";
pub const POSTINGS_FILE: &str = "postings.tsv";
pub const BLOCKLIST_FILE: &str = "blocklist.tsv";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{file}:{line}: {message}")]
    Format { file: &'static str, line: usize, message: String },
    #[error("unsupported index format {found:?}, expected {FORMAT_HEADER:?}")]
    Version { found: String },
    #[error("{0}")]
    Index(#[from] IndexError),
    #[error("{what} {value:?} cannot be stored: tabs and newlines are not allowed")]
    Unencodable { what: &'static str, value: String },
}

/// Writes `index` (and optionally the blocklists used with it) into `dir`.
pub fn save(index: &InvertedIndex, blocklists: &[Blocklist], dir: &Path) -> Result<(), StoreError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;

    let meta = format!("{FORMAT_HEADER}\nproducts\t{}\n", index.total_products());

    let mut rows = Vec::with_capacity(index.total_products());
    for (id, product) in index.products().iter().enumerate() {
        check_field("product name", &product.name)?;
        let score = product.score.map(|s| s.to_string()).unwrap_or_default();
        rows.push(format!("{id}\t{}\t{score}\n", product.name));
    }
    let products = sorted_rows(rows);

    let mut rows = Vec::new();
    for namespace in Namespace::ALL {
        for (name, posting) in index.postings(namespace) {
            check_field("identifier", name)?;
            let ids: Vec<String> = posting.products.iter().map(|id| id.0.to_string()).collect();
            rows.push(format!(
                "{}\t{name}\t{}\t{}\n",
                namespace.as_str(),
                posting.kinds.code(),
                ids.join(",")
            ));
        }
    }
    let postings = sorted_rows(rows);

    write_atomic(dir, META_FILE, meta.as_bytes())?;
    write_atomic(dir, PRODUCTS_FILE, products.as_bytes())?;
    write_atomic(dir, POSTINGS_FILE, postings.as_bytes())?;

    let path = dir.join(BLOCKLIST_FILE);
    if blocklists.is_empty() {
        if path.exists() {
            fs::remove_file(&path).map_err(|e| io_error(&path, e))?;
        }
    } else {
        let rows = blocklists
            .iter()
            .flat_map(|b| b.entries().iter().map(move |n| format!("{}\t{n}\n", b.namespace.as_str())))
            .collect();
        write_atomic(dir, BLOCKLIST_FILE, sorted_rows(rows).as_bytes())?;
    }
    Ok(())
}

fn check_field(what: &'static str, value: &str) -> Result<(), StoreError> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(StoreError::Unencodable {
            what,
            value: value.to_owned(),
        });
    }
    Ok(())
}

fn sorted_rows(mut rows: Vec<String>) -> String {
    rows.sort_unstable();
    rows.concat()
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), StoreError> {
    let target = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(tmp.path(), e))?;
    tmp.persist(&target).map_err(|e| io_error(&target, e.error))?;
    Ok(())
}

fn io_error(path: &Path, source: io::Error) -> StoreError {
    StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

fn read(dir: &Path, name: &str) -> Result<String, StoreError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| io_error(&path, e))
}

/// Rows of a file; a missing final newline means the file was cut short.
fn lines<'a>(file: &'static str, text: &'a str) -> Result<impl Iterator<Item = (usize, &'a str)>, StoreError> {
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(StoreError::Format {
            file,
            line: text.lines().count(),
            message: "truncated line".into(),
        });
    }
    Ok(text.lines().enumerate().map(|(at, l)| (at + 1, l)))
}

fn format_error(file: &'static str, line: usize, message: impl Into<String>) -> StoreError {
    StoreError::Format {
        file,
        line,
        message: message.into(),
    }
}

/// Reads an index written by [`save`].
pub fn load(dir: &Path) -> Result<InvertedIndex, StoreError> {
    let total = read_meta(dir)?;
    let products = read_products(dir, total)?;
    let postings = read_postings(dir)?;
    Ok(InvertedIndex::from_parts(products, postings)?)
}

fn read_meta(dir: &Path) -> Result<usize, StoreError> {
    let text = read(dir, META_FILE)?;
    let mut rows = lines(META_FILE, &text)?;
    match rows.next() {
        Some((_, FORMAT_HEADER)) => {}
        Some((_, found)) if found.starts_with(HEADER_PREFIX) => {
            return Err(StoreError::Version { found: found.to_owned() })
        }
        Some((line, _)) => return Err(format_error(META_FILE, line, "missing format header")),
        None => return Err(format_error(META_FILE, 1, "empty file")),
    }
    let mut total = None;
    for (line, row) in rows {
        match row.split_once('\t') {
            Some(("products", value)) => {
                let value = value
                    .parse()
                    .map_err(|_| format_error(META_FILE, line, format!("invalid product count {value:?}")))?;
                total = Some(value);
            }
            _ => return Err(format_error(META_FILE, line, format!("unexpected row {row:?}"))),
        }
    }
    total.ok_or_else(|| format_error(META_FILE, text.lines().count() + 1, "missing products row"))
}

fn read_products(dir: &Path, total: usize) -> Result<Vec<ProductEntry>, StoreError> {
    let text = read(dir, PRODUCTS_FILE)?;
    let mut slots: Vec<Option<ProductEntry>> = vec![None; total];
    let mut last = 0;
    for (line, row) in lines(PRODUCTS_FILE, &text)? {
        last = line;
        let fields: Vec<&str> = row.split('\t').collect();
        let [id, name, score] = fields[..] else {
            return Err(format_error(PRODUCTS_FILE, line, "expected 3 fields"));
        };
        let id: usize = id
            .parse()
            .map_err(|_| format_error(PRODUCTS_FILE, line, format!("invalid product id {id:?}")))?;
        let score = match score {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| format_error(PRODUCTS_FILE, line, format!("invalid score {s:?}")))?,
            ),
        };
        let slot = slots
            .get_mut(id)
            .ok_or_else(|| format_error(PRODUCTS_FILE, line, format!("product id {id} outside 0..{total}")))?;
        if slot.is_some() {
            return Err(format_error(PRODUCTS_FILE, line, format!("duplicate product id {id}")));
        }
        *slot = Some(ProductEntry {
            name: name.to_owned(),
            score,
        });
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(id, slot)| slot.ok_or_else(|| format_error(PRODUCTS_FILE, last + 1, format!("missing product id {id}"))))
        .collect()
}

fn read_postings(dir: &Path) -> Result<Vec<(Namespace, String, Posting)>, StoreError> {
    let text = read(dir, POSTINGS_FILE)?;
    let mut out = Vec::new();
    for (line, row) in lines(POSTINGS_FILE, &text)? {
        let bad = |message: String| format_error(POSTINGS_FILE, line, message);
        let mut fields = row.split('\t');
        let (Some(namespace), Some(name), Some(kinds), Some(ids), None) =
            (fields.next(), fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(bad("expected 4 fields".into()));
        };
        let namespace = Namespace::parse(namespace).ok_or_else(|| bad(format!("unknown namespace {namespace:?}")))?;
        let kinds = KindSet::from_code(kinds).ok_or_else(|| bad(format!("unknown kinds {kinds:?}")))?;
        let products = ids
            .split(',')
            .map(|id| id.parse::<u32>().map(ProductId))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad(format!("invalid product list {ids:?}")))?;
        out.push((namespace, name.to_owned(), Posting { products, kinds }));
    }
    Ok(out)
}

/// Reads `blocklist.tsv`, if present.
pub fn load_blocklist(dir: &Path, namespace: Namespace) -> Result<Option<Blocklist>, StoreError> {
    let path = dir.join(BLOCKLIST_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = read(dir, BLOCKLIST_FILE)?;
    let mut names = Vec::new();
    for (line, row) in lines(BLOCKLIST_FILE, &text)? {
        let (ns, name) = row
            .split_once('\t')
            .ok_or_else(|| format_error(BLOCKLIST_FILE, line, "expected 2 fields"))?;
        if Namespace::parse(ns) == Some(namespace) {
            names.push(name.to_owned());
        }
    }
    Ok(Some(Blocklist::from_names(namespace, names)))
}
