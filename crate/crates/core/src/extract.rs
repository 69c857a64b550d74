//! Lexical extraction of globally declared class and function names from
//! Python source, following the tagging rules of Universal Ctags' Python
//! parser (kinds `class`, `function` and `member`).
//!
//! The scanner never builds a syntax tree. It tracks string literals,
//! comments, bracket depth and backslash continuations just well enough to
//! find the physical lines that begin a statement, and then looks for a
//! declaration keyword at the start of each of them. Invalid or mixed
//! Python 2/3 sources therefore still yield whatever declarations they hold.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A source file of a release, addressed by its `/`-separated relative path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile {
            path: normalize_path(path.into()),
            text: text.into(),
        }
    }

    /// Builds a file from raw bytes, replacing invalid UTF-8 sequences.
    pub fn from_bytes(path: impl Into<String>, bytes: &[u8]) -> Self {
        SourceFile::new(path, String::from_utf8_lossy(bytes).into_owned())
    }
}

fn normalize_path(path: String) -> String {
    if path.contains('\\') {
        path.replace('\\', "/")
    } else {
        path
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentKind {
    Class,
    /// Functions, methods and nested functions alike.
    Function,
}

impl IdentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IdentKind::Class => "class",
            IdentKind::Function => "function",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtractedIdentifier {
    pub name: String,
    pub kind: IdentKind,
}

impl ExtractedIdentifier {
    pub fn new(name: impl Into<String>, kind: IdentKind) -> Self {
        ExtractedIdentifier {
            name: name.into(),
            kind,
        }
    }
}

/// Base name of a module file with its `.py` suffix removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FilenameIdentifier(String);

impl FilenameIdentifier {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("not a Python source file: {0}")]
    NotPythonFile(String),
}

/// Identifiers of one release, keeping file boundaries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractedRelease {
    pub files: BTreeMap<String, BTreeSet<ExtractedIdentifier>>,
    pub filenames: BTreeSet<FilenameIdentifier>,
}

/// True when `path` names a Python module (`.py`, any case).
pub fn is_python_path(path: &str) -> bool {
    let bytes = path.as_bytes();
    bytes.len() >= 3 && bytes[bytes.len() - 3..].eq_ignore_ascii_case(b".py")
}

pub fn extract_filename_identifier(path: &str) -> Result<FilenameIdentifier, ExtractError> {
    if !is_python_path(path) {
        return Err(ExtractError::NotPythonFile(path.to_owned()));
    }
    let base = path.rsplit(['/', '\\']).next().unwrap_or(path);
    let stem = &base[..base.len() - 3];
    if stem.is_empty() {
        return Err(ExtractError::NotPythonFile(path.to_owned()));
    }
    Ok(FilenameIdentifier(stem.to_owned()))
}

/// Runs [`extract_code_identifiers`] over every `.py` file of a release.
pub fn extract_release(files: &[SourceFile]) -> ExtractedRelease {
    let mut release = ExtractedRelease::default();
    for file in files {
        let Ok(filename) = extract_filename_identifier(&file.path) else {
            continue;
        };
        release.filenames.insert(filename);
        release
            .files
            .entry(file.path.clone())
            .or_default()
            .extend(extract_code_identifiers(&file.text));
    }
    release
}

/// Returns the class and function names declared anywhere in `text`.
///
/// Besides `class NAME` and `[async] def NAME`, a simple assignment of a
/// lambda (`NAME = lambda args: ...`) outside of a function body counts as a
/// function, as it does for ctags.
pub fn extract_code_identifiers(text: &str) -> BTreeSet<ExtractedIdentifier> {
    let mut found = BTreeSet::new();
    let mut scopes: Vec<(usize, IdentKind)> = Vec::new();

    for start in statement_starts(text.as_bytes()) {
        let line_end = text[start..].find('\n').map_or(text.len(), |n| start + n);
        let (indent, body_start) = measure_indent(&text[start..line_end]);
        let body = &text[start + body_start..line_end];
        if body.trim_matches(is_blank).is_empty() || body.starts_with('#') {
            continue;
        }

        while scopes.last().is_some_and(|&(level, _)| level >= indent) {
            scopes.pop();
        }

        if let Some((kind, name)) = declaration(&text[start + body_start..]) {
            found.insert(ExtractedIdentifier::new(name, kind));
            scopes.push((indent, kind));
        } else if let Some(name) = lambda_assignment(body) {
            if scopes.last().map(|&(_, kind)| kind) != Some(IdentKind::Function) {
                found.insert(ExtractedIdentifier::new(name, IdentKind::Function));
            }
        }
    }
    found
}

fn is_blank(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\x0c' | '\r')
}

fn is_ident_char(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

/// Byte offsets of physical lines that begin a new statement: not inside a
/// string, not inside brackets and not following a backslash continuation.
fn statement_starts(b: &[u8]) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut depth = 0usize;
    let mut line_start = true;
    let mut continued = false;
    let mut i = 0;

    while i < b.len() {
        if line_start {
            if depth == 0 && !continued {
                starts.push(i);
            }
            line_start = false;
            continued = false;
        }
        match b[i] {
            b'#' => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'\'' | b'"' => {
                i = skip_string(b, i);
                continue;
            }
            b'\\' => {
                let next = if b.get(i + 1) == Some(&b'\r') { i + 2 } else { i + 1 };
                if b.get(next) == Some(&b'\n') {
                    continued = true;
                    line_start = true;
                    i = next + 1;
                    continue;
                }
            }
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth = depth.saturating_sub(1),
            b'\n' => line_start = true,
            _ => {}
        }
        i += 1;
    }
    starts
}

/// Returns the offset just past the string literal opening at `open`.
/// Single-quoted literals end at an unescaped newline, which is left unconsumed.
fn skip_string(b: &[u8], open: usize) -> usize {
    let quote = b[open];
    let triple = b.get(open + 1) == Some(&quote) && b.get(open + 2) == Some(&quote);
    let mut j = if triple { open + 3 } else { open + 1 };
    while j < b.len() {
        match b[j] {
            b'\\' => j += 2,
            c if c == quote => {
                if !triple {
                    return j + 1;
                }
                if b.get(j + 1) == Some(&quote) && b.get(j + 2) == Some(&quote) {
                    return j + 3;
                }
                j += 1;
            }
            b'\n' if !triple => return j,
            _ => j += 1,
        }
    }
    b.len()
}

/// Indentation width (tabs advance to the next multiple of 8) and the byte
/// length of the leading whitespace.
fn measure_indent(line: &str) -> (usize, usize) {
    let mut width = 0;
    for (at, c) in line.char_indices() {
        match c {
            ' ' => width += 1,
            '\t' => width = (width / 8 + 1) * 8,
            '\x0c' => width = 0,
            _ => return (width, at),
        }
    }
    (width, line.len())
}

/// Skips blanks and backslash-newline pairs; returns the new position.
fn skip_separator(s: &str, mut at: usize) -> usize {
    let b = s.as_bytes();
    loop {
        match b.get(at) {
            Some(b' ' | b'\t' | b'\x0c' | b'\r') => at += 1,
            Some(b'\\') if b.get(at + 1) == Some(&b'\n') => at += 2,
            Some(b'\\') if b.get(at + 1) == Some(&b'\r') && b.get(at + 2) == Some(&b'\n') => {
                at += 3
            }
            _ => return at,
        }
    }
}

/// Matches `keyword <sep> rest`, returning the offset of `rest`.
fn keyword(s: &str, at: usize, word: &str) -> Option<usize> {
    if !s[at..].starts_with(word) {
        return None;
    }
    let after = skip_separator(s, at + word.len());
    (after > at + word.len()).then_some(after)
}

fn declaration(s: &str) -> Option<(IdentKind, &str)> {
    let (kind, at) = if let Some(at) = keyword(s, 0, "class") {
        (IdentKind::Class, at)
    } else if let Some(at) = keyword(s, 0, "def") {
        (IdentKind::Function, at)
    } else {
        let at = keyword(s, 0, "async")?;
        (IdentKind::Function, keyword(s, at, "def")?)
    };
    let rest = &s[at..];
    let len = rest
        .char_indices()
        .find(|&(_, c)| !is_ident_char(c))
        .map_or(rest.len(), |(n, _)| n);
    (len > 0).then(|| (kind, &rest[..len]))
}

/// `NAME = lambda ...` where the line holds a single `=` before any `(` or
/// `#`, and `lambda` is followed by whitespace.
fn lambda_assignment(body: &str) -> Option<&str> {
    let eq = body.find('=')?;
    let rhs = &body[eq + 1..];
    for c in rhs.chars() {
        match c {
            '=' => return None,
            '(' | '#' => break,
            _ => {}
        }
    }
    let name = body[..eq].trim_end_matches(is_blank);
    let first = name.chars().next()?;
    if !(first == '_' || first.is_alphabetic()) || !name.chars().all(is_ident_char) {
        return None;
    }
    let rest = rhs.trim_start_matches(is_blank).strip_prefix("lambda")?;
    rest.starts_with(is_blank).then_some(name)
}
