//! Products, releases and files, and the unions of their definitions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use core::cmp::Ordering;

use crate::extract::{ExtractedRelease, IdentKind};

/// Default retention limit: only the most recent releases are kept.
pub const DEFAULT_MAX_RELEASES: usize = 100;

/// Which of the two identifier kinds a code name was declared as.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct KindSet(u8);

impl KindSet {
    pub const NONE: KindSet = KindSet(0);
    pub const CLASS: KindSet = KindSet(1);
    pub const FUNCTION: KindSet = KindSet(2);
    pub const BOTH: KindSet = KindSet(3);

    pub fn of(kind: IdentKind) -> KindSet {
        match kind {
            IdentKind::Class => KindSet::CLASS,
            IdentKind::Function => KindSet::FUNCTION,
        }
    }

    pub fn insert(&mut self, kind: IdentKind) {
        self.0 |= KindSet::of(kind).0;
    }

    pub fn union(self, other: KindSet) -> KindSet {
        KindSet(self.0 | other.0)
    }

    pub fn contains(self, kind: IdentKind) -> bool {
        self.0 & KindSet::of(kind).0 != 0
    }

    pub fn is_both(self) -> bool {
        self == KindSet::BOTH
    }

    /// Short code used by the index files: `c`, `f`, `cf` or `-`.
    pub fn code(self) -> &'static str {
        match self.0 {
            1 => "c",
            2 => "f",
            3 => "cf",
            _ => "-",
        }
    }

    pub fn from_code(code: &str) -> Option<KindSet> {
        match code {
            "c" => Some(KindSet::CLASS),
            "f" => Some(KindSet::FUNCTION),
            "cf" => Some(KindSet::BOTH),
            "-" => Some(KindSet::NONE),
            _ => None,
        }
    }
}

/// Code identifiers of a release, with or without file attribution.
#[derive(Clone, Debug, PartialEq)]
pub enum FileLayout {
    /// Per-file identifier sets, as produced by directory ingestion.
    Files(BTreeMap<String, BTreeSet<String>>),
    /// Pre-extracted identifiers without file boundaries (manifest ingestion).
    Flat(BTreeSet<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReleaseRecord {
    pub release_id: String,
    pub layout: FileLayout,
    pub filenames: BTreeSet<String>,
    /// Declared kinds of every code name in the release.
    pub kinds: BTreeMap<String, KindSet>,
    /// Larger means more recent.
    pub order_hint: i64,
}

impl ReleaseRecord {
    pub fn with_files(release_id: impl Into<String>, order_hint: i64) -> Self {
        ReleaseRecord {
            release_id: release_id.into(),
            layout: FileLayout::Files(BTreeMap::new()),
            filenames: BTreeSet::new(),
            kinds: BTreeMap::new(),
            order_hint,
        }
    }

    pub fn flat(release_id: impl Into<String>, order_hint: i64) -> Self {
        ReleaseRecord {
            layout: FileLayout::Flat(BTreeSet::new()),
            ..ReleaseRecord::with_files(release_id, order_hint)
        }
    }

    pub fn from_extracted(
        release_id: impl Into<String>,
        extracted: ExtractedRelease,
        order_hint: i64,
    ) -> Self {
        let mut release = ReleaseRecord::with_files(release_id, order_hint);
        let mut files = BTreeMap::new();
        for (path, ids) in extracted.files {
            let mut names = BTreeSet::new();
            for id in ids {
                release.kinds.entry(id.name.clone()).or_default().insert(id.kind);
                names.insert(id.name);
            }
            files.insert(path, names);
        }
        release.layout = FileLayout::Files(files);
        release.filenames = extracted
            .filenames
            .into_iter()
            .map(|f| f.into_string())
            .collect();
        release
    }

    /// Records a code identifier. For file-bounded releases `path` selects the
    /// file; flat releases ignore it.
    pub fn insert_code(&mut self, path: Option<&str>, name: &str, kind: IdentKind) {
        match (&mut self.layout, path) {
            (FileLayout::Files(files), Some(path)) => {
                files.entry(path.into()).or_default().insert(name.into());
            }
            (FileLayout::Files(files), None) => {
                files.entry(String::new()).or_default().insert(name.into());
            }
            (FileLayout::Flat(names), _) => {
                names.insert(name.into());
            }
        }
        self.kinds.entry(name.into()).or_default().insert(kind);
    }

    pub fn has_file_boundaries(&self) -> bool {
        matches!(self.layout, FileLayout::Files(_))
    }

    pub fn files(&self) -> Option<&BTreeMap<String, BTreeSet<String>>> {
        match &self.layout {
            FileLayout::Files(files) => Some(files),
            FileLayout::Flat(_) => None,
        }
    }

    /// Defs(R): the union of the code identifiers of every file.
    pub fn defs(&self) -> BTreeSet<&str> {
        match &self.layout {
            FileLayout::Files(files) => files.values().flatten().map(String::as_str).collect(),
            FileLayout::Flat(names) => names.iter().map(String::as_str).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.filenames.is_empty()
            && match &self.layout {
                FileLayout::Files(files) => files.values().all(BTreeSet::is_empty),
                FileLayout::Flat(names) => names.is_empty(),
            }
    }
}

pub fn defs_release(release: &ReleaseRecord) -> BTreeSet<&str> {
    release.defs()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductRecord {
    pub name: String,
    pub releases: alloc::vec::Vec<ReleaseRecord>,
    /// Externally supplied popularity (e.g. SourceRank); non-negative.
    pub score: Option<f64>,
}

impl ProductRecord {
    pub fn new(name: impl Into<String>) -> Self {
        ProductRecord {
            name: name.into(),
            releases: alloc::vec::Vec::new(),
            score: None,
        }
    }

    /// Defs(P): the union over releases of Defs(R).
    pub fn defs(&self) -> BTreeSet<&str> {
        self.releases.iter().flat_map(ReleaseRecord::defs).collect()
    }

    pub fn filename_defs(&self) -> BTreeSet<&str> {
        self.releases
            .iter()
            .flat_map(|r| r.filenames.iter().map(String::as_str))
            .collect()
    }

    pub fn kinds(&self) -> BTreeMap<&str, KindSet> {
        let mut kinds: BTreeMap<&str, KindSet> = BTreeMap::new();
        for release in &self.releases {
            for (name, set) in &release.kinds {
                let slot = kinds.entry(name.as_str()).or_default();
                *slot = slot.union(*set);
            }
        }
        kinds
    }

    /// Products without any Python identifier still count towards the corpus size.
    pub fn has_identifiers(&self) -> bool {
        self.releases.iter().any(|r| !r.is_empty())
    }

    /// Orders releases most recent first and keeps at most `max` of them.
    pub fn retain_most_recent(&mut self, max: usize) {
        self.releases.sort_by(recency_order);
        self.releases.truncate(max);
    }
}

pub fn defs_product(product: &ProductRecord) -> BTreeSet<&str> {
    product.defs()
}

/// Most recent first: descending `order_hint`, then descending version.
pub fn recency_order(a: &ReleaseRecord, b: &ReleaseRecord) -> Ordering {
    b.order_hint
        .cmp(&a.order_hint)
        .then_with(|| compare_versions(&b.release_id, &a.release_id))
}

/// Compares version labels chunk by chunk, numeric runs by value, so that
/// `1.10` sorts after `1.9`. Falls back to plain byte order on full ties.
pub fn compare_versions(a: &str, b: &str) -> Ordering {
    let mut x = a.as_bytes();
    let mut y = b.as_bytes();
    loop {
        match (x.first(), y.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(p), Some(q)) if p.is_ascii_digit() && q.is_ascii_digit() => {
                let (n, rest_x) = split_digits(x);
                let (m, rest_y) = split_digits(y);
                let n = trim_zeros(n);
                let m = trim_zeros(m);
                let ord = n.len().cmp(&m.len()).then_with(|| n.cmp(m));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = rest_x;
                y = rest_y;
            }
            (Some(p), Some(q)) => {
                if p != q {
                    return p.cmp(q);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn split_digits(s: &[u8]) -> (&[u8], &[u8]) {
    let n = s.iter().take_while(|c| c.is_ascii_digit()).count();
    s.split_at(n)
}

fn trim_zeros(s: &[u8]) -> &[u8] {
    let n = s.iter().take_while(|&&c| c == b'0').count();
    &s[n..]
}
