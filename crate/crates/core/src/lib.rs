//! Identifier-based software provenance.
//!
//! Given a corpus of products, each made of releases of Python files, this
//! crate extracts the globally declared class and function names (plus
//! module filenames), indexes them at product granularity, and answers the
//! question "which product does this code base come from?" by sampling a
//! small random fingerprint of rare identifiers from the subject and
//! intersecting their posting lists.
//!
//! The crate is `no_std` and only needs `alloc`. File system access,
//! persistence formats and the command line live in the `idprov` crate.
//!
//! ```
//! use idprov_core::corpus::{ProductRecord, ReleaseRecord};
//! use idprov_core::extract::{extract_release, SourceFile};
//! use idprov_core::index::build_index;
//! use idprov_core::search::{match_fingerprint, rank};
//!
//! let files = [SourceFile::new("pkg/core.py", "class Widget:\n    def render(self): pass\n")];
//! let mut product = ProductRecord::new("widgets");
//! product.releases.push(ReleaseRecord::from_extracted("1.0", extract_release(&files), 0));
//!
//! let index = build_index(&[product]).unwrap();
//! let ranked = rank(&index, &match_fingerprint(&index, &["Widget", "render"]));
//! assert_eq!(ranked.top().unwrap().name, "widgets");
//! ```
#![no_std]

extern crate alloc;

pub mod corpus;
pub mod eval;
pub mod extract;
pub mod identify;
pub mod index;
pub mod sample;
pub mod search;
pub mod stats;

pub use corpus::{ProductRecord, ReleaseRecord};
pub use index::{build_index, Blocklist, InvertedIndex, Namespace, ProductId};
pub use sample::{Fingerprint, Strategy};
pub use search::{match_fingerprint, rank, RankedCandidates};
