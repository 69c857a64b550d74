//! Product-level inverted index over code identifiers and filenames.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{KindSet, ProductRecord};

/// Dense product identifier: the product's position in the index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductId(pub u32);

impl ProductId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ProductId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Code names (classes and functions merged) and module filenames are kept apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Namespace {
    Code,
    Filename,
}

impl Namespace {
    pub const ALL: [Namespace; 2] = [Namespace::Code, Namespace::Filename];

    pub fn as_str(self) -> &'static str {
        match self {
            Namespace::Code => "code",
            Namespace::Filename => "filename",
        }
    }

    pub fn parse(s: &str) -> Option<Namespace> {
        match s {
            "code" => Some(Namespace::Code),
            "filename" => Some(Namespace::Filename),
            _ => None,
        }
    }
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Posting {
    /// Strictly ascending.
    pub products: Vec<ProductId>,
    pub kinds: KindSet,
}

impl Posting {
    pub fn frequency(&self) -> usize {
        self.products.len()
    }

    pub fn contains(&self, id: ProductId) -> bool {
        self.products.binary_search(&id).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductEntry {
    pub name: String,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("duplicate product name: {0}")]
    DuplicateProductName(String),
    #[error("product {product} has invalid score {score}")]
    InvalidScore { product: String, score: f64 },
    #[error("unknown {namespace} identifier: {name}")]
    UnknownIdentifier { namespace: Namespace, name: String },
    #[error("posting list of {namespace} identifier {name} is not strictly ascending")]
    UnsortedPosting { namespace: Namespace, name: String },
    #[error("posting list of {namespace} identifier {name} references unknown product {id}")]
    UnknownProduct {
        namespace: Namespace,
        name: String,
        id: ProductId,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvertedIndex {
    products: Vec<ProductEntry>,
    by_name: BTreeMap<String, ProductId>,
    code: BTreeMap<String, Posting>,
    filenames: BTreeMap<String, Posting>,
}

/// Builds the index. Product ids follow the order of `products`; products
/// without identifiers still count towards the corpus size.
pub fn build_index(products: &[ProductRecord]) -> Result<InvertedIndex, IndexError> {
    let entries = products
        .iter()
        .map(|p| ProductEntry {
            name: p.name.clone(),
            score: p.score,
        })
        .collect();
    let mut index = InvertedIndex::with_products(entries)?;

    for (at, product) in products.iter().enumerate() {
        let id = ProductId(at as u32);
        let kinds = product.kinds();
        for name in product.defs() {
            let kind = kinds.get(name).copied().unwrap_or_default();
            let posting = posting_entry(&mut index.code, name);
            posting.products.push(id);
            posting.kinds = posting.kinds.union(kind);
        }
        for name in product.filename_defs() {
            posting_entry(&mut index.filenames, name).products.push(id);
        }
    }
    Ok(index)
}

fn posting_entry<'m>(map: &'m mut BTreeMap<String, Posting>, name: &str) -> &'m mut Posting {
    if !map.contains_key(name) {
        map.insert(name.to_owned(), Posting::default());
    }
    map.get_mut(name).expect("inserted above")
}

/// log10(total / frequency).
pub fn inverse_document_frequency(total_products: usize, frequency: usize) -> f64 {
    libm::log10(total_products as f64 / frequency as f64)
}

impl InvertedIndex {
    fn with_products(products: Vec<ProductEntry>) -> Result<Self, IndexError> {
        let mut by_name = BTreeMap::new();
        for (at, product) in products.iter().enumerate() {
            if let Some(score) = product.score {
                if !score.is_finite() || score < 0.0 {
                    return Err(IndexError::InvalidScore {
                        product: product.name.clone(),
                        score,
                    });
                }
            }
            if by_name
                .insert(product.name.clone(), ProductId(at as u32))
                .is_some()
            {
                return Err(IndexError::DuplicateProductName(product.name.clone()));
            }
        }
        Ok(InvertedIndex {
            products,
            by_name,
            ..InvertedIndex::default()
        })
    }

    /// Reassembles an index from stored parts, checking every invariant.
    pub fn from_parts(
        products: Vec<ProductEntry>,
        postings: impl IntoIterator<Item = (Namespace, String, Posting)>,
    ) -> Result<Self, IndexError> {
        let mut index = InvertedIndex::with_products(products)?;
        let total = index.products.len();
        for (namespace, name, posting) in postings {
            if posting.products.windows(2).any(|w| w[0] >= w[1]) {
                return Err(IndexError::UnsortedPosting { namespace, name });
            }
            if let Some(&id) = posting.products.iter().find(|id| id.index() >= total) {
                return Err(IndexError::UnknownProduct { namespace, name, id });
            }
            if posting.products.is_empty() {
                continue;
            }
            index.map_mut(namespace).insert(name, posting);
        }
        Ok(index)
    }

    fn map(&self, namespace: Namespace) -> &BTreeMap<String, Posting> {
        match namespace {
            Namespace::Code => &self.code,
            Namespace::Filename => &self.filenames,
        }
    }

    fn map_mut(&mut self, namespace: Namespace) -> &mut BTreeMap<String, Posting> {
        match namespace {
            Namespace::Code => &mut self.code,
            Namespace::Filename => &mut self.filenames,
        }
    }

    /// D: every product, including those that contributed no identifier.
    pub fn total_products(&self) -> usize {
        self.products.len()
    }

    pub fn products(&self) -> &[ProductEntry] {
        &self.products
    }

    pub fn product(&self, id: ProductId) -> Option<&ProductEntry> {
        self.products.get(id.index())
    }

    pub fn product_id(&self, name: &str) -> Option<ProductId> {
        self.by_name.get(name).copied()
    }

    pub fn postings(&self, namespace: Namespace) -> &BTreeMap<String, Posting> {
        self.map(namespace)
    }

    pub fn posting(&self, namespace: Namespace, name: &str) -> Option<&Posting> {
        self.map(namespace).get(name)
    }

    pub fn distinct_names(&self, namespace: Namespace) -> usize {
        self.map(namespace).len()
    }

    /// Number of products defining `name`; 0 when absent.
    pub fn frequency(&self, namespace: Namespace, name: &str) -> usize {
        self.posting(namespace, name).map_or(0, Posting::frequency)
    }

    pub fn idf(&self, namespace: Namespace, name: &str) -> Result<f64, IndexError> {
        match self.frequency(namespace, name) {
            0 => Err(IndexError::UnknownIdentifier {
                namespace,
                name: name.to_owned(),
            }),
            f => Ok(inverse_document_frequency(self.total_products(), f)),
        }
    }
}

/// The K most frequent names of a namespace, excluded from fingerprints.
#[derive(Clone, Debug, PartialEq)]
pub struct Blocklist {
    pub namespace: Namespace,
    /// Requested size.
    pub size: usize,
    entries: BTreeSet<String>,
    min_frequency: Option<usize>,
}

impl Blocklist {
    pub fn empty(namespace: Namespace) -> Self {
        Blocklist {
            namespace,
            size: 0,
            entries: BTreeSet::new(),
            min_frequency: None,
        }
    }

    pub fn from_names<I, S>(namespace: Namespace, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let entries: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        Blocklist {
            namespace,
            size: entries.len(),
            entries,
            min_frequency: None,
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeSet<String> {
        &self.entries
    }

    /// Lowest frequency among the entries, i.e. the cut-off frequency.
    pub fn min_frequency(&self) -> Option<usize> {
        self.min_frequency
    }
}

/// Top-`k` names by descending frequency; ties at the cut are resolved by
/// ascending name.
pub fn build_blocklist(index: &InvertedIndex, namespace: Namespace, k: usize) -> Blocklist {
    let mut ranked: Vec<(usize, &str)> = index
        .postings(namespace)
        .iter()
        .map(|(name, posting)| (posting.frequency(), name.as_str()))
        .collect();
    let order = |a: &(usize, &str), b: &(usize, &str)| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1));
    let take = k.min(ranked.len());
    if take > 0 && take < ranked.len() {
        ranked.select_nth_unstable_by(take - 1, order);
    }
    ranked.truncate(take);
    Blocklist {
        namespace,
        size: k,
        min_frequency: ranked.iter().map(|&(f, _)| f).min(),
        entries: ranked.into_iter().map(|(_, name)| name.to_owned()).collect(),
    }
}
