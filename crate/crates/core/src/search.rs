//! Fingerprint matching, candidate ranking and top-candidate verification.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::{InvertedIndex, Namespace, Posting, ProductId};

/// Products whose Defs contain every name of the fingerprint.
///
/// Posting lists are intersected rarest first. A name missing from the
/// index empties the result.
pub fn match_fingerprint<S: AsRef<str>>(index: &InvertedIndex, names: &[S]) -> Vec<ProductId> {
    let mut postings: Vec<&Posting> = Vec::with_capacity(names.len());
    for name in names {
        match index.posting(Namespace::Code, name.as_ref()) {
            Some(posting) => postings.push(posting),
            None => return Vec::new(),
        }
    }
    postings.sort_by_key(|p| p.frequency());
    let Some((first, rest)) = postings.split_first() else {
        return Vec::new();
    };
    let mut result = first.products.clone();
    for posting in rest {
        if result.is_empty() {
            break;
        }
        intersect_into(&mut result, &posting.products);
    }
    result
}

/// Keeps the elements of `acc` that also occur in `other` (both ascending).
fn intersect_into(acc: &mut Vec<ProductId>, other: &[ProductId]) {
    let mut rest = other;
    acc.retain(|id| match rest.binary_search(id) {
        Ok(at) => {
            rest = &rest[at + 1..];
            true
        }
        Err(at) => {
            rest = &rest[at..];
            false
        }
    });
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: ProductId,
    pub name: String,
    /// Popularity score; products without one rank as 0.
    pub score: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidates {
    /// Descending score, ties by ascending product name.
    pub entries: Vec<Candidate>,
}

impl RankedCandidates {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self) -> Option<&Candidate> {
        self.entries.first()
    }

    /// Zero-based rank of `id`, if present.
    pub fn position(&self, id: ProductId) -> Option<usize> {
        self.entries.iter().position(|c| c.id == id)
    }
}

pub fn rank(index: &InvertedIndex, candidates: &[ProductId]) -> RankedCandidates {
    let mut entries: Vec<Candidate> = candidates
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter_map(|&id| {
            let product = index.product(id)?;
            Some(Candidate {
                id,
                name: product.name.clone(),
                score: product.score.unwrap_or(0.0),
            })
        })
        .collect();
    entries.sort_by(compare_candidates);
    RankedCandidates { entries }
}

fn compare_candidates(a: &Candidate, b: &Candidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.name.cmp(&b.name))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("subject defines no identifiers")]
    EmptySubject,
}

/// Subject-side containment: `|subject ∩ candidate| / |subject| >= tau`.
pub fn verify_jaccard<S: Ord>(
    subject: &BTreeSet<S>,
    candidate: &BTreeSet<S>,
    tau: f64,
) -> Result<bool, VerifyError> {
    if subject.is_empty() {
        return Err(VerifyError::EmptySubject);
    }
    let shared = subject.intersection(candidate).count();
    Ok(shared as f64 / subject.len() as f64 >= tau)
}

/// Decides whether the top-ranked candidate is the subject's origin.
pub trait Verifier {
    fn verify(&self, index: &InvertedIndex, subject: &BTreeSet<&str>, candidate: ProductId) -> bool;
}

impl<F> Verifier for F
where
    F: Fn(&InvertedIndex, &BTreeSet<&str>, ProductId) -> bool,
{
    fn verify(&self, index: &InvertedIndex, subject: &BTreeSet<&str>, candidate: ProductId) -> bool {
        self(index, subject, candidate)
    }
}

/// [`verify_jaccard`] evaluated against the candidate's posting memberships,
/// without materializing its Defs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContainmentVerifier {
    pub tau: f64,
}

impl Default for ContainmentVerifier {
    fn default() -> Self {
        ContainmentVerifier { tau: 0.5 }
    }
}

impl ContainmentVerifier {
    pub fn containment(index: &InvertedIndex, subject: &BTreeSet<&str>, candidate: ProductId) -> Option<f64> {
        if subject.is_empty() {
            return None;
        }
        let shared = subject
            .iter()
            .filter(|name| {
                index
                    .posting(Namespace::Code, name)
                    .is_some_and(|p| p.contains(candidate))
            })
            .count();
        Some(shared as f64 / subject.len() as f64)
    }
}

impl Verifier for ContainmentVerifier {
    fn verify(&self, index: &InvertedIndex, subject: &BTreeSet<&str>, candidate: ProductId) -> bool {
        ContainmentVerifier::containment(index, subject, candidate).is_some_and(|c| c >= self.tau)
    }
}

/// Accepts exactly one known product; stands in for a perfect inspector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownOrigin(pub ProductId);

impl Verifier for KnownOrigin {
    fn verify(&self, _: &InvertedIndex, _: &BTreeSet<&str>, candidate: ProductId) -> bool {
        candidate == self.0
    }
}
