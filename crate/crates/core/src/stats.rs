//! Distribution statistics over an index: how many names occur at each
//! document frequency, weighted by names or by instances.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::index::{InvertedIndex, Namespace};

/// Frequency classes: 1 through 10 individually, then 11-100, 101-1000, 1001-.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FrequencyBucket {
    Exact(u8),
    Tens,
    Hundreds,
    Thousands,
}

impl FrequencyBucket {
    pub fn of(frequency: usize) -> FrequencyBucket {
        match frequency {
            0..=10 => FrequencyBucket::Exact(frequency as u8),
            11..=100 => FrequencyBucket::Tens,
            101..=1000 => FrequencyBucket::Hundreds,
            _ => FrequencyBucket::Thousands,
        }
    }
}

impl fmt::Display for FrequencyBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencyBucket::Exact(n) => write!(f, "{n}"),
            FrequencyBucket::Tens => f.write_str("11-100"),
            FrequencyBucket::Hundreds => f.write_str("101-1000"),
            FrequencyBucket::Thousands => f.write_str("1001-"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub bucket: FrequencyBucket,
    /// Distinct names in the bucket.
    pub identifiers: u64,
    /// Sum of frequencies of those names.
    pub instances: u64,
    /// Share of the table total, in percent.
    pub proportion: f64,
    pub cumulative: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Weight {
    Names,
    Instances,
}

/// Distribution of distinct names over frequency classes; empty buckets are omitted.
pub fn frequency_distribution(index: &InvertedIndex, namespace: Namespace) -> Vec<DistributionRow> {
    distribution(index, namespace, Weight::Names)
}

/// Same buckets, with every name weighted by its frequency.
pub fn instance_distribution(index: &InvertedIndex, namespace: Namespace) -> Vec<DistributionRow> {
    distribution(index, namespace, Weight::Instances)
}

fn distribution(index: &InvertedIndex, namespace: Namespace, weight: Weight) -> Vec<DistributionRow> {
    let mut buckets: BTreeMap<FrequencyBucket, (u64, u64)> = BTreeMap::new();
    for posting in index.postings(namespace).values() {
        let f = posting.frequency() as u64;
        let slot = buckets.entry(FrequencyBucket::of(posting.frequency())).or_default();
        slot.0 += 1;
        slot.1 += f;
    }
    let total: u64 = buckets
        .values()
        .map(|&(names, instances)| match weight {
            Weight::Names => names,
            Weight::Instances => instances,
        })
        .sum();

    let mut running = 0u64;
    buckets
        .into_iter()
        .map(|(bucket, (identifiers, instances))| {
            let part = match weight {
                Weight::Names => identifiers,
                Weight::Instances => instances,
            };
            running += part;
            DistributionRow {
                bucket,
                identifiers,
                instances,
                proportion: percent(part, total),
                cumulative: percent(running, total),
            }
        })
        .collect()
}

fn percent(part: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * part as f64 / total as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KindOverlap {
    /// Code names declared both as a class and as a function.
    pub both: usize,
    pub distinct: usize,
    /// `both / distinct`, in percent.
    pub proportion: f64,
}

pub fn kind_overlap(index: &InvertedIndex) -> KindOverlap {
    let postings = index.postings(Namespace::Code);
    let both = postings.values().filter(|p| p.kinds.is_both()).count();
    KindOverlap {
        both,
        distinct: postings.len(),
        proportion: percent(both as u64, postings.len() as u64),
    }
}
