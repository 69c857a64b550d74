//! Randomized fingerprint sampling from a subject release.
//!
//! Randomness comes from ChaCha8 seeded with a 64-bit seed
//! (`ChaCha8Rng::seed_from_u64`), whose output stream is fixed across
//! platforms. Draws use `rand` 0.8's value-stable `gen_range` and
//! `seq::index::sample`, so a given seed always yields the same fingerprint.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ReleaseRecord;
use crate::index::Blocklist;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// All names come from one file.
    SingleFile,
    /// Each name comes from a different file.
    DisjointFiles,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::SingleFile => "single-file",
            Strategy::DisjointFiles => "disjoint-files",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintSource {
    pub path: String,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    /// Distinct code names, in draw order.
    pub names: Vec<String>,
    /// The file each name was drawn from, parallel to `names`.
    pub sources: Vec<FingerprintSource>,
    pub strategy: Strategy,
}

impl Fingerprint {
    pub fn size(&self) -> usize {
        self.names.len()
    }

    /// The first `n` names, with their sources.
    pub fn prefix(&self, n: usize) -> Fingerprint {
        Fingerprint {
            names: self.names.iter().take(n).cloned().collect(),
            sources: self.sources.iter().take(n).cloned().collect(),
            strategy: self.strategy,
        }
    }

    pub fn source_paths(&self) -> BTreeSet<&str> {
        self.sources.iter().map(|s| s.path.as_str()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SamplerConfig<'a> {
    /// Fingerprint size N, at least 1.
    pub size: usize,
    pub blocklist: &'a Blocklist,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum SampleError {
    #[error("release has no file boundaries")]
    NoFileBoundaries,
    #[error("release does not hold enough eligible identifiers for the fingerprint")]
    InsufficientIdentifiers,
    #[error("fingerprint size must be at least 1")]
    InvalidSize,
}

/// Names of a file that are not blocklisted.
pub fn eligible_names<'a>(names: &'a BTreeSet<String>, blocklist: &Blocklist) -> BTreeSet<&'a str> {
    names
        .iter()
        .map(String::as_str)
        .filter(|name| !blocklist.contains(name))
        .collect()
}

pub fn sample(
    release: &ReleaseRecord,
    strategy: Strategy,
    cfg: &SamplerConfig<'_>,
) -> Result<Fingerprint, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    sample_with(release, strategy, cfg.size, cfg.blocklist, &mut rng)
}

pub fn sample_single_file(release: &ReleaseRecord, cfg: &SamplerConfig<'_>) -> Result<Fingerprint, SampleError> {
    sample(release, Strategy::SingleFile, cfg)
}

pub fn sample_disjoint_files(release: &ReleaseRecord, cfg: &SamplerConfig<'_>) -> Result<Fingerprint, SampleError> {
    sample(release, Strategy::DisjointFiles, cfg)
}

/// Sampling with a caller-supplied generator.
pub fn sample_with<R: Rng + ?Sized>(
    release: &ReleaseRecord,
    strategy: Strategy,
    size: usize,
    blocklist: &Blocklist,
    rng: &mut R,
) -> Result<Fingerprint, SampleError> {
    if size == 0 {
        return Err(SampleError::InvalidSize);
    }
    let files = release.files().ok_or(SampleError::NoFileBoundaries)?;
    match strategy {
        Strategy::SingleFile => single_file(files, size, blocklist, rng),
        Strategy::DisjointFiles => disjoint_files(files, size, blocklist, rng),
    }
}

/// Draws files uniformly without replacement until one holds `size`
/// eligible names, then draws `size` of them uniformly.
fn single_file<R: Rng + ?Sized>(
    files: &BTreeMap<String, BTreeSet<String>>,
    size: usize,
    blocklist: &Blocklist,
    rng: &mut R,
) -> Result<Fingerprint, SampleError> {
    let mut order: Vec<(&String, &BTreeSet<String>)> = files.iter().collect();
    for drawn in 0..order.len() {
        let pick = rng.gen_range(drawn..order.len());
        order.swap(drawn, pick);
        let (path, names) = order[drawn];
        if names.len() < size {
            continue;
        }
        let eligible: Vec<&str> = eligible_names(names, blocklist).into_iter().collect();
        if eligible.len() < size {
            continue;
        }
        let chosen: Vec<&str> = index::sample(rng, eligible.len(), size)
            .into_iter()
            .map(|i| eligible[i])
            .collect();
        return Ok(Fingerprint {
            names: chosen.iter().map(|&n| n.into()).collect(),
            sources: chosen
                .iter()
                .map(|&n| FingerprintSource {
                    path: path.clone(),
                    name: n.into(),
                })
                .collect(),
            strategy: Strategy::SingleFile,
        });
    }
    Err(SampleError::InsufficientIdentifiers)
}

/// Draws files uniformly without replacement; each takes a uniformly random
/// eligible name not yet taken. A file whose names are all taken tries to
/// free one by reassigning earlier files (an augmenting path); if that fails
/// too, it is replaced by the next drawn file. The reassignment makes the
/// search complete: it fails only when no `size` distinct files can carry
/// `size` distinct names.
fn disjoint_files<R: Rng + ?Sized>(
    files: &BTreeMap<String, BTreeSet<String>>,
    size: usize,
    blocklist: &Blocklist,
    rng: &mut R,
) -> Result<Fingerprint, SampleError> {
    let mut order: Vec<(&String, &BTreeSet<String>)> = files.iter().collect();
    let mut matching = Matching::default();

    for drawn in 0..order.len() {
        let pick = rng.gen_range(drawn..order.len());
        order.swap(drawn, pick);
        let (path, names) = order[drawn];
        let mut eligible: Vec<&str> = eligible_names(names, blocklist).into_iter().collect();
        if eligible.is_empty() {
            continue;
        }
        shuffle(&mut eligible, rng);
        let file = matching.add_file(path, eligible);
        if matching.assign_free(file) || matching.augment(file) {
            matching.assigned += 1;
            if matching.assigned == size {
                return Ok(matching.into_fingerprint());
            }
        }
    }
    Err(SampleError::InsufficientIdentifiers)
}

fn shuffle<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

#[derive(Default)]
struct Matching<'a> {
    paths: Vec<&'a str>,
    /// Eligible names per file, in shuffled order.
    candidates: Vec<Vec<&'a str>>,
    name_of: Vec<Option<&'a str>>,
    owner: BTreeMap<&'a str, usize>,
    assigned: usize,
}

impl<'a> Matching<'a> {
    fn add_file(&mut self, path: &'a str, names: Vec<&'a str>) -> usize {
        self.paths.push(path);
        self.candidates.push(names);
        self.name_of.push(None);
        self.paths.len() - 1
    }

    fn assign_free(&mut self, file: usize) -> bool {
        let Some(name) = self.candidates[file]
            .iter()
            .copied()
            .find(|n| !self.owner.contains_key(n))
        else {
            return false;
        };
        self.owner.insert(name, file);
        self.name_of[file] = Some(name);
        true
    }

    fn augment(&mut self, file: usize) -> bool {
        let mut visited = BTreeSet::new();
        self.try_augment(file, &mut visited)
    }

    fn try_augment(&mut self, file: usize, visited: &mut BTreeSet<&'a str>) -> bool {
        for at in 0..self.candidates[file].len() {
            let name = self.candidates[file][at];
            if !visited.insert(name) {
                continue;
            }
            let holder = self.owner.get(name).copied();
            if holder.is_none_or(|other| self.try_augment(other, visited)) {
                self.owner.insert(name, file);
                self.name_of[file] = Some(name);
                return true;
            }
        }
        false
    }

    fn into_fingerprint(self) -> Fingerprint {
        let (names, sources) = self
            .paths
            .iter()
            .zip(&self.name_of)
            .filter_map(|(path, name)| {
                let name = (*name)?;
                Some((
                    String::from(name),
                    FingerprintSource {
                        path: (*path).into(),
                        name: name.into(),
                    },
                ))
            })
            .unzip();
        Fingerprint {
            names,
            sources,
            strategy: Strategy::DisjointFiles,
        }
    }
}

/// Per-trial sub-seed: the SplitMix64 output function applied to
/// `seed + trial * 0x9E3779B97F4A7C15` (wrapping).
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
