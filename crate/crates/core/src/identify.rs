//! The iterated identification procedure: sample a fingerprint, match it,
//! inspect only the top-ranked candidate, and retry with a fresh sample.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::ReleaseRecord;
use crate::index::{Blocklist, InvertedIndex, ProductId};
use crate::sample::{sample_with, trial_seed, Fingerprint, SampleError, Strategy};
use crate::search::{match_fingerprint, rank, Candidate, RankedCandidates, Verifier};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifyConfig {
    pub fingerprint_size: usize,
    pub trials: u32,
    pub strategy: Strategy,
    pub seed: u64,
}

impl Default for IdentifyConfig {
    fn default() -> Self {
        IdentifyConfig {
            fingerprint_size: 3,
            trials: 5,
            strategy: Strategy::SingleFile,
            seed: 0,
        }
    }
}

/// One sample-match-rank round.
#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub fingerprint: Fingerprint,
    pub ranked: RankedCandidates,
}

/// Runs trial number `trial` (1-based) with the sub-seed derived from `seed`.
pub fn run_trial(
    release: &ReleaseRecord,
    index: &InvertedIndex,
    blocklist: &Blocklist,
    size: usize,
    strategy: Strategy,
    seed: u64,
    trial: u32,
) -> Result<Trial, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, u64::from(trial)));
    let fingerprint = sample_with(release, strategy, size, blocklist, &mut rng)?;
    let matched = match_fingerprint(index, &fingerprint.names);
    let ranked = rank(index, &matched);
    Ok(Trial { fingerprint, ranked })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub fingerprint: Option<Fingerprint>,
    pub error: Option<SampleError>,
    pub candidates: usize,
    pub top: Option<Candidate>,
    pub verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Found { product: ProductId, trial: u32 },
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentifyResult {
    pub outcome: Outcome,
    pub trials: Vec<TrialRecord>,
}

impl IdentifyResult {
    /// True when no trial could draw a fingerprint at all.
    pub fn unsampleable(&self) -> bool {
        !self.trials.is_empty() && self.trials.iter().all(|t| t.fingerprint.is_none())
    }
}

/// Up to `cfg.trials` rounds; stops at the first top candidate the verifier accepts.
pub fn identify<V: Verifier + ?Sized>(
    release: &ReleaseRecord,
    index: &InvertedIndex,
    cfg: &IdentifyConfig,
    blocklist: &Blocklist,
    verifier: &V,
) -> Result<IdentifyResult, SampleError> {
    if !release.has_file_boundaries() {
        return Err(SampleError::NoFileBoundaries);
    }
    if cfg.fingerprint_size == 0 {
        return Err(SampleError::InvalidSize);
    }
    let subject = release.defs();
    let mut trials = Vec::new();

    for t in 1..=cfg.trials {
        let trial = match run_trial(release, index, blocklist, cfg.fingerprint_size, cfg.strategy, cfg.seed, t) {
            Ok(trial) => trial,
            Err(err) => {
                trials.push(TrialRecord {
                    trial: t,
                    fingerprint: None,
                    error: Some(err),
                    candidates: 0,
                    top: None,
                    verified: false,
                });
                continue;
            }
        };
        let top = trial.ranked.top().cloned();
        let verified = top
            .as_ref()
            .is_some_and(|c| verifier.verify(index, &subject, c.id));
        trials.push(TrialRecord {
            trial: t,
            fingerprint: Some(trial.fingerprint),
            error: None,
            candidates: trial.ranked.len(),
            top: top.clone(),
            verified,
        });
        if let (true, Some(top)) = (verified, top) {
            return Ok(IdentifyResult {
                outcome: Outcome::Found { product: top.id, trial: t },
                trials,
            });
        }
    }
    Ok(IdentifyResult {
        outcome: Outcome::NotFound,
        trials,
    })
}
