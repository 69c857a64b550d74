//! Recall/precision at k over a golden set of subjects with known origins.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ReleaseRecord;
use crate::identify::run_trial;
use crate::index::{Blocklist, InvertedIndex, ProductId};
use crate::sample::{SampleError, Strategy};
use crate::search::RankedCandidates;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("precision is undefined for an empty result")]
    UndefinedForEmptyResult,
    #[error("{} golden subject(s) name a product missing from the index", .0.len())]
    TruthMissing(Vec<MissingTruth>),
    #[error("subject {subject}: {source}")]
    Sample { subject: usize, source: SampleError },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingTruth {
    pub subject: usize,
    pub truth: String,
}

/// 1 if `truth` is among the first `k` results, else 0.
pub fn recall_at_k(ranked: &RankedCandidates, truth: ProductId, k: usize) -> u8 {
    ranked.position(truth).is_some_and(|at| at < k) as u8
}

/// `1 / min(k, n)` if `truth` is among the first `k` of `n` results, else 0.
pub fn precision_at_k(ranked: &RankedCandidates, truth: ProductId, k: usize) -> Result<f64, EvalError> {
    if ranked.is_empty() {
        return Err(EvalError::UndefinedForEmptyResult);
    }
    Ok(precision_from_rank(ranked.position(truth), ranked.len(), k))
}

fn precision_from_rank(truth_rank: Option<usize>, n: usize, k: usize) -> f64 {
    match truth_rank {
        Some(at) if at < k => 1.0 / k.min(n) as f64,
        _ => 0.0,
    }
}

fn recall_from_rank(truth_rank: Option<usize>, k: usize) -> f64 {
    if truth_rank.is_some_and(|at| at < k) {
        1.0
    } else {
        0.0
    }
}

/// True when a directory component of `path` contains `test` or `example`.
pub fn is_test_or_example_path(path: &str) -> bool {
    let mut components: Vec<&str> = path.split('/').collect();
    components.pop();
    components
        .iter()
        .any(|c| c.contains("test") || c.contains("example"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenPair {
    pub subject: ReleaseRecord,
    /// Name of the true origin product.
    pub truth: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub fingerprint_size: usize,
    pub strategy: Strategy,
    /// Every subject draws its trials from this seed, exactly as
    /// [`crate::identify::identify`] would with the same seed.
    pub seed: u64,
    pub trials_per_subject: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            fingerprint_size: 3,
            strategy: Strategy::SingleFile,
            seed: 0,
            trials_per_subject: 5,
        }
    }
}

/// One fingerprint-match-rank result for a subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub subject: usize,
    pub trial: u32,
    pub result_size: usize,
    /// Zero-based rank of the true origin, if returned.
    pub truth_rank: Option<usize>,
    pub top: Option<ProductId>,
    /// A sampled file sits under a test or example directory.
    pub test_or_example: bool,
}

impl OutcomeRecord {
    pub fn is_empty(&self) -> bool {
        self.result_size == 0
    }

    pub fn is_successful(&self) -> bool {
        self.truth_rank.is_some()
    }

    pub fn is_failed(&self) -> bool {
        !self.is_empty() && !self.is_successful()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRow {
    pub k: usize,
    /// Outcomes with at least `k` candidates.
    pub relevant: usize,
    pub relevant_proportion: f64,
    pub recall: f64,
    pub precision: f64,
    pub fscore: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub outcomes: usize,
    pub empty: usize,
    pub successful: usize,
    pub failed: usize,
    pub empty_test_or_example: usize,
    pub failed_test_or_example: usize,
    pub median_size: f64,
    pub mean_size: f64,
    pub max_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub summary: OutcomeSummary,
    pub rows: Vec<KRow>,
}

/// Inspecting only the top candidate of each trial, with a perfect inspector.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentifySummary {
    pub subjects: usize,
    pub found: usize,
    pub inspected: usize,
    pub recall: f64,
    pub precision: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    /// Subjects that produced at least one fingerprint.
    pub subjects: usize,
    /// Subjects without enough eligible identifiers for any fingerprint.
    pub discarded: usize,
    pub per_outcome: VariantReport,
    pub best_of_trials: VariantReport,
    pub identify: IdentifySummary,
    pub outcomes: Vec<OutcomeRecord>,
}

/// F-score; 0 when both inputs are 0.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn evaluate(
    golden: &[GoldenPair],
    index: &InvertedIndex,
    cfg: &EvalConfig,
    blocklist: &Blocklist,
) -> Result<EvalReport, EvalError> {
    let missing: Vec<MissingTruth> = golden
        .iter()
        .enumerate()
        .filter(|(_, pair)| index.product_id(&pair.truth).is_none())
        .map(|(subject, pair)| MissingTruth {
            subject,
            truth: pair.truth.clone(),
        })
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::TruthMissing(missing));
    }

    let mut per_subject: Vec<Vec<OutcomeRecord>> = Vec::new();
    let mut discarded = 0;
    for (subject, pair) in golden.iter().enumerate() {
        let truth = index.product_id(&pair.truth).expect("checked above");
        let outcomes = subject_outcomes(subject, pair, truth, index, cfg, blocklist)?;
        if outcomes.is_empty() {
            discarded += 1;
        } else {
            per_subject.push(outcomes);
        }
    }

    let all: Vec<OutcomeRecord> = per_subject.iter().flatten().cloned().collect();
    let best: Vec<OutcomeRecord> = per_subject.iter().map(|o| best_outcome(o).clone()).collect();
    let identify = identify_summary(&per_subject, golden, index);

    Ok(EvalReport {
        config: *cfg,
        subjects: per_subject.len(),
        discarded,
        per_outcome: variant_report(&all),
        best_of_trials: variant_report(&best),
        identify,
        outcomes: all,
    })
}

fn subject_outcomes(
    subject: usize,
    pair: &GoldenPair,
    truth: ProductId,
    index: &InvertedIndex,
    cfg: &EvalConfig,
    blocklist: &Blocklist,
) -> Result<Vec<OutcomeRecord>, EvalError> {
    let mut outcomes = Vec::new();
    for t in 1..=cfg.trials_per_subject {
        match run_trial(&pair.subject, index, blocklist, cfg.fingerprint_size, cfg.strategy, cfg.seed, t) {
            Ok(trial) => outcomes.push(OutcomeRecord {
                subject,
                trial: t,
                result_size: trial.ranked.len(),
                truth_rank: trial.ranked.position(truth),
                top: trial.ranked.top().map(|c| c.id),
                test_or_example: trial
                    .fingerprint
                    .sources
                    .iter()
                    .any(|s| is_test_or_example_path(&s.path)),
            }),
            Err(SampleError::InsufficientIdentifiers) => {}
            Err(source) => return Err(EvalError::Sample { subject, source }),
        }
    }
    Ok(outcomes)
}

/// Successful outcomes first (best truth rank, then fewest candidates), then
/// empty ones, then failed ones; earliest trial on ties.
fn best_outcome(outcomes: &[OutcomeRecord]) -> &OutcomeRecord {
    let key = |o: &OutcomeRecord| match o.truth_rank {
        Some(at) => (0, at, o.result_size),
        None if o.is_empty() => (1, 0, 0),
        None => (2, 0, o.result_size),
    };
    outcomes
        .iter()
        .min_by_key(|o| (key(o), o.trial))
        .expect("subjects without outcomes are discarded")
}

fn identify_summary(per_subject: &[Vec<OutcomeRecord>], golden: &[GoldenPair], index: &InvertedIndex) -> IdentifySummary {
    let mut summary = IdentifySummary {
        subjects: per_subject.len(),
        ..IdentifySummary::default()
    };
    for outcomes in per_subject {
        let truth = index.product_id(&golden[outcomes[0].subject].truth);
        for outcome in outcomes {
            let Some(top) = outcome.top else { continue };
            summary.inspected += 1;
            if Some(top) == truth {
                summary.found += 1;
                break;
            }
        }
    }
    summary.recall = ratio(summary.found, summary.subjects);
    summary.precision = ratio(summary.found, summary.inspected);
    summary
}

fn ratio(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// The k values reported: 1 to 10, 100, and the largest result size.
pub fn report_ks(max_size: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (1..=10).collect();
    ks.push(100);
    if max_size > 0 {
        ks.push(max_size);
    }
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn variant_report(outcomes: &[OutcomeRecord]) -> VariantReport {
    let mut summary = OutcomeSummary {
        outcomes: outcomes.len(),
        ..OutcomeSummary::default()
    };
    for o in outcomes {
        if o.is_empty() {
            summary.empty += 1;
            summary.empty_test_or_example += o.test_or_example as usize;
        } else if o.is_successful() {
            summary.successful += 1;
        } else {
            summary.failed += 1;
            summary.failed_test_or_example += o.test_or_example as usize;
        }
    }
    let mut sizes: Vec<usize> = outcomes.iter().map(|o| o.result_size).collect();
    sizes.sort_unstable();
    summary.max_size = sizes.last().copied().unwrap_or(0);
    summary.mean_size = ratio_f(sizes.iter().sum::<usize>() as f64, sizes.len());
    summary.median_size = median(&sizes);

    let non_empty: Vec<&OutcomeRecord> = outcomes.iter().filter(|o| !o.is_empty()).collect();
    let rows = if outcomes.is_empty() {
        Vec::new()
    } else {
        report_ks(summary.max_size)
            .into_iter()
            .map(|k| {
                let recall = ratio_f(
                    outcomes.iter().map(|o| recall_from_rank(o.truth_rank, k)).sum(),
                    outcomes.len(),
                );
                let precision = ratio_f(
                    non_empty
                        .iter()
                        .map(|o| precision_from_rank(o.truth_rank, o.result_size, k))
                        .sum(),
                    non_empty.len(),
                );
                let relevant = outcomes.iter().filter(|o| o.result_size >= k).count();
                KRow {
                    k,
                    relevant,
                    relevant_proportion: ratio(relevant, outcomes.len()),
                    recall,
                    precision,
                    fscore: f_score(precision, recall),
                }
            })
            .collect()
    };
    VariantReport { summary, rows }
}

fn ratio_f(sum: f64, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn median(sorted: &[usize]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2] as f64,
        n => (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0,
    }
}
