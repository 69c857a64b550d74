//! Tab-separated renderings of tables and reports.

use std::fmt::Write;

use idprov_core::eval::{EvalReport, VariantReport};
use idprov_core::search::RankedCandidates;
use idprov_core::stats::DistributionRow;

/// `frequency identifiers [instances] proportion cumulative`, percentages to two decimals.
pub fn distribution_tsv(rows: &[DistributionRow], instances: bool) -> String {
    let mut out = String::new();
    if instances {
        out.push_str("frequency\tidentifiers\tinstances\tproportion\tcumulative\n");
    } else {
        out.push_str("frequency\tidentifiers\tproportion\tcumulative\n");
    }
    for row in rows {
        let _ = write!(out, "{}\t{}\t", row.bucket, row.identifiers);
        if instances {
            let _ = write!(out, "{}\t", row.instances);
        }
        let _ = writeln!(out, "{:.2}\t{:.2}", row.proportion, row.cumulative);
    }
    out
}

/// `rank product score`, ranks from 1; products without a score leave it empty.
pub fn ranked_tsv(ranked: &RankedCandidates, scores: impl Fn(usize) -> Option<f64>) -> String {
    let mut out = String::new();
    for (at, c) in ranked.entries.iter().enumerate() {
        let score = scores(c.id.index()).map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{}\t{}\t{}", at + 1, c.name, score);
    }
    out
}

pub fn eval_tsv(report: &EvalReport) -> String {
    let mut out = String::new();
    let cfg = &report.config;
    let _ = writeln!(out, "# fingerprint_size\t{}", cfg.fingerprint_size);
    let _ = writeln!(out, "# strategy\t{}", cfg.strategy.as_str());
    let _ = writeln!(out, "# seed\t{}", cfg.seed);
    let _ = writeln!(out, "# trials\t{}", cfg.trials_per_subject);
    let _ = writeln!(out, "# subjects\t{}", report.subjects);
    let _ = writeln!(out, "# discarded\t{}", report.discarded);
    variant(&mut out, "per-outcome", &report.per_outcome);
    variant(&mut out, "best-of-trials", &report.best_of_trials);
    let id = &report.identify;
    out.push('\n');
    let _ = writeln!(out, "# identify");
    let _ = writeln!(out, "found\tinspected\trecall\tprecision");
    let _ = writeln!(out, "{}\t{}\t{:.4}\t{:.4}", id.found, id.inspected, id.recall, id.precision);
    out
}

fn variant(out: &mut String, name: &str, v: &VariantReport) {
    let s = &v.summary;
    out.push('\n');
    let _ = writeln!(out, "# {name}");
    let _ = writeln!(out, "# outcomes\t{}", s.outcomes);
    let _ = writeln!(out, "# empty\t{}\t{}", s.empty, s.empty_test_or_example);
    let _ = writeln!(out, "# successful\t{}", s.successful);
    let _ = writeln!(out, "# failed\t{}\t{}", s.failed, s.failed_test_or_example);
    let _ = writeln!(out, "# size_median\t{}", s.median_size);
    let _ = writeln!(out, "# size_mean\t{:.4}", s.mean_size);
    let _ = writeln!(out, "# size_max\t{}", s.max_size);
    out.push_str("k\trelevant\trecall\tprecision\tfscore\n");
    for row in &v.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}",
            row.k, row.relevant, row.recall, row.precision, row.fscore
        );
    }
}

/// The `k` rows of one variant block of [`eval_tsv`] output, as
/// `(k, relevant, recall, precision, fscore)`.
pub fn parse_eval_rows(tsv: &str, variant: &str) -> Vec<(usize, usize, f64, f64, f64)> {
    let marker = format!("# {variant}");
    let mut rows = Vec::new();
    let mut inside = false;
    for line in tsv.lines() {
        if line.starts_with("# ") && !line.contains('\t') {
            inside = line == marker;
            continue;
        }
        if !inside || line.starts_with('#') || line.starts_with("k\t") || line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if let [k, relevant, recall, precision, fscore] = f[..] {
            if let (Ok(k), Ok(relevant), Ok(recall), Ok(precision), Ok(fscore)) =
                (k.parse(), relevant.parse(), recall.parse(), precision.parse(), fscore.parse())
            {
                rows.push((k, relevant, recall, precision, fscore));
            }
        }
    }
    rows
}
