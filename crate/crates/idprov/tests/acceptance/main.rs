//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.


use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use idprov::cli::run;
use idprov::report::parse_eval_rows;
use idprov::store;
use idprov_core::eval::{precision_at_k, recall_at_k};
use idprov_core::extract::{extract_code_identifiers, SourceFile};
use idprov_core::index::{build_blocklist, build_index, inverse_document_frequency, Blocklist, InvertedIndex, Namespace, ProductId};
use idprov_core::sample::{sample_with, SampleError, Strategy};
use idprov_core::search::{match_fingerprint, rank};
use idprov_core::ProductRecord;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use synth::{scan_defs, scan_match, skewed_corpus, small_corpus};

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let held: bool = $cond;
        if !held {
            return Err(format!($($fmt)+));
        }
    };
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    run: fn() -> Verdict,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "idf fidelity", budget: Duration::from_secs(1), run: idf_fidelity },
        Criterion { id: 2, title: "extraction matches ctags", budget: Duration::from_secs(5), run: extraction_oracle },
        Criterion { id: 3, title: "match equals full scan", budget: Duration::from_secs(30), run: match_oracle },
        Criterion { id: 4, title: "guaranteed recall of matching", budget: Duration::from_secs(30), run: guaranteed_recall },
        Criterion { id: 5, title: "monotonicity suite", budget: Duration::from_secs(60), run: monotonicity },
        Criterion { id: 6, title: "candidate shrinkage with fingerprint size", budget: Duration::from_secs(60), run: shrinkage_trend },
        Criterion { id: 7, title: "end-to-end evaluate", budget: Duration::from_secs(120), run: end_to_end },
        Criterion { id: 8, title: "performance floor", budget: Duration::from_secs(180), run: performance },
        Criterion { id: 9, title: "persistence round trip", budget: Duration::from_secs(60), run: persistence },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let elapsed = start.elapsed();
        let verdict = match verdict {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; over the {:?} budget", c.budget)),
            v => v,
        };
        let (status, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += verdict.is_err() as usize;
        println!("criterion {} {status} {}: {detail} ({:.2} s)", c.id, c.title, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}

fn idf_fidelity() -> Verdict {
    let code = inverse_document_frequency(244_084, 2230);
    let files = inverse_document_frequency(244_084, 551);
    ensure!((code - 2.039).abs() <= 0.002, "idf(2230) = {code}");
    ensure!((files - 2.646).abs() <= 0.002, "idf(551) = {files}");
    Ok(format!("idf(2230) = {code:.4}, idf(551) = {files:.4}"))
}

fn extraction_oracle() -> Verdict {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/ctags");
    let mut sources: Vec<PathBuf> = fs::read_dir(root.join("src"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "py"))
        .collect();
    sources.sort();
    ensure!(sources.len() >= 20, "only {} fixtures", sources.len());
    let mut mismatched = Vec::new();
    for src in &sources {
        let stem = src.file_stem().unwrap().to_string_lossy().into_owned();
        let expected: BTreeSet<(String, String)> = fs::read_to_string(root.join("expected").join(format!("{stem}.tags")))
            .map_err(|e| e.to_string())?
            .lines()
            .filter_map(|l| l.split_once('\t'))
            .map(|(k, n)| (k.to_owned(), n.to_owned()))
            .collect();
        let file = SourceFile::from_bytes(stem.clone(), &fs::read(src).unwrap());
        let got: BTreeSet<(String, String)> = extract_code_identifiers(&file.text)
            .into_iter()
            .map(|id| (id.kind.as_str().to_owned(), id.name))
            .collect();
        if got != expected {
            mismatched.push(stem);
        }
    }
    ensure!(mismatched.is_empty(), "mismatched fixtures: {mismatched:?}");
    Ok(format!("{} fixtures, exact set equality", sources.len()))
}

fn random_fingerprint<R: Rng>(rng: &mut R, products: &[ProductRecord]) -> Vec<String> {
    let size = rng.gen_range(1..=5);
    let mut names: Vec<String> = if rng.gen_bool(0.6) {
        let owner = &products[rng.gen_range(0..products.len())];
        let mut defs: Vec<String> = owner.defs().into_iter().map(str::to_owned).collect();
        defs.shuffle(rng);
        defs
    } else {
        Vec::new()
    };
    names.truncate(size);
    while names.len() < size {
        let name = if rng.gen_bool(0.05) { "zz_unindexed".to_owned() } else { format!("v{}", rng.gen_range(0..400)) };
        if !names.contains(&name) {
            names.push(name);
        }
    }
    names
}

fn ids(raw: Vec<u32>) -> Vec<ProductId> {
    raw.into_iter().map(ProductId).collect()
}

fn match_oracle() -> Verdict {
    let mut checked = 0;
    let mut non_empty = 0;
    for corpus in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + corpus);
        let products = small_corpus(&mut rng, 200, 50);
        let index = build_index(&products).map_err(|e| e.to_string())?;
        let defs: Vec<_> = products.iter().map(|p| p.defs()).collect();
        for _ in 0..1000 {
            let names = random_fingerprint(&mut rng, &products);
            let got = match_fingerprint(&index, &names);
            let expected = ids(scan_defs(&defs, &names));
            ensure!(got == expected, "corpus {corpus}, fingerprint {names:?}: {got:?} != {expected:?}");
            checked += 1;
            non_empty += !got.is_empty() as usize;
        }
    }
    Ok(format!("{checked} fingerprints over 50 corpora ({non_empty} non-empty), 0 mismatches"))
}

/// Draws fingerprints from indexed releases until `wanted` succeed, calling
/// `check` with the corpus, its index, the source product and the names.
fn sampled_fingerprints(
    seed: u64,
    wanted: usize,
    size: impl Fn(&mut ChaCha8Rng) -> usize,
    mut check: impl FnMut(&[ProductRecord], &InvertedIndex, &Blocklist, ProductId, Strategy, &[String]) -> Result<(), String>,
) -> Result<[usize; 2], String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_strategy = [0usize; 2];
    while per_strategy.iter().sum::<usize>() < wanted {
        let products = small_corpus(&mut rng, 200, 50);
        let index = build_index(&products).map_err(|e| e.to_string())?;
        let block = build_blocklist(&index, Namespace::Code, rng.gen_range(0..=30));
        for _ in 0..250 {
            let p = rng.gen_range(0..products.len());
            let release = &products[p].releases[rng.gen_range(0..products[p].releases.len())];
            let (slot, strategy) = if rng.gen_bool(0.5) { (0, Strategy::SingleFile) } else { (1, Strategy::DisjointFiles) };
            let n = size(&mut rng);
            match sample_with(release, strategy, n, &block, &mut rng) {
                Ok(fp) => {
                    check(&products, &index, &block, ProductId(p as u32), strategy, &fp.names)?;
                    per_strategy[slot] += 1;
                }
                Err(SampleError::InsufficientIdentifiers) => {}
                Err(e) => return Err(e.to_string()),
            }
            if per_strategy.iter().sum::<usize>() >= wanted {
                break;
            }
        }
    }
    Ok(per_strategy)
}

fn guaranteed_recall() -> Verdict {
    let counts = sampled_fingerprints(
        4,
        10_000,
        |rng| rng.gen_range(1..=5),
        |_, index, _, source, strategy, names| {
            let matched = match_fingerprint(index, names);
            ensure!(matched.contains(&source), "{strategy:?} fingerprint {names:?} misses its source {source}");
            Ok(())
        },
    )?;
    ensure!(counts[0] >= 1000 && counts[1] >= 1000, "strategy counts {counts:?}");
    Ok(format!(
        "{} fingerprints ({} single-file, {} disjoint-files), source always matched",
        counts[0] + counts[1],
        counts[0],
        counts[1]
    ))
}

fn monotonicity() -> Verdict {
    let mut nested = 0;
    sampled_fingerprints(
        51,
        1500,
        |rng| rng.gen_range(2..=5),
        |_, index, _, _, _, names| {
            for n in 1..names.len() {
                let wide = match_fingerprint(index, &names[..n]);
                let narrow = match_fingerprint(index, &names[..=n]);
                ensure!(narrow.iter().all(|id| wide.contains(id)), "match({:?}) not within match({:?})", &names[..=n], &names[..n]);
                nested += 1;
            }
            Ok(())
        },
    )?;
    ensure!(nested >= 1000, "only {nested} nested pairs");

    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let mut blocklist_checks = 0;
    let mut sizes = [Vec::new(), Vec::new()];
    while blocklist_checks < 1000 {
        let products = small_corpus(&mut rng, 200, 50);
        let index = build_index(&products).map_err(|e| e.to_string())?;
        let small_k = rng.gen_range(0..10);
        let large_k = small_k + rng.gen_range(1..30);
        let small = build_blocklist(&index, Namespace::Code, small_k);
        let large = build_blocklist(&index, Namespace::Code, large_k);
        ensure!(small.entries().is_subset(large.entries()), "blocklist K={small_k} not within K={large_k}");
        for _ in 0..100 {
            let p = rng.gen_range(0..products.len());
            let release = &products[p].releases[0];
            let seed = rng.gen();
            let draw = |block: &Blocklist| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                sample_with(release, Strategy::SingleFile, 2, block, &mut r).ok()
            };
            for (slot, block) in [&small, &large].into_iter().enumerate() {
                if let Some(fp) = draw(block) {
                    sizes[slot].push(match_fingerprint(&index, &fp.names).len());
                }
            }
            let Some(fp) = draw(&large) else { continue };
            ensure!(fp.names.iter().all(|n| !small.contains(n)), "fingerprint eligible under K={large_k} but not K={small_k}");
            // Matching never consults the blocklist, so a fingerprint that stays
            // eligible keeps exactly the result it had under the smaller one.
            let matched = match_fingerprint(&index, &fp.names);
            ensure!(matched == ids(scan_match(&products, &fp.names)), "match of {:?} differs from scan", fp.names);
            ensure!(matched.contains(&ProductId(p as u32)), "source dropped under K={large_k}");
            blocklist_checks += 1;
        }
    }
    let medians: Vec<usize> = sizes
        .iter_mut()
        .map(|s| {
            s.sort_unstable();
            s[s.len() / 2]
        })
        .collect();

    let mut recall_checks = 0;
    sampled_fingerprints(
        53,
        1200,
        |rng| rng.gen_range(1..=2),
        |_, index, _, source, _, names| {
            let ranked = rank(index, &match_fingerprint(index, names));
            let n = ranked.len();
            let at = ranked.position(source).ok_or("source missing")?;
            for k in 1..=n + 1 {
                ensure!(recall_at_k(&ranked, source, k) <= recall_at_k(&ranked, source, k + 1), "recall@k decreased at k={k}");
                // precision only starts once the truth is inside the top k
                if k > at {
                    let p = precision_at_k(&ranked, source, k).map_err(|e| e.to_string())?;
                    let q = precision_at_k(&ranked, source, k + 1).map_err(|e| e.to_string())?;
                    ensure!(q <= p, "precision@k increased at k={k}");
                }
            }
            recall_checks += 1;
            Ok(())
        },
    )?;
    Ok(format!(
        "nested {nested}, blocklist {blocklist_checks}, recall@k {recall_checks} instances, 0 violations; median candidates {} -> {} with the larger blocklist",
        medians[0], medians[1]
    ))
}

fn median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

fn shrinkage_trend() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let products = skewed_corpus(&mut rng, 3000, 60_000);
    let index = build_index(&products).map_err(|e| e.to_string())?;
    let block = build_blocklist(&index, Namespace::Code, 300);
    let subjects = rand::seq::index::sample(&mut rng, products.len(), products.len());

    let mut sizes = [Vec::new(), Vec::new()];
    for p in subjects.iter() {
        if sizes[0].len() == 1000 {
            break;
        }
        let release = &products[p].releases[0];
        let seed = rng.gen();
        let mut results = Vec::new();
        for n in [1, 3] {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            match sample_with(release, Strategy::SingleFile, n, &block, &mut r) {
                Ok(fp) => results.push(match_fingerprint(&index, &fp.names).len()),
                Err(_) => break,
            }
        }
        if let [one, three] = results[..] {
            sizes[0].push(one);
            sizes[1].push(three);
        }
    }
    ensure!(sizes[0].len() == 1000, "only {} sampleable subjects", sizes[0].len());
    let singles: Vec<f64> = sizes
        .iter()
        .map(|s| 100.0 * s.iter().filter(|&&n| n == 1).count() as f64 / s.len() as f64)
        .collect();
    let m1 = median(&mut sizes[0]);
    let m3 = median(&mut sizes[1]);
    ensure!(m3 <= m1, "median at N=3 ({m3}) above N=1 ({m1})");
    ensure!(singles[1] >= singles[0] + 10.0, "singletons {:.1}% at N=1, {:.1}% at N=3", singles[0], singles[1]);
    Ok(format!(
        "1000 subjects: median {m1} -> {m3}, singleton results {:.1}% -> {:.1}%",
        singles[0], singles[1]
    ))
}

fn write(path: &Path, text: &str) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, text).unwrap();
}

/// 500 products with 9 unique names over 3 files plus names from a shared
/// pool of 300, each pool name used by 20 products. With `clones`, products
/// 2m+1 (m < 25) copy product 2m verbatim. Returns the product scores.
fn golden_corpus(dir: &Path, clones: bool) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(if clones { 71 } else { 70 });
    let mut scores: Vec<u32> = (1..=500).collect();
    scores.shuffle(&mut rng);
    let mut score_lines = String::new();
    let mut golden = String::new();
    for (p, score) in scores.iter().enumerate() {
        let source = if clones && p % 2 == 1 && p < 50 { p - 1 } else { p };
        for file in 0..3 {
            let mut text = String::new();
            for k in 0..3 {
                text.push_str(&format!("def handle_{source:03}_{file}_{k}(request):\n    return request\n\n"));
            }
            text.push_str(&format!("class Model{source:03}x{file}(object):\n    pass\n\n"));
            for c in 0..4 {
                let common = (source * 12 + file * 4 + c) % 300;
                text.push_str(&format!("def common_{common:03}():\n    pass\n\n"));
            }
            write(&dir.join(format!("corpus/p{p:03}/1.0/pkg{p:03}/mod{file}.py")), &text);
        }
        score_lines.push_str(&format!("p{p:03}\t{score}\n"));
        golden.push_str(&format!("{{\"subject_dir\": \"corpus/p{p:03}/1.0\", \"truth\": \"p{p:03}\"}}\n"));
    }
    write(&dir.join("scores.tsv"), &score_lines);
    write(&dir.join("golden.jsonl"), &golden);
    scores
}

fn cli(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("idprov").chain(args.iter().copied()), &mut out, &mut err);
    if code != 0 {
        return Err(format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    Ok(String::from_utf8(out).unwrap())
}

fn arg(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn build_and_evaluate(dir: &Path) -> Result<(String, serde_json::Value, InvertedIndex), String> {
    let index = dir.join("index");
    cli(&["build", "--corpus", &arg(&dir.join("corpus")), "--scores", &arg(&dir.join("scores.tsv")), "--out", &arg(&index)])?;
    let json = dir.join("report.json");
    let tsv = cli(&["evaluate", "--strict", "--seed", "2024", "--index", &arg(&index), &arg(&dir.join("golden.jsonl")), "--json", &arg(&json)])?;
    let report = serde_json::from_str(&fs::read_to_string(&json).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let index = store::load(&index).map_err(|e| e.to_string())?;
    Ok((tsv, report, index))
}

fn end_to_end() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    golden_corpus(dir.path(), false);
    let (tsv, report, _) = build_and_evaluate(dir.path())?;
    ensure!(report["subjects"] == 500, "subjects = {}", report["subjects"]);
    for variant in ["per-outcome", "best-of-trials"] {
        let rows = parse_eval_rows(&tsv, variant);
        let first = rows.first().ok_or("no rows")?;
        ensure!(first.0 == 1 && first.2 == 1.0 && first.3 == 1.0, "{variant} k=1 row {first:?}");
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scores = golden_corpus(dir.path(), true);
    let (_, report, index) = build_and_evaluate(dir.path())?;
    let mut clone_outcomes = 0;
    for outcome in report["outcomes"].as_array().ok_or("no outcomes")? {
        let subject = outcome["subject"].as_u64().unwrap() as usize;
        if subject >= 50 {
            continue;
        }
        let pair = [subject & !1, subject | 1];
        let higher = if scores[pair[0]] > scores[pair[1]] { pair[0] } else { pair[1] };
        let top = outcome["top"].as_u64().map(|id| index.products()[id as usize].name.clone());
        ensure!(outcome["result_size"] == 2, "clone subject {subject} has {} candidates", outcome["result_size"]);
        ensure!(top.as_deref() == Some(format!("p{higher:03}").as_str()), "clone subject {subject}: top {top:?}, expected p{higher:03}");
        clone_outcomes += 1;
    }
    ensure!(clone_outcomes >= 50, "only {clone_outcomes} clone outcomes");
    Ok(format!(
        "500 subjects: recall@1 = precision@1 = 1.00; clone variant: higher score first in {clone_outcomes}/{clone_outcomes} outcomes"
    ))
}

fn performance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let products = skewed_corpus(&mut rng, 10_000, 290_000);
    let instances: usize = products.iter().map(|p| p.defs().len()).sum();
    ensure!((900_000..=1_100_000).contains(&instances), "corpus has {instances} instances");

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let index = build_index(&products).map_err(|e| e.to_string())?;
    let blocklists: Vec<Blocklist> = Namespace::ALL.iter().map(|&ns| build_blocklist(&index, ns, 300)).collect();
    store::save(&index, &blocklists, dir.path()).map_err(|e| e.to_string())?;
    let build = start.elapsed();

    let start = Instant::now();
    let loaded = store::load(dir.path()).map_err(|e| e.to_string())?;
    let load = start.elapsed();
    ensure!(loaded.total_products() == 10_000, "loaded {} products", loaded.total_products());

    let mut latencies = Vec::new();
    while latencies.len() < 1000 {
        let p = rng.gen_range(0..products.len());
        let Ok(fp) = sample_with(&products[p].releases[0], Strategy::SingleFile, 3, &blocklists[0], &mut rng) else {
            continue;
        };
        let start = Instant::now();
        let ranked = rank(&loaded, &match_fingerprint(&loaded, &fp.names));
        latencies.push(start.elapsed());
        ensure!(ranked.position(ProductId(p as u32)).is_some(), "source missing from result");
    }
    latencies.sort();
    let median = latencies[latencies.len() / 2];
    ensure!(build < Duration::from_secs(60), "build took {build:?}");
    ensure!(median < Duration::from_millis(10), "median match+rank {median:?}");
    ensure!(load < Duration::from_secs(2), "load took {load:?}");
    Ok(format!(
        "{instances} instances over 10000 products: build+save {:.2} s, load {:.2} s, median match+rank {:.3} ms",
        build.as_secs_f64(),
        load.as_secs_f64(),
        median.as_secs_f64() * 1e3
    ))
}

fn persistence() -> Verdict {
    let corpus = || skewed_corpus(&mut ChaCha8Rng::seed_from_u64(9), 2000, 50_000);
    let products = corpus();
    let index = build_index(&products).map_err(|e| e.to_string())?;
    let blocklists: Vec<Blocklist> = Namespace::ALL.iter().map(|&ns| build_blocklist(&index, ns, 300)).collect();
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    store::save(&index, &blocklists, first.path()).map_err(|e| e.to_string())?;
    let loaded = store::load(first.path()).map_err(|e| e.to_string())?;

    ensure!(loaded.total_products() == index.total_products(), "D differs");
    for ns in Namespace::ALL {
        ensure!(loaded.distinct_names(ns) == index.distinct_names(ns), "{ns} name count differs");
        for name in index.postings(ns).keys() {
            ensure!(loaded.frequency(ns, name) == index.frequency(ns, name), "frequency of {name} differs");
        }
    }
    ensure!(loaded == index, "loaded index differs");
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut fingerprints = 0;
    while fingerprints < 1000 {
        let p = rng.gen_range(0..products.len());
        let Ok(fp) = sample_with(&products[p].releases[0], Strategy::DisjointFiles, rng.gen_range(1..=3), &blocklists[0], &mut rng) else {
            continue;
        };
        let a = rank(&index, &match_fingerprint(&index, &fp.names));
        let b = rank(&loaded, &match_fingerprint(&loaded, &fp.names));
        ensure!(a == b, "results differ for {:?}", fp.names);
        fingerprints += 1;
    }

    let rebuilt = build_index(&corpus()).map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    let blocklists: Vec<Blocklist> = Namespace::ALL.iter().map(|&ns| build_blocklist(&rebuilt, ns, 300)).collect();
    store::save(&rebuilt, &blocklists, second.path()).map_err(|e| e.to_string())?;
    let mut files = 0;
    for name in [store::META_FILE, store::PRODUCTS_FILE, store::POSTINGS_FILE, store::BLOCKLIST_FILE] {
        let a = fs::read(first.path().join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(second.path().join(name)).map_err(|e| e.to_string())?;
        ensure!(a == b, "{name} differs between builds");
        files += 1;
    }
    Ok(format!(
        "D, {} frequencies and {fingerprints} fingerprint results identical after reload; {files} files byte-identical across builds",
        index.distinct_names(Namespace::Code) + index.distinct_names(Namespace::Filename)
    ))
}
