#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use idprov_core::corpus::{ProductRecord, ReleaseRecord};
use idprov_core::extract::IdentKind;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random corpus: each product has one release of `1..=max_files` files
/// drawing names from a shared vocabulary, so names recur across products.
pub fn random_corpus<R: Rng>(rng: &mut R, products: usize, max_names: usize, vocabulary: usize) -> Vec<ProductRecord> {
    (0..products)
        .map(|p| {
            let mut release = ReleaseRecord::with_files("1.0", 0);
            let files = rng.gen_range(1..=4);
            let count = rng.gen_range(0..=max_names);
            for _ in 0..count {
                let name = format!("n{}", rng.gen_range(0..vocabulary));
                let kind = if rng.gen_bool(0.3) { IdentKind::Class } else { IdentKind::Function };
                let path = format!("pkg/m{}.py", rng.gen_range(0..files));
                release.insert_code(Some(&path), &name, kind);
            }
            let filenames = rng.gen_range(0..3);
            for _ in 0..filenames {
                release.filenames.insert(format!("f{}", rng.gen_range(0..20)));
            }
            let mut product = ProductRecord::new(format!("prod{p:04}"));
            if rng.gen_bool(0.8) {
                product.score = Some(rng.gen_range(0..50) as f64);
            }
            product.releases.push(release);
            product
        })
        .collect()
}

/// Brute-force Defs membership: every product whose Defs contain all `names`.
pub fn scan_match(products: &[ProductRecord], names: &[String]) -> Vec<u32> {
    products
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let defs = p.defs();
            names.iter().all(|n| defs.contains(n.as_str()))
        })
        .map(|(i, _)| i as u32)
        .collect()
}

/// Brute-force document frequency of every code name.
pub fn scan_frequencies(products: &[ProductRecord]) -> BTreeMap<String, usize> {
    let mut freq = BTreeMap::new();
    for p in products {
        for name in p.defs() {
            *freq.entry(name.to_owned()).or_insert(0) += 1;
        }
    }
    freq
}

/// Every set of `size` names that can be drawn under each strategy, by enumeration.
pub fn all_single_file_sets(files: &BTreeMap<String, BTreeSet<String>>, size: usize) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    for names in files.values() {
        let names: Vec<&String> = names.iter().collect();
        subsets(&names, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn subsets(names: &[&String], size: usize, from: usize, acc: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
    if acc.len() == size {
        out.insert(acc.clone());
        return;
    }
    for i in from..names.len() {
        acc.push(names[i].clone());
        subsets(names, size, i + 1, acc, out);
        acc.pop();
    }
}

/// All (path, name) assignments of `size` distinct names to `size` distinct files.
pub fn all_disjoint_assignments(
    files: &BTreeMap<String, BTreeSet<String>>,
    size: usize,
) -> BTreeSet<Vec<(String, String)>> {
    let files: Vec<(&String, &BTreeSet<String>)> = files.iter().collect();
    let mut out = BTreeSet::new();
    assign(&files, size, 0, &mut Vec::new(), &mut out);
    out
}

fn assign(
    files: &[(&String, &BTreeSet<String>)],
    size: usize,
    from: usize,
    acc: &mut Vec<(String, String)>,
    out: &mut BTreeSet<Vec<(String, String)>>,
) {
    if acc.len() == size {
        let mut sorted = acc.clone();
        sorted.sort();
        out.insert(sorted);
        return;
    }
    for i in from..files.len() {
        let (path, names) = files[i];
        for name in names {
            if acc.iter().any(|(_, n)| n == name) {
                continue;
            }
            acc.push((path.clone(), name.clone()));
            assign(files, size, i + 1, acc, out);
            acc.pop();
        }
    }
}

pub fn shuffled_names<R: Rng>(rng: &mut R, names: &BTreeSet<&str>) -> Vec<String> {
    let mut v: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    v.shuffle(rng);
    v
}
