//! The `idprov` command line.
//!
//! Exit statuses: 0 on success, 1 for a valid but negative result (empty
//! query, subject not found, bad golden set), 2 for usage and environment
//! errors.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use idprov_core::corpus::{ProductRecord, DEFAULT_MAX_RELEASES};
use idprov_core::eval::{evaluate, EvalConfig, EvalError};
use idprov_core::extract::{extract_code_identifiers, SourceFile};
use idprov_core::identify::{identify, IdentifyConfig, Outcome};
use idprov_core::index::{build_blocklist, build_index, InvertedIndex, Namespace};
use idprov_core::sample::{SampleError, Strategy};
use idprov_core::search::{match_fingerprint, rank, ContainmentVerifier};
use idprov_core::stats::{frequency_distribution, instance_distribution, kind_overlap};
use serde::Serialize;
use walkdir::WalkDir;

use crate::golden::{load_subjects, read_golden};
use crate::ingest::{apply_scores, count_python_files, ingest_directory, ingest_manifest, read_release, write_manifest, IngestError};
use crate::report::{distribution_tsv, eval_tsv, ranked_tsv};
use crate::store::{self, write_atomic};

#[derive(Parser, Debug)]
#[command(name = "idprov", version, about = "Find the product a Python code base was copied from")]
pub struct Cli {
    /// Index directory.
    #[arg(long, global = true, env = "IDPROV_INDEX")]
    pub index: Option<PathBuf>,

    /// Seed for fingerprint sampling; drawn from the OS when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Refuse to run randomized commands without --seed.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Number of most frequent names excluded from fingerprints (K).
    #[arg(short = 'k', long, global = true, default_value_t = 300)]
    pub blocklist_size: usize,

    /// Names per fingerprint (N).
    #[arg(short = 'n', long, global = true, default_value_t = 3)]
    pub fingerprint_size: usize,

    /// Attempts per subject.
    #[arg(long, global = true, default_value_t = 5)]
    pub trials: u32,

    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::SingleFile)]
    pub strategy: StrategyArg,

    /// Share of the subject's names the top candidate must define to be accepted.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub tau: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    SingleFile,
    DisjointFiles,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::SingleFile => Strategy::SingleFile,
            StrategyArg::DisjointFiles => Strategy::DisjointFiles,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NamespaceArg {
    Code,
    Filename,
}

impl From<NamespaceArg> for Namespace {
    fn from(n: NamespaceArg) -> Namespace {
        match n {
            NamespaceArg::Code => Namespace::Code,
            NamespaceArg::Filename => Namespace::Filename,
        }
    }
}

#[derive(clap::Args, Debug)]
#[group(required = true, multiple = false)]
pub struct CorpusInput {
    /// Corpus laid out as <root>/<product>/<release>/...
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// JSON Lines of pre-extracted identifiers.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build an index from a corpus directory or manifest.
    Build {
        #[command(flatten)]
        input: CorpusInput,
        /// Output directory; defaults to --index.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_RELEASES)]
        max_releases: usize,
        /// `product<TAB>score` popularity scores.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Print the frequency distribution of an index.
    Stats {
        #[arg(long, value_enum, default_value_t = NamespaceArg::Code)]
        namespace: NamespaceArg,
        /// Weight every name by its frequency.
        #[arg(long)]
        instances: bool,
        /// Print the number of names declared both as class and function instead.
        #[arg(long)]
        overlap: bool,
    },
    /// Rank the products defining all of the given names.
    Query {
        #[arg(required = true)]
        names: Vec<String>,
    },
    /// Identify the product a subject directory comes from.
    Identify {
        subject: PathBuf,
        /// Write per-trial details as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Measure recall and precision over a golden set.
    Evaluate {
        /// JSON Lines of {"subject_dir": ..., "truth": ...}.
        golden: PathBuf,
        /// Also write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the TSV report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the class and function names of a file or directory as JSON Lines.
    Extract { path: PathBuf },
    /// Write a corpus as a manifest.
    Export {
        #[command(flatten)]
        input: CorpusInput,
        #[arg(long, default_value_t = DEFAULT_MAX_RELEASES)]
        max_releases: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn negative(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

type CmdResult = Result<u8, Failure>;

/// Parses `args` (program name first) and runs the command. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "idprov: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    validate(cli)?;
    match &cli.command {
        Command::Build { input, out: dir, max_releases, scores } => {
            let dir = dir.clone().or_else(|| cli.index.clone()).ok_or_else(|| Failure::usage("build needs --out or --index"))?;
            cmd_build(cli, input, &dir, *max_releases, scores.as_deref(), out)
        }
        Command::Stats { namespace, instances, overlap } => cmd_stats(cli, (*namespace).into(), *instances, *overlap, out),
        Command::Query { names } => cmd_query(cli, names, out),
        Command::Identify { subject, report } => cmd_identify(cli, subject, report.as_deref(), out, err),
        Command::Evaluate { golden, json, output } => cmd_evaluate(cli, golden, json.as_deref(), output.as_deref(), out, err),
        Command::Extract { path } => cmd_extract(path, out),
        Command::Export { input, max_releases, out: file } => cmd_export(input, *max_releases, file.as_deref(), out),
    }
}

fn validate(cli: &Cli) -> Result<(), Failure> {
    if cli.fingerprint_size == 0 {
        return Err(Failure::usage("--fingerprint-size must be at least 1"));
    }
    if cli.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    if !(0.0..=1.0).contains(&cli.tau) {
        return Err(Failure::usage("--tau must lie in [0, 1]"));
    }
    Ok(())
}

fn io_failure(what: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::usage(format!("{}: {e}", what.display()))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::usage(format!("writing output: {e}")))
}

fn index_dir(cli: &Cli) -> Result<&Path, Failure> {
    cli.index
        .as_deref()
        .ok_or_else(|| Failure::usage("no index given: pass --index or set IDPROV_INDEX"))
}

fn load_index(cli: &Cli) -> Result<InvertedIndex, Failure> {
    let dir = index_dir(cli)?;
    store::load(dir).map_err(|e| Failure::usage(format!("cannot load index {}: {e}", dir.display())))
}

fn seed(cli: &Cli, err: &mut dyn Write) -> Result<u64, Failure> {
    match cli.seed {
        Some(seed) => Ok(seed),
        None if cli.strict => Err(Failure::usage("--strict requires --seed")),
        None => {
            let seed = rand::random();
            let _ = writeln!(err, "idprov: using seed {seed}");
            Ok(seed)
        }
    }
}

fn read_corpus(input: &CorpusInput, max_releases: usize) -> Result<Vec<ProductRecord>, Failure> {
    match (&input.corpus, &input.manifest) {
        (Some(root), _) => {
            if !root.is_dir() {
                return Err(Failure::usage(format!("{}: not a directory", root.display())));
            }
            ingest_directory(root, max_releases).map_err(|e| Failure::usage(e.to_string()))
        }
        (None, Some(path)) => {
            let file = File::open(path).map_err(|e| io_failure(path, e))?;
            ingest_manifest(BufReader::new(file), max_releases).map_err(|e| match e {
                IngestError::Parse { .. } => Failure::usage(format!("{}: {e}", path.display())),
                IngestError::Io { .. } => Failure::usage(e.to_string()),
            })
        }
        (None, None) => Err(Failure::usage("pass --corpus or --manifest")),
    }
}

fn cmd_build(
    cli: &Cli,
    input: &CorpusInput,
    dir: &Path,
    max_releases: usize,
    scores: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let mut products = read_corpus(input, max_releases)?;
    if let Some(path) = scores {
        let file = File::open(path).map_err(|e| io_failure(path, e))?;
        apply_scores(&mut products, BufReader::new(file)).map_err(|e| io_failure(path, e))?;
    }
    let index = build_index(&products).map_err(|e| Failure::usage(e.to_string()))?;
    let blocklists: Vec<_> = Namespace::ALL
        .iter()
        .map(|&ns| build_blocklist(&index, ns, cli.blocklist_size))
        .collect();
    store::save(&index, &blocklists, dir).map_err(|e| Failure::usage(e.to_string()))?;

    let empty = products.iter().filter(|p| !p.has_identifiers()).count();
    let summary = format!(
        "products\t{}\nwithout_identifiers\t{}\ncode\t{}\nfilename\t{}\n",
        index.total_products(),
        empty,
        index.distinct_names(Namespace::Code),
        index.distinct_names(Namespace::Filename),
    );
    write_out(out, &summary)?;
    Ok(0)
}

fn cmd_stats(cli: &Cli, namespace: Namespace, instances: bool, overlap: bool, out: &mut dyn Write) -> CmdResult {
    let index = load_index(cli)?;
    let text = if overlap {
        let o = kind_overlap(&index);
        format!("both\tdistinct\tproportion\n{}\t{}\t{:.2}\n", o.both, o.distinct, o.proportion)
    } else if instances {
        distribution_tsv(&instance_distribution(&index, namespace), true)
    } else {
        distribution_tsv(&frequency_distribution(&index, namespace), false)
    };
    write_out(out, &text)?;
    Ok(0)
}

fn cmd_query(cli: &Cli, names: &[String], out: &mut dyn Write) -> CmdResult {
    let index = load_index(cli)?;
    let ranked = rank(&index, &match_fingerprint(&index, names));
    write_out(out, &ranked_tsv(&ranked, |i| index.products()[i].score))?;
    Ok(if ranked.is_empty() { 1 } else { 0 })
}

#[derive(Serialize)]
struct IdentifyReport<'a> {
    subject: &'a Path,
    config: IdentifyConfig,
    tau: f64,
    blocklist_size: usize,
    product: Option<&'a str>,
    #[serde(flatten)]
    result: &'a idprov_core::identify::IdentifyResult,
}

fn cmd_identify(cli: &Cli, subject: &Path, report: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if !subject.is_dir() {
        return Err(Failure::usage(format!("{}: not a directory", subject.display())));
    }
    if count_python_files(subject) == 0 {
        return Err(Failure::usage(format!("{}: no Python files", subject.display())));
    }
    let seed = seed(cli, err)?;
    let index = load_index(cli)?;
    let blocklist = build_blocklist(&index, Namespace::Code, cli.blocklist_size);
    let release = read_release(subject, "subject", 0);
    let cfg = IdentifyConfig {
        fingerprint_size: cli.fingerprint_size,
        trials: cli.trials,
        strategy: cli.strategy.into(),
        seed,
    };
    let verifier = ContainmentVerifier { tau: cli.tau };
    let result = identify(&release, &index, &cfg, &blocklist, &verifier).map_err(|e| Failure::usage(e.to_string()))?;

    let product = match result.outcome {
        Outcome::Found { product, .. } => index.product(product).map(|p| p.name.as_str()),
        Outcome::NotFound => None,
    };
    if let Some(path) = report {
        let doc = IdentifyReport {
            subject,
            config: cfg,
            tau: cli.tau,
            blocklist_size: cli.blocklist_size,
            product,
            result: &result,
        };
        let mut json = serde_json::to_string_pretty(&doc).map_err(|e| Failure::usage(e.to_string()))?;
        json.push('\n');
        write_file(path, json.as_bytes())?;
    }
    if result.unsampleable() {
        return Err(Failure::usage(format!(
            "{}: {} after {} trials",
            subject.display(),
            SampleError::InsufficientIdentifiers,
            result.trials.len()
        )));
    }
    match result.outcome {
        Outcome::Found { trial, .. } => {
            write_out(out, &format!("{}\t{trial}\n", product.unwrap_or_default()))?;
            Ok(0)
        }
        Outcome::NotFound => Ok(1),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Failure::usage(format!("{}: not a file path", path.display())))?;
    write_atomic(dir, &name.to_string_lossy(), bytes).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_evaluate(
    cli: &Cli,
    golden: &Path,
    json: Option<&Path>,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let file = File::open(golden).map_err(|e| io_failure(golden, e))?;
    let base = golden.parent().unwrap_or(Path::new("."));
    let entries = read_golden(BufReader::new(file), base).map_err(|e| Failure::negative(format!("{}: {e}", golden.display())))?;
    let seed = seed(cli, err)?;
    let index = load_index(cli)?;
    let blocklist = build_blocklist(&index, Namespace::Code, cli.blocklist_size);
    let cfg = EvalConfig {
        fingerprint_size: cli.fingerprint_size,
        strategy: cli.strategy.into(),
        seed,
        trials_per_subject: cli.trials,
    };
    let subjects = load_subjects(&entries);
    let report = match evaluate(&subjects, &index, &cfg, &blocklist) {
        Ok(report) => report,
        Err(EvalError::TruthMissing(missing)) => {
            for m in &missing {
                let _ = writeln!(
                    err,
                    "idprov: {}:{}: truth {:?} is not in the index",
                    golden.display(),
                    entries[m.subject].line,
                    m.truth
                );
            }
            return Err(Failure::negative(format!("{} golden subject(s) name unknown products", missing.len())));
        }
        Err(e) => return Err(Failure::usage(e.to_string())),
    };

    let tsv = eval_tsv(&report);
    match output {
        Some(path) => write_file(path, tsv.as_bytes())?,
        None => write_out(out, &tsv)?,
    }
    if let Some(path) = json {
        let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::usage(e.to_string()))?;
        text.push('\n');
        write_file(path, text.as_bytes())?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct ExtractRecord<'a> {
    path: &'a str,
    name: &'a str,
    kind: &'a str,
}

fn cmd_extract(path: &Path, out: &mut dyn Write) -> CmdResult {
    let mut files = Vec::new();
    if path.is_file() {
        let bytes = fs::read(path).map_err(|e| io_failure(path, e))?;
        files.push(SourceFile::from_bytes(path.to_string_lossy(), &bytes));
    } else if path.is_dir() {
        let release = WalkDir::new(path).sort_by_file_name();
        for entry in release.into_iter().filter_map(Result::ok) {
            let relative = entry.path().strip_prefix(path).unwrap_or(entry.path());
            let relative = relative.to_string_lossy().replace('\\', "/");
            if !entry.file_type().is_file() || !idprov_core::extract::is_python_path(&relative) {
                continue;
            }
            match fs::read(entry.path()) {
                Ok(bytes) => files.push(SourceFile::from_bytes(relative, &bytes)),
                Err(e) => log::warn!("skipping {}: {e}", entry.path().display()),
            }
        }
    } else {
        return Err(Failure::usage(format!("{}: no such file or directory", path.display())));
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));

    let mut text = String::new();
    for file in &files {
        for id in extract_code_identifiers(&file.text) {
            let record = ExtractRecord {
                path: &file.path,
                name: &id.name,
                kind: id.kind.as_str(),
            };
            text.push_str(&serde_json::to_string(&record).map_err(|e| Failure::usage(e.to_string()))?);
            text.push('\n');
        }
    }
    write_out(out, &text)?;
    Ok(0)
}

fn cmd_export(input: &CorpusInput, max_releases: usize, file: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let products = read_corpus(input, max_releases)?;
    let mut bytes = Vec::new();
    write_manifest(&products, &mut bytes).map_err(|e| Failure::usage(e.to_string()))?;
    match file {
        Some(path) => write_file(path, &bytes)?,
        None => out.write_all(&bytes).map_err(|e| Failure::usage(e.to_string()))?,
    }
    Ok(0)
}
