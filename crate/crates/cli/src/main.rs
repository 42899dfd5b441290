//! `tah`: hash, compare and cluster control flow graphs.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 empty CFG, 4 I/O error,
//! 5 comparator failure, 6 duplicate corpus id, 7 corrupt corpus line.

mod corpus;
mod exit;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tah_core::eval::{
    bench, distance_matrix, threshold_sweep, Comparator, ComparatorConfig, GenerateOptions,
    GroundTruthDataset, Linkage, DEFAULT_STEP,
};
use tah_core::{
    encode_hash, exact_similarity, extract_features, hash_similarity, parse_cfg, project, Cfg,
    Format, FuzzyHash, GraphSignature, ProjectionParams, DEFAULT_BITS, DEFAULT_GRAM,
};

use crate::exit::{CliResult, Failure, EMPTY, IO, PARSE};

#[derive(Parser)]
#[command(
    name = "tah",
    version,
    about = "Topology-aware hashing of control flow graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the fuzzy hash of each CFG file.
    Hash {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        hash: HashOpts,
        #[command(flatten)]
        input: InputOpts,
    },
    /// Print the similarity of two CFG files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Compare full signatures instead of hashes.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        hash: HashOpts,
        #[command(flatten)]
        input: InputOpts,
    },
    /// Print the feature counts of a CFG file.
    Signature {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRAM)]
        n: usize,
        #[command(flatten)]
        input: InputOpts,
    },
    /// Generate a labelled dataset of single-edit variants.
    Gen {
        #[arg(long, default_value_t = 20)]
        nodes: usize,
        #[arg(long, default_value_t = 5)]
        groups: usize,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Drop variants whose signature repeats within a group.
        #[arg(long)]
        dedup: bool,
        #[arg(long, default_value_t = DEFAULT_GRAM)]
        n: usize,
    },
    /// Cluster a labelled dataset over a threshold sweep.
    Cluster {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value = "tah")]
        comparator: Comparator,
        #[arg(long, default_value = "average")]
        linkage: Linkage,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        /// Per-threshold CSV; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Distance CDF CSV for same-group and diff-group pairs.
        #[arg(long)]
        cdf: Option<PathBuf>,
        /// Use at most this many evenly spaced items.
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        compare: CompareOpts,
    },
    /// Time signature generation and all-pairs comparison.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "tah,exact,mcs")]
        comparators: Vec<Comparator>,
        /// Use at most this many evenly spaced items.
        #[arg(long, default_value_t = 100)]
        limit: usize,
        /// Also time per-pair regeneration of hashes and signatures.
        #[arg(long)]
        uncached: bool,
        #[command(flatten)]
        compare: CompareOpts,
    },
    /// Maintain a JSONL corpus of hashes.
    Corpus {
        #[arg(long, global = true, default_value = "corpus.jsonl")]
        db: PathBuf,
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Hash a CFG and append it under `id`.
    Add {
        id: String,
        path: PathBuf,
        #[command(flatten)]
        hash: HashOpts,
        #[command(flatten)]
        input: InputOpts,
    },
    /// List entries similar to a CFG.
    Scan {
        path: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        hash: HashOpts,
        #[command(flatten)]
        input: InputOpts,
    },
}

#[derive(Args, Clone)]
struct HashOpts {
    /// Maximum n-gram length.
    #[arg(long, default_value_t = DEFAULT_GRAM)]
    n: usize,
    /// Hash size in bits.
    #[arg(long, default_value_t = DEFAULT_BITS)]
    bits: usize,
    /// Projection seed in hex.
    #[arg(long, env = "TAH_SEED", value_parser = parse_hex_seed)]
    seed: Option<u64>,
}

impl HashOpts {
    fn params(&self) -> CliResult<ProjectionParams> {
        let seed = self.seed.unwrap_or(tah_core::DEFAULT_SEED);
        Ok(ProjectionParams::new(self.bits, seed, self.n)?)
    }
}

#[derive(Args, Clone)]
struct InputOpts {
    /// CFG file format; inferred from the extension by default.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args, Clone)]
struct CompareOpts {
    #[command(flatten)]
    hash: HashOpts,
    /// Node limit for the common subgraph comparator.
    #[arg(long, default_value_t = tah_core::baseline::DEFAULT_NODE_BUDGET)]
    node_budget: usize,
}

impl CompareOpts {
    fn config(&self) -> CliResult<ComparatorConfig> {
        Ok(ComparatorConfig {
            params: self.hash.params()?,
            node_budget: self.node_budget,
        })
    }
}

fn parse_hex_seed(s: &str) -> Result<u64, String> {
    let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(digits, 16).map_err(|e| format!("`{s}` is not a hex seed: {e}"))
}

fn read_cfg(path: &Path, input: &InputOpts) -> CliResult<Cfg> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(IO, e).context(path.display()))?;
    let format = input.format.unwrap_or_else(|| Format::from_path(path));
    let g = parse_cfg(&text, format).map_err(|e| Failure::from(e).context(path.display()))?;
    if g.is_empty() {
        return Err(Failure::msg(
            EMPTY,
            format!("{}: CFG has no nodes", path.display()),
        ));
    }
    Ok(g)
}

fn signature_of(g: &Cfg, n: usize) -> CliResult<GraphSignature> {
    Ok(extract_features(g, n)?)
}

fn hash_of(path: &Path, input: &InputOpts, params: &ProjectionParams) -> CliResult<FuzzyHash> {
    let g = read_cfg(path, input)?;
    Ok(project(&signature_of(&g, params.n())?, params)?)
}

fn load_dataset(dir: &Path, limit: Option<usize>) -> CliResult<GroundTruthDataset> {
    let ds = GroundTruthDataset::read_from(dir).map_err(|e| Failure::new(PARSE, e))?;
    if ds.is_empty() {
        return Err(Failure::msg(
            EMPTY,
            format!("{}: dataset is empty", dir.display()),
        ));
    }
    Ok(match limit {
        Some(l) => ds.evenly_spaced(l),
        None => ds,
    })
}

fn write_file(path: &Path, body: &[u8]) -> CliResult<()> {
    fs::write(path, body).map_err(|e| Failure::new(IO, e).context(path.display()))
}

fn run(cli: Cli) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let io_err = |e: io::Error| Failure::new(IO, e);

    match cli.command {
        Command::Hash { paths, hash, input } => {
            let params = hash.params()?;
            for p in &paths {
                let h = hash_of(p, &input, &params)?;
                if paths.len() == 1 {
                    writeln!(out, "{}", encode_hash(&h)).map_err(io_err)?;
                } else {
                    writeln!(out, "{}  {}", encode_hash(&h), p.display()).map_err(io_err)?;
                }
            }
        }
        Command::Compare {
            a,
            b,
            exact,
            hash,
            input,
        } => {
            let params = hash.params()?;
            let s = if exact {
                let sa = signature_of(&read_cfg(&a, &input)?, params.n())?;
                let sb = signature_of(&read_cfg(&b, &input)?, params.n())?;
                exact_similarity(&sa, &sb)?
            } else {
                hash_similarity(
                    &hash_of(&a, &input, &params)?,
                    &hash_of(&b, &input, &params)?,
                )?
            };
            writeln!(out, "{:.6}", s.value()).map_err(io_err)?;
        }
        Command::Signature { path, n, input } => {
            let sig = signature_of(&read_cfg(&path, &input)?, n)?;
            out.write_all(sig.to_text().as_bytes()).map_err(io_err)?;
        }
        Command::Gen {
            nodes,
            groups,
            rng_seed,
            out: dir,
            dedup,
            n,
        } => {
            let opts = GenerateOptions {
                groups,
                nodes,
                rng_seed,
                dedup_gram: dedup.then_some(n),
            };
            let ds = GroundTruthDataset::generate(&opts)?;
            ds.write_to(&dir).map_err(|e| Failure::new(IO, e))?;
            writeln!(
                out,
                "wrote {} CFGs in {} groups to {}",
                ds.len(),
                ds.group_count(),
                dir.display()
            )
            .map_err(io_err)?;
        }
        Command::Cluster {
            dir,
            comparator,
            linkage,
            step,
            report,
            cdf,
            limit,
            compare,
        } => {
            let cfg = compare.config()?;
            let ds = load_dataset(&dir, limit)?;
            let m = distance_matrix(&ds.cfgs(), comparator, &cfg)
                .map_err(|e| Failure::new(exit::COMPARATOR, e))?;
            let rep = threshold_sweep(&m, &ds.labels(), linkage, step)?;

            let mut rows = Vec::new();
            rep.write_rows_csv(&mut rows).map_err(io_err)?;
            match &report {
                Some(p) => write_file(p, &rows)?,
                None => out.write_all(&rows).map_err(io_err)?,
            }
            if let Some(p) = &cdf {
                let mut body = Vec::new();
                rep.write_cdf_csv(&mut body).map_err(io_err)?;
                write_file(p, &body)?;
            }
            writeln!(
                out,
                "optimal F={:.6} at t={:.6}",
                rep.optimal.fscore, rep.optimal.threshold
            )
            .map_err(io_err)?;
        }
        Command::Bench {
            dir,
            comparators,
            limit,
            uncached,
            compare,
        } => {
            let cfg = compare.config()?;
            let ds = load_dataset(&dir, Some(limit))?;
            let items = ds.cfgs();
            writeln!(
                out,
                "{:<10}{:>8}{:>10}{:>14}{:>14}{:>14}",
                "comparator", "items", "pairs", "generate_s", "pairs_s", "uncached_s"
            )
            .map_err(io_err)?;
            for c in comparators {
                let row = bench(&items, c, &cfg, uncached && c != Comparator::Mcs)
                    .map_err(|e| Failure::new(exit::COMPARATOR, e))?;
                let uncached = row
                    .uncached_pairs
                    .map(|d| format!("{:.6}", d.as_secs_f64()))
                    .unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{:<10}{:>8}{:>10}{:>14.6}{:>14.6}{:>14}",
                    c.to_string(),
                    row.items,
                    row.pairs,
                    row.generation.as_secs_f64(),
                    row.cached_pairs.as_secs_f64(),
                    uncached
                )
                .map_err(io_err)?;
            }
        }
        Command::Corpus { db, action } => match action {
            CorpusAction::Add {
                id,
                path,
                hash,
                input,
            } => {
                let params = hash.params()?;
                let h = hash_of(&path, &input, &params)?;
                corpus::add(&db, &id, &h, &params)?;
            }
            CorpusAction::Scan {
                path,
                threshold,
                hash,
                input,
            } => {
                let params = hash.params()?;
                let query = hash_of(&path, &input, &params)?;
                let entries = corpus::load(&db, &params)?;
                for (s, id) in corpus::scan(&entries, &query, threshold)? {
                    writeln!(out, "{s:.6}\t{id}").map_err(io_err)?;
                }
            }
        },
    }
    out.flush().map_err(io_err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tah: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
