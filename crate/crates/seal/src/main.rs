//! Command-line front end: data generation, index lifecycle, query
//! execution, benchmarking, and granularity tuning.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error
//! (unreadable or malformed input, bad index file), 3 benchmark check
//! mismatch.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use seal::bench::{run_bench, write_csv_file, BenchConfig};
use seal::engine::{BuildParams, Engine, EngineIndex, Method};
use seal::error::{Result, SealError};
use seal::format::{self, IndexFile};
use seal::gen::{gen_queries, gen_synthetic, CorpusSpec, QueryMode, QuerySpec};
use seal::granularity::{select_granularity, CostModel, DEFAULT_MAX_LEVEL};
use seal::index::{Bucketer, DEFAULT_BUCKETS};
use seal::io::{read_queries, write_corpus, write_queries, DEFAULT_TAU};

#[derive(Parser)]
#[command(
    name = "seal",
    version,
    about = "Spatio-textual similarity search: build signatures, filter, verify"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic corpus file
    Gen(GenArgs),
    /// Generate a query file over an existing corpus
    GenQueries(GenQueriesArgs),
    /// Build an index file for a method
    Build(BuildArgs),
    /// Run queries and print answers as JSON lines
    Query(QueryArgs),
    /// Run a query file under one or more methods, emit a CSV report
    Bench(BenchArgs),
    /// Select a grid granularity from a workload via the cost model
    TuneGranularity(TuneArgs),
}

/// Engine parameters shared by subcommands. Every flag can also come from a
/// TOML config file; flags win over the file, which wins over defaults.
#[derive(Args, Debug, Clone, Default)]
struct EngineOpts {
    /// Optional TOML config mirroring these flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    tau_r: Option<f64>,
    #[arg(long)]
    tau_t: Option<f64>,
    /// Uniform grid granularity p (p x p cells)
    #[arg(long)]
    granularity: Option<u32>,
    /// Bucket count for hashed hybrid signatures
    #[arg(long, conflicts_with = "injective")]
    buckets: Option<u64>,
    /// Use the injective (exact-pair) bucketer
    #[arg(long)]
    injective: bool,
    /// Per-token hierarchical grid budget m_t
    #[arg(long)]
    mt: Option<usize>,
    /// Total hybrid-element budget; derives m_t when --mt is absent
    #[arg(long)]
    index_elements: Option<u64>,
    /// Grid tree height cap
    #[arg(long)]
    tree_height: Option<u32>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    method: Option<String>,
    tau_r: Option<f64>,
    tau_t: Option<f64>,
    granularity: Option<u32>,
    buckets: Option<u64>,
    injective: Option<bool>,
    mt: Option<usize>,
    index_elements: Option<u64>,
    tree_height: Option<u32>,
    benefit_floor: Option<f64>,
    pi1: Option<f64>,
    pi2: Option<f64>,
    max_level: Option<u32>,
}

#[derive(Debug, Clone)]
struct Resolved {
    method: Option<Method>,
    tau_r: Option<f64>,
    tau_t: Option<f64>,
    params: BuildParams,
    /// Total hybrid-element budget, to derive m_t once the corpus is known.
    index_elements: Option<u64>,
    benefit_floor: f64,
    cost: CostModel,
    max_level: u32,
}

impl Resolved {
    /// Finish the build parameters against an actual corpus: an element
    /// budget spreads uniformly over the corpus's token occurrences.
    fn params_for(&self, corpus: &seal::model::Corpus) -> BuildParams {
        let mut params = self.params.clone();
        if let Some(budget) = self.index_elements {
            let occurrences: u64 = corpus
                .objects()
                .iter()
                .map(|o| o.tokens.len() as u64)
                .sum();
            params.mt = (budget / occurrences.max(1)).max(1) as usize;
        }
        params
    }
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text)
        .map_err(|e| SealError::InvalidParameter(format!("config {}: {e}", path.display())))
}

fn resolve(opts: &EngineOpts) -> Result<Resolved> {
    let file = load_file_config(opts.config.as_deref())?;
    let method = match opts.method.as_deref().or(file.method.as_deref()) {
        Some(name) => Some(Method::from_str(name)?),
        None => None,
    };
    let injective = opts.injective || file.injective.unwrap_or(false);
    let bucketer = if injective {
        Bucketer::Injective
    } else {
        Bucketer::hashed(opts.buckets.or(file.buckets).unwrap_or(DEFAULT_BUCKETS))?
    };
    let mt = opts.mt.or(file.mt);
    let index_elements = opts.index_elements.or(file.index_elements);
    Ok(Resolved {
        method,
        tau_r: opts.tau_r.or(file.tau_r),
        tau_t: opts.tau_t.or(file.tau_t),
        params: BuildParams {
            granularity: opts.granularity.or(file.granularity).unwrap_or(64),
            bucketer,
            mt: mt.unwrap_or(8),
            tree_height: opts
                .tree_height
                .or(file.tree_height)
                .unwrap_or(seal::hss::DEFAULT_TREE_HEIGHT),
        },
        // an explicit --mt wins over a derived budget
        index_elements: if mt.is_some() { None } else { index_elements },
        benefit_floor: file.benefit_floor.unwrap_or(10.0),
        cost: CostModel::new(file.pi1.unwrap_or(1.0), file.pi2.unwrap_or(10.0))?,
        max_level: file.max_level.unwrap_or(DEFAULT_MAX_LEVEL),
    })
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Number of objects
    #[arg(short = 'n', long)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1000.0)]
    space_side: f64,
    #[arg(long, default_value_t = 0.2)]
    width_min: f64,
    #[arg(long, default_value_t = 9.0)]
    width_max: f64,
    #[arg(long, default_value_t = 5000)]
    vocab: usize,
    #[arg(long, default_value_t = 12.5)]
    tokens_mean: f64,
}

#[derive(Args, Debug)]
struct GenQueriesArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    count: usize,
    /// small-region or large-region
    #[arg(long, default_value = "small-region")]
    mode: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau_r: f64,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau_t: f64,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    engine: EngineOpts,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// Index file; optional only for --method brute
    #[arg(long)]
    index: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineOpts,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// Comma-separated method list
    #[arg(long, default_value = "token,grid,hybrid,hierarchical")]
    methods: String,
    /// Verify every answer set against brute force
    #[arg(long)]
    check: bool,
    /// Run queries single-threaded for stable timings
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    engine: EngineOpts,
}

#[derive(Args, Debug)]
struct TuneArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Workload query file
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    benefit_floor: Option<f64>,
    #[arg(long)]
    pi1: Option<f64>,
    #[arg(long)]
    pi2: Option<f64>,
    #[arg(long)]
    max_level: Option<u32>,
    /// CSV output: level, filter term, verify term, total, benefit
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineOpts,
}

fn exit_code(err: &SealError) -> u8 {
    match err {
        SealError::InvalidParameter(_) | SealError::IndexMismatch { .. } => 1,
        _ => 2,
    }
}

fn report_problems(problems: &[SealError]) -> bool {
    for p in problems {
        eprintln!("seal: {p}");
    }
    !problems.is_empty()
}

/// Read a corpus, skipping malformed lines; the returned flag marks whether
/// any line was skipped (the run then finishes with exit code 2).
fn read_corpus_lenient(path: &Path) -> Result<(seal::model::Corpus, bool)> {
    let (records, problems) = seal::io::read_corpus_records(path)?;
    let had_problems = report_problems(&problems);
    Ok((seal::io::corpus_from_records(records)?, had_problems))
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let spec = CorpusSpec {
        count: args.count,
        space_side: args.space_side,
        width_range: (args.width_min, args.width_max),
        vocab: args.vocab,
        tokens_mean: args.tokens_mean,
        zipf_exponent: 1.0,
    };
    let records = gen_synthetic(&spec, args.seed)?;
    write_corpus(&args.out, &records)?;
    eprintln!("seal: wrote {} objects to {}", records.len(), args.out.display());
    Ok(0)
}

fn cmd_gen_queries(args: &GenQueriesArgs) -> Result<u8> {
    let (records, problems) = seal::io::read_corpus_records(&args.corpus)?;
    if report_problems(&problems) {
        return Ok(2);
    }
    let spec = QuerySpec {
        count: args.count,
        mode: QueryMode::from_str(&args.mode)?,
        tau_r: args.tau_r,
        tau_t: args.tau_t,
    };
    let queries = gen_queries(&records, &spec, args.seed)?;
    write_queries(&args.out, &queries)?;
    eprintln!("seal: wrote {} queries to {}", queries.len(), args.out.display());
    Ok(0)
}

fn cmd_build(args: &BuildArgs) -> Result<u8> {
    let resolved = resolve(&args.engine)?;
    let method = resolved.method.ok_or_else(|| {
        SealError::InvalidParameter("build requires --method (or a config file)".into())
    })?;
    if method.index_kind().is_none() {
        return Err(SealError::InvalidParameter(format!(
            "method {method} uses no index"
        )));
    }
    let (corpus, had_problems) = read_corpus_lenient(&args.corpus)?;
    let params = resolved.params_for(&corpus);
    let engine = Engine::build(corpus, method, &params)?;
    let file = match engine.index() {
        EngineIndex::Token(idx) => IndexFile::Token(idx.clone()),
        EngineIndex::Grid(idx) => IndexFile::Grid(idx.clone()),
        EngineIndex::Hybrid(idx) => IndexFile::Hybrid(idx.clone()),
        EngineIndex::Hierarchical(idx) => IndexFile::Hierarchical(idx.clone()),
        EngineIndex::None => unreachable!("checked above"),
    };
    format::save(&file, &args.out)?;
    eprintln!(
        "seal: wrote {} index ({} lists) to {}",
        file.kind(),
        match &file {
            IndexFile::Token(i) => i.lists.len(),
            IndexFile::Grid(i) => i.lists.len(),
            IndexFile::Hybrid(i) => i.lists.len(),
            IndexFile::Hierarchical(i) => i.lists.len(),
        },
        args.out.display()
    );
    Ok(if had_problems { 2 } else { 0 })
}

fn engine_index_of(file: IndexFile) -> EngineIndex {
    match file {
        IndexFile::Token(i) => EngineIndex::Token(i),
        IndexFile::Grid(i) => EngineIndex::Grid(i),
        IndexFile::Hybrid(i) => EngineIndex::Hybrid(i),
        IndexFile::Hierarchical(i) => EngineIndex::Hierarchical(i),
    }
}

fn cmd_query(args: &QueryArgs) -> Result<u8> {
    let resolved = resolve(&args.engine)?;
    let (corpus, mut had_problems) = read_corpus_lenient(&args.corpus)?;
    let engine = match (&args.index, resolved.method) {
        (Some(path), method) => {
            let file = format::load(path)?;
            // without an explicit method, the index kind names it
            let method = match method {
                Some(m) => m,
                None => Method::from_str(file.kind())?,
            };
            Engine::from_parts(corpus, method, engine_index_of(file))?
        }
        (None, Some(Method::Brute)) => {
            Engine::from_parts(corpus, Method::Brute, EngineIndex::None)?
        }
        (None, _) => {
            return Err(SealError::InvalidParameter(
                "query requires --index (or --method brute)".into(),
            ))
        }
    };
    let (queries, problems) =
        read_queries(&args.queries, engine.corpus(), (resolved.tau_r, resolved.tau_t))?;
    had_problems |= report_problems(&problems);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (qid, query) in &queries {
        let (answers, _) = engine.search(query)?;
        let line = serde_json::json!({
            "query": qid,
            "answers": answers
                .iter()
                .map(|a| serde_json::json!({"id": a.id, "sim_r": a.sim_r, "sim_t": a.sim_t}))
                .collect::<Vec<_>>(),
        });
        use std::io::Write;
        writeln!(out, "{line}")?;
    }
    Ok(if had_problems { 2 } else { 0 })
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    let resolved = resolve(&args.engine)?;
    let (corpus, mut had_problems) = read_corpus_lenient(&args.corpus)?;
    let (queries, problems) =
        read_queries(&args.queries, &corpus, (resolved.tau_r, resolved.tau_t))?;
    had_problems |= report_problems(&problems);
    let methods = args
        .methods
        .split(',')
        .map(|m| Method::from_str(m.trim()))
        .collect::<Result<Vec<_>>>()?;
    let config = BenchConfig {
        methods,
        params: resolved.params_for(&corpus),
        check: args.check,
        serial: args.serial,
    };
    let report = run_bench(&corpus, &queries, &config)?;
    write_csv_file(&report, &args.out)?;
    for (method, m) in report.means() {
        eprintln!(
            "seal: {method}: mean filter {:.1}us verify {:.1}us candidates {:.2} answers {:.2}",
            m.filter_us, m.verify_us, m.candidates, m.answers
        );
    }
    if args.check {
        eprintln!("seal: check mismatches: {}", report.mismatches);
        if report.mismatches > 0 {
            return Ok(3);
        }
    }
    Ok(if had_problems { 2 } else { 0 })
}

fn cmd_tune(args: &TuneArgs) -> Result<u8> {
    let resolved = resolve(&args.engine)?;
    let (corpus, mut had_problems) = read_corpus_lenient(&args.corpus)?;
    let (queries, problems) =
        read_queries(&args.queries, &corpus, (resolved.tau_r, resolved.tau_t))?;
    had_problems |= report_problems(&problems);
    let workload: Vec<_> = queries.into_iter().map(|(_, q)| q).collect();
    let floor = args.benefit_floor.unwrap_or(resolved.benefit_floor);
    let cost = CostModel::new(
        args.pi1.unwrap_or(resolved.cost.pi1),
        args.pi2.unwrap_or(resolved.cost.pi2),
    )?;
    let max_level = args.max_level.unwrap_or(resolved.max_level);
    let result = select_granularity(&workload, &corpus, &cost, floor, max_level)?;
    if let Some(path) = &args.out {
        use std::io::Write;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "level,filter_term,verify_term,total,benefit")?;
        for row in &result.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                row.cost.level,
                row.cost.filter_term,
                row.cost.verify_term,
                row.cost.total,
                row.benefit.map_or(String::new(), |b| b.to_string())
            )?;
        }
    }
    println!("{}", result.level);
    eprintln!(
        "seal: chose level {} (grid {p}x{p})",
        result.level,
        p = 1u32 << result.level
    );
    Ok(if had_problems { 2 } else { 0 })
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::GenQueries(args) => cmd_gen_queries(args),
        Cmd::Build(args) => cmd_build(args),
        Cmd::Query(args) => cmd_query(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::TuneGranularity(args) => cmd_tune(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("seal: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
