//! `polyqec`: factoring, code construction, table verification, code
//! searches and the best-known-codes catalog from the command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
//! 3 result limited by the enumeration budget.

mod args;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyqec_core::catalog::{Catalog, CatalogRecord, Format};
use polyqec_core::css::{verify_table_row, Claim, Convention, RowVerdict};
use polyqec_core::polycyclic::{span_code, AmbientRing};
use polyqec_core::search::{
    derive_closure, search_moduli, search_multinomial, search_target, search_trinomial_pairs, SearchConfig, SearchHit,
    SearchStats,
};
use polyqec_core::{factor, FieldSpec, Rule, DEFAULT_BUDGET};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("verification mismatch")]
    Mismatch,
    #[error("result is a bound: the enumeration budget was exceeded")]
    Budget,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch => 1,
            Failure::Usage(_) => 2,
            Failure::Budget => 3,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

#[derive(Parser)]
#[command(name = "polyqec", version, about = "Quantum CSS codes from polycyclic codes")]
struct Cli {
    /// Machine-readable JSON output (newline-delimited for hit streams).
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for searches and enumeration.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a polynomial into monic irreducibles.
    Factor {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        poly: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build the code of a divisor (or shift span) and report [n,k,d].
    Code {
        #[arg(long)]
        q: u32,
        /// Modulus: polynomial string or (n,i,a,b) trinomial.
        #[arg(long)]
        t: String,
        #[arg(long)]
        g: String,
        /// Use the shift span of g instead of the ideal it generates.
        #[arg(long)]
        span: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// CSS construction and table-row verification.
    Css {
        #[command(subcommand)]
        command: CssCommand,
    },
    /// Code searches and the derivation closure.
    Search {
        #[command(subcommand)]
        command: SearchCommand,
    },
    /// The best-known-codes catalog.
    Db {
        #[command(subcommand)]
        command: DbCommand,
    },
}

#[derive(Subcommand)]
enum CssCommand {
    /// Rebuild a row from its polynomials and compare with the claimed parameters.
    Verify {
        #[arg(long)]
        q: u32,
        /// Modulus: polynomial string or (n,i,a,b) trinomial.
        #[arg(long)]
        t: String,
        #[arg(long)]
        g1: String,
        #[arg(long)]
        second: String,
        /// c2, c2-literal or c2perp; all are tried when omitted.
        #[arg(long)]
        convention: Option<String>,
        /// Claimed n,k,d.
        #[arg(long)]
        claim: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args, Clone)]
struct CatalogArg {
    /// Catalog file.
    #[arg(long, env = "POLYQEC_CATALOG", default_value = "polyqec_catalog.json")]
    catalog: PathBuf,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Field order.
    #[arg(long)]
    q: u32,
    /// Length or range a..b.
    #[arg(long)]
    n: String,
    /// Middle exponent range for trinomials.
    #[arg(long)]
    i: Option<String>,
    /// Allowed a values, comma separated.
    #[arg(long)]
    a: Option<String>,
    /// Allowed b values, comma separated.
    #[arg(long)]
    b: Option<String>,
    /// Degree range of the C1 generator.
    #[arg(long)]
    degrees: Option<String>,
    /// Quantum dimension range.
    #[arg(long)]
    k: Option<String>,
    /// Skip candidates whose distance cannot reach this.
    #[arg(long, default_value_t = 2)]
    min_d: usize,
    /// Random draws per divisor (target) or per length (multinomial).
    #[arg(long, default_value_t = 16)]
    trials: usize,
    /// Word visits allowed per exact distance computation.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// RNG seed; derived from the arguments and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-candidate time limit in seconds; makes runs timing dependent.
    #[arg(long)]
    time_limit: Option<f64>,
    #[command(flatten)]
    catalog: CatalogArg,
    /// Store hits in the catalog.
    #[arg(long)]
    update: bool,
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Divisor pairs of trinomials x^n - a x^i - b.
    Trinomial(SearchArgs),
    /// Fixed n and k with random second factors.
    Target(SearchArgs),
    /// Random multinomials x^n - v(x), or the given moduli.
    Multinomial {
        #[command(flatten)]
        search: SearchArgs,
        /// Explicit modulus; repeatable.
        #[arg(long)]
        modulus: Vec<String>,
    },
    /// Apply propagation rules to the catalog.
    Derive {
        #[command(flatten)]
        catalog: CatalogArg,
        /// Comma-separated subset of E,P,subcode,DS,combine.
        #[arg(long, default_value = "E,P,DS")]
        rules: String,
        #[arg(long, default_value_t = 4)]
        rounds: usize,
        #[arg(long)]
        update: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum DbCommand {
    /// Load records from CSV or JSON files.
    Ingest {
        #[command(flatten)]
        catalog: CatalogArg,
        files: Vec<PathBuf>,
    },
    /// Exact (q,n,k), by distance (q,n,d) or range queries.
    Query {
        #[command(flatten)]
        catalog: CatalogArg,
        #[arg(long)]
        q: u32,
        /// Length or range a..b.
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: Option<usize>,
        /// Minimum distance, or a range a..b when n is a range.
        #[arg(long)]
        d: Option<String>,
    },
    /// Insert a record if it beats the stored one.
    Update {
        #[command(flatten)]
        catalog: CatalogArg,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "ref", default_value = "")]
        reference: String,
    },
    /// Write all records as CSV or JSON.
    Export {
        #[command(flatten)]
        catalog: CatalogArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FileFormat>,
    },
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            log::warn!("cannot size the worker pool: {e}");
        }
    }
    match run(&cli, &raw[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Failure::Usage(_) = f {
                eprintln!("error: {f}");
            }
            ExitCode::from(f.code())
        }
    }
}

fn field(q: u32) -> Result<FieldSpec, Failure> {
    FieldSpec::with_order(q).map_err(usage)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run(cli: &Cli, raw: &[String]) -> Result<(), Failure> {
    match &cli.command {
        Command::Factor { q, poly, seed } => {
            let f = field(*q)?;
            let p = args::modulus(poly, f).map_err(Failure::Usage)?;
            let fact = factor(&p, seed.unwrap_or(0)).map_err(usage)?;
            if cli.json {
                let factors: Vec<_> = fact
                    .factors()
                    .iter()
                    .map(|(g, m)| json!({"factor": g.to_string(), "table": g.format_table(), "multiplicity": m}))
                    .collect();
                print_json(&json!({"poly": p.to_string(), "unit": fact.unit().value(), "factors": factors}));
            } else {
                println!("{p} = {} *", fact.unit());
                for (g, m) in fact.factors() {
                    let exp = if *m > 1 { format!("^{m}") } else { String::new() };
                    println!("  ({g}){exp}    [{}]", g.format_table());
                }
            }
            Ok(())
        }
        Command::Code { q, t, g, span, budget } => {
            let f = field(*q)?;
            let t = args::modulus(t, f).map_err(Failure::Usage)?;
            let g = polyqec_core::Poly::parse(g, f).map_err(usage)?;
            let ring = AmbientRing::from_modulus(&t).map_err(usage)?;
            let code = if *span { span_code(&g, ring.len()) } else { ring.ideal_code(&g) }.map_err(usage)?;
            let d = if code.dimension() == 0 { None } else { Some(code.min_distance(*budget).map_err(usage)?) };
            let (n, k) = (code.len(), code.dimension());
            if cli.json {
                print_json(&json!({
                    "n": n, "k": k,
                    "d": d.map(|d| d.d), "d_exact": d.map(|d| d.exact),
                    "shift_closed": ring.is_shift_closed(&code).map_err(usage)?,
                }));
            } else {
                match d {
                    Some(d) if d.exact => println!("[{n},{k},{}]", d.d),
                    Some(d) => println!("[{n},{k},>={}]", d.d),
                    None => println!("[{n},0]"),
                }
            }
            match d {
                Some(d) if !d.exact => Err(Failure::Budget),
                _ => Ok(()),
            }
        }
        Command::Css { command: CssCommand::Verify { q, t, g1, second, convention, claim, budget } } => {
            let f = field(*q)?;
            let modulus = args::modulus(t, f).map_err(Failure::Usage)?;
            let convention = match convention {
                Some(c) => {
                    Some(Convention::parse(c).ok_or_else(|| Failure::Usage(format!("unknown convention {c:?}")))?)
                }
                None => None,
            };
            let claim = match claim {
                Some(c) => {
                    let (n, k, d) = args::triple(c).map_err(Failure::Usage)?;
                    Some(Claim { n, k, d })
                }
                None => None,
            };
            let report =
                verify_table_row(*q, &modulus.format_table(), g1, second, convention, claim, *budget).map_err(usage)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("json"));
            } else {
                print!("{}", report.to_text());
            }
            match report.verdict {
                RowVerdict::Match => Ok(()),
                RowVerdict::BoundOnly => Err(Failure::Budget),
                RowVerdict::Mismatch => Err(Failure::Mismatch),
            }
        }
        Command::Search { command } => run_search(cli, command, raw),
        Command::Db { command } => run_db(cli, command),
    }
}

fn config(s: &SearchArgs, raw: &[String]) -> Result<SearchConfig, Failure> {
    let mut cfg = SearchConfig::new(s.q, args::range(&s.n).map_err(Failure::Usage)?);
    if let Some(i) = &s.i {
        cfg.i_range = Some(args::range(i).map_err(Failure::Usage)?);
    }
    if let Some(a) = &s.a {
        cfg.a_values = args::list(a).map_err(Failure::Usage)?;
    }
    if let Some(b) = &s.b {
        cfg.b_values = args::list(b).map_err(Failure::Usage)?;
    }
    if let Some(d) = &s.degrees {
        cfg.degree_window = args::range(d).map_err(Failure::Usage)?;
    }
    if let Some(k) = &s.k {
        cfg.k_range = Some(args::range(k).map_err(Failure::Usage)?);
    }
    cfg.min_d = s.min_d;
    cfg.trials = s.trials;
    cfg.budget = s.budget;
    cfg.seed = match s.seed {
        Some(seed) => seed,
        None => {
            let seed = args::seed_from_args(raw);
            eprintln!("seed: {seed}");
            seed
        }
    };
    cfg.time_limit = s.time_limit.map(std::time::Duration::from_secs_f64);
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

/// Streams hits to stdout; a closed pipe stops output but not the search.
fn emit(json_out: bool) -> impl FnMut(SearchHit) {
    let mut open = true;
    move |hit: SearchHit| {
        if !open {
            return;
        }
        let line = if json_out { hit.to_json_line() } else { hit.table_row() };
        open = writeln!(std::io::stdout().lock(), "{line}").is_ok();
    }
}

fn report_stats(stats: &SearchStats) {
    eprintln!(
        "moduli {} candidates {} pruned {} evaluated {} failed {} timed out {} hits {}",
        stats.moduli, stats.candidates, stats.pruned, stats.evaluated, stats.failed, stats.timed_out, stats.hits
    );
}

fn run_search(cli: &Cli, command: &SearchCommand, raw: &[String]) -> Result<(), Failure> {
    let mut hits: Vec<SearchHit> = Vec::new();
    let mut printer = emit(cli.json);
    let mut sink = |h: SearchHit| {
        printer(h.clone());
        hits.push(h);
    };
    let (stats, path, update) = match command {
        SearchCommand::Trinomial(s) => {
            let cfg = config(s, raw)?;
            let cat = open(&s.catalog.catalog)?;
            (search_trinomial_pairs(&cfg, &cat, &mut sink).map_err(usage)?, &s.catalog.catalog, s.update)
        }
        SearchCommand::Target(s) => {
            let cfg = config(s, raw)?;
            let n = args::range(&s.n).map_err(Failure::Usage)?;
            let k = s.k.as_deref().ok_or_else(|| Failure::Usage("target search needs --k".into()))?;
            let k = args::range(k).map_err(Failure::Usage)?;
            if n.start() != n.end() || k.start() != k.end() {
                return Err(Failure::Usage("target search takes a single n and k".into()));
            }
            let cat = open(&s.catalog.catalog)?;
            (search_target(&cfg, *n.start(), *k.start(), &cat, &mut sink).map_err(usage)?, &s.catalog.catalog, s.update)
        }
        SearchCommand::Multinomial { search: s, modulus } => {
            let cfg = config(s, raw)?;
            let cat = open(&s.catalog.catalog)?;
            let stats = if modulus.is_empty() {
                search_multinomial(&cfg, &cat, &mut sink)
            } else {
                let f = field(s.q)?;
                let ms = modulus
                    .iter()
                    .map(|m| args::modulus(m, f))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(Failure::Usage)?;
                search_moduli(&cfg, &ms, &cat, &mut sink)
            };
            (stats.map_err(usage)?, &s.catalog.catalog, s.update)
        }
        SearchCommand::Derive { catalog, rules, rounds, update } => {
            let rules = rules
                .split(',')
                .filter(|r| !r.trim().is_empty())
                .map(|r| Rule::parse(r.trim()).ok_or_else(|| Failure::Usage(format!("unknown rule {r:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let cat = open(&catalog.catalog)?;
            if cat.is_empty() {
                return Err(Failure::Usage("the catalog is empty".into()));
            }
            (derive_closure(&cat, &rules, *rounds, &mut sink).map_err(usage)?, &catalog.catalog, *update)
        }
    };
    report_stats(&stats);
    if update {
        let mut cat = open(path)?;
        for h in &hits {
            let reference = if h.witness.is_some() { "search" } else { "derived" };
            let mut rec = CatalogRecord::from_params(&h.params, reference).map_err(usage)?;
            if let Some(w) = &h.witness {
                rec.witness = Some(serde_json::to_value(w).expect("json"));
            }
            cat.update_if_better(rec).map_err(usage)?;
        }
        cat.save(path).map_err(usage)?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<Catalog, Failure> {
    Catalog::open(path).map_err(usage)
}

fn print_records(json_out: bool, recs: &[&CatalogRecord]) {
    if json_out {
        println!("{}", serde_json::to_string_pretty(recs).expect("json"));
        return;
    }
    for r in recs {
        let star = if r.mds { "*" } else { "" };
        println!("[[{},{},{}]]_{}{star}  {}", r.n, r.k, r.d, r.label, r.reference);
    }
}

fn run_db(cli: &Cli, command: &DbCommand) -> Result<(), Failure> {
    match command {
        DbCommand::Ingest { catalog, files } => {
            let mut cat = open(&catalog.catalog)?;
            let mut total = 0;
            for f in files {
                let rep = cat.ingest(f).map_err(usage)?;
                for r in &rep.rejected {
                    eprintln!("{}: {}: rejected: {}", f.display(), r.location, r.message);
                }
                if cli.json {
                    println!(
                        "{}",
                        json!({"file": f.display().to_string(), "loaded": rep.loaded, "inserted": rep.inserted,
                               "improved": rep.improved, "dominated": rep.dominated, "rejected": rep.rejected.len()})
                    );
                } else {
                    println!(
                        "{}: loaded {} (inserted {}, improved {}, dominated {}), rejected {}",
                        f.display(),
                        rep.loaded,
                        rep.inserted,
                        rep.improved,
                        rep.dominated,
                        rep.rejected.len()
                    );
                }
                total += rep.loaded;
            }
            cat.save(&catalog.catalog).map_err(usage)?;
            log::info!("{total} records loaded, catalog holds {}", cat.len());
            Ok(())
        }
        DbCommand::Query { catalog, q, n, k, d } => {
            let cat = open(&catalog.catalog)?;
            let n = args::range(n).map_err(Failure::Usage)?;
            let single = n.start() == n.end();
            let recs: Vec<&CatalogRecord> = match (k, d) {
                (Some(k), _) if single => cat.query_exact(*q, *n.start(), *k).map_err(usage)?.into_iter().collect(),
                (None, Some(d)) if single && !d.contains("..") => {
                    let d: usize = d.parse().map_err(usage)?;
                    cat.query_by_distance(*q, *n.start(), d).map_err(usage)?
                }
                (None, d) => {
                    let d = match d {
                        Some(d) => args::range(d).map_err(Failure::Usage)?,
                        None => 1..=usize::MAX,
                    };
                    cat.query_range(*q, n, d).map_err(usage)?
                }
                (Some(_), _) => return Err(Failure::Usage("--k needs a single length".into())),
            };
            print_records(cli.json, &recs);
            Ok(())
        }
        DbCommand::Update { catalog, q, n, k, d, reference } => {
            let mut cat = open(&catalog.catalog)?;
            let rec = CatalogRecord::new(*q, *n, *k, *d, reference.clone()).map_err(usage)?;
            let verdict = cat.update_if_better(rec).map_err(usage)?;
            cat.save(&catalog.catalog).map_err(usage)?;
            if cli.json {
                println!("{}", serde_json::to_string(&verdict).expect("json"));
            } else {
                println!("{verdict:?}");
            }
            Ok(())
        }
        DbCommand::Export { catalog, out, format } => {
            let cat = open(&catalog.catalog)?;
            let format = match format {
                Some(FileFormat::Csv) => Format::Csv,
                Some(FileFormat::Json) => Format::Json,
                None => Format::from_path(out),
            };
            let count = cat.export(out, format).map_err(usage)?;
            if cli.json {
                println!("{}", json!({"written": count}));
            } else {
                println!("{count} records written to {}", out.display());
            }
            Ok(())
        }
    }
}
