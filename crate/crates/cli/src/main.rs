//! `zerosum`: inspect groups, compute invariants, run extractors and verify
//! closed forms from the command line.
//!
//! Exit codes: 0 pass, 1 internal error, 2 invalid input or failed
//! precondition, 3 a claimed theorem was contradicted, 4 undecided because of
//! a cap or budget.

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use zerosum_core::group::build_spec;
use zerosum_core::harness::{
    exit_code, info_report, random_sequence, run_invariant, table_csv, verify, Cache,
    ExtractorKind, Prepared, RecordValue, VerifyId, VerifyMode, VerifyParams,
};
use zerosum_core::invariants::{
    formula_table, Invariant, SChoice, SearchOptions, TableOptions, TableRow,
};
use zerosum_core::seq::{read_sequence, witness_to_json, write_sequence, DEFAULT_BUDGET};
use zerosum_core::Sequence;

const CACHE_ENV: &str = "ZEROSUM_CACHE";

#[derive(Parser)]
#[command(
    name = "zerosum",
    version,
    about = "Product-one invariants of small finite groups"
)]
struct Cli {
    /// Worker threads; 0 uses every core. Never changes any emitted value.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a group.
    Info {
        spec: String,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Compute one invariant (d, E, s, eta, D, sL:<L>, Dk:<k>).
    Invariant {
        name: String,
        spec: String,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
        /// JSON-lines result cache.
        #[arg(long, env = CACHE_ENV)]
        cache: Option<PathBuf>,
        /// Ignore the cache even when the environment names one.
        #[arg(long)]
        no_cache: bool,
        /// Directory for extremal witness files.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
        /// Leave `elapsed_ms` null so output is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Extract a product-one subsequence with a witness.
    Extract {
        /// lemma2.4[:k], l31-1, l31-2, l31-3 or egz.
        extractor: String,
        spec: String,
        /// Sequence file: the group spec, then `index:multiplicity` lines.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        seq: Option<PathBuf>,
        /// `seed:len` (or `random:seed:len`) random input.
        #[arg(long)]
        random: Option<String>,
        /// Include the recursion trace.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Check a closed form over a parameter range.
    Verify {
        /// thm1.2, thm1.3, lemma2.3, lemma2.1 or dk.
        id: String,
        #[arg(long, value_parser = parse_range)]
        m: Span,
        #[arg(long, value_parser = parse_range)]
        n: Span,
        /// `all` or one twist exponent.
        #[arg(long, default_value = "all", value_parser = parse_s)]
        s: SChoice,
        /// `exact` or `sampled:<trials>`.
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Directory for sequences that broke a statement.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Computed invariants against their closed forms.
    Table {
        #[arg(long, value_parser = parse_range)]
        m: Span,
        #[arg(long, value_parser = parse_range)]
        n: Span,
        #[arg(long, default_value = "all", value_parser = parse_s)]
        s: SChoice,
        #[arg(long, value_enum, default_value_t = Emit::Csv)]
        emit: Emit,
        /// Largest order for which d is searched exactly.
        #[arg(long)]
        exact_d_order: Option<usize>,
        /// Largest order for which the other invariants are searched exactly.
        #[arg(long)]
        exact_order: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug)]
struct Span(usize, usize);

impl Span {
    fn range(&self) -> RangeInclusive<usize> {
        self.0..=self.1
    }
}

fn parse_range(s: &str) -> Result<Span, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad bound {t:?}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (num(s)?, num(s)?),
    };
    if lo == 0 || lo > hi {
        return Err(format!("range {s:?} must be A..B with 1 <= A <= B"));
    }
    Ok(Span(lo, hi))
}

fn parse_s(s: &str) -> Result<SChoice, String> {
    if s == "all" {
        return Ok(SChoice::All);
    }
    s.parse()
        .map(SChoice::Specific)
        .map_err(|_| format!("expected `all` or an integer, got {s:?}"))
}

/// Invalid input detected by the CLI itself.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if let Some(core) = e.downcast_ref::<zerosum_core::Error>() {
                exit_code(core)
            } else if e.downcast_ref::<Usage>().is_some() {
                2
            } else {
                1
            };
            ExitCode::from(code as u8)
        }
    }
}

fn run(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Info { spec, emit } => {
            let report = info_report(&build_spec(&spec)?)?;
            match emit {
                Emit::Json => println!("{}", serde_json::to_string(&report)?),
                _ => print!("{}", report.to_text()),
            }
            Ok(0)
        }
        Command::Invariant {
            name,
            spec,
            cap,
            budget,
            emit,
            cache,
            no_cache,
            witness_dir,
            no_timing,
        } => {
            let group = build_spec(&spec)?;
            let invariant: Invariant = name.parse()?;
            let mut cache = match cache.filter(|_| !no_cache) {
                Some(path) => Some(Cache::open(&path)?),
                None => None,
            };
            if let Some(dir) = &witness_dir {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            let opts = SearchOptions { cap, budget };
            let rec = run_invariant(
                &group,
                &invariant,
                opts,
                cache.as_mut(),
                witness_dir.as_deref(),
                !no_timing,
            )?;
            match emit {
                Emit::Json => println!("{}", rec.to_json_line()),
                _ => {
                    let value = match rec.value {
                        RecordValue::Exact(v) => v.to_string(),
                        RecordValue::Unknown { unknown_cap } => {
                            format!("unknown (no decision up to cap {unknown_cap})")
                        }
                    };
                    println!(
                        "{}({}) = {value}  [{}]",
                        rec.invariant, rec.spec, rec.method
                    );
                    if let Some(w) = &rec.witness_file {
                        println!("witness file {w}");
                    }
                }
            }
            Ok(match rec.value {
                RecordValue::Exact(_) => 0,
                RecordValue::Unknown { .. } => 4,
            })
        }
        Command::Extract {
            extractor,
            spec,
            seq,
            random,
            trace,
            emit,
        } => extract(
            &extractor,
            &spec,
            seq.as_deref(),
            random.as_deref(),
            trace,
            emit,
        ),
        Command::Verify {
            id,
            m,
            n,
            s,
            mode,
            seed,
            budget,
            out,
            emit,
        } => {
            let id: VerifyId = id.parse()?;
            let mode: VerifyMode = mode.parse()?;
            let params = VerifyParams {
                m: m.range(),
                n: n.range(),
                s,
                mode,
                seed,
                search: SearchOptions { cap: None, budget },
            };
            let report = verify(id, &params)?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            for (i, c) in report.cases.iter().enumerate() {
                let saved = match (&out, &c.offending) {
                    (Some(dir), Some(seq)) => {
                        let path = dir.join(format!("{id}_{i}.seq"));
                        write_sequence(&path, seq)?;
                        Some(path.display().to_string())
                    }
                    _ => None,
                };
                let status = format!("{:?}", c.status).to_uppercase();
                match emit {
                    Emit::Json => println!(
                        "{}",
                        json!({
                            "id": id.to_string(),
                            "group": c.group,
                            "check": c.check,
                            "expected": c.expected,
                            "got": c.got,
                            "status": status.to_lowercase(),
                            "offending": c.offending.as_ref().map(|s| s.to_string()),
                            "offending_file": saved,
                        })
                    ),
                    _ => {
                        println!("{status:<7} {:<22} {}: got {}", c.group, c.check, c.got);
                        if let Some(seq) = &c.offending {
                            println!("        offending sequence {seq}");
                        }
                        if let Some(p) = saved {
                            println!("        written to {p}");
                        }
                    }
                }
            }
            if emit != Emit::Json {
                println!(
                    "{id}: {}",
                    if report.passed() {
                        "pass"
                    } else {
                        "not passed"
                    }
                );
            }
            Ok(report.exit_code())
        }
        Command::Table {
            m,
            n,
            s,
            emit,
            exact_d_order,
            exact_order,
        } => {
            let defaults = TableOptions::default();
            let opts = TableOptions {
                exact_d_order: exact_d_order.unwrap_or(defaults.exact_d_order),
                exact_order: exact_order.unwrap_or(defaults.exact_order),
                search: defaults.search,
            };
            let rows = formula_table(m.range(), n.range(), s, &opts)?;
            match emit {
                Emit::Csv => print!("{}", table_csv(&rows)),
                Emit::Text => print!("{}", table_text(&rows)),
                Emit::Json => return Err(usage("table emits csv or text")),
            }
            let failed = rows
                .iter()
                .flat_map(|r| &r.cells)
                .any(|c| c.ok == Some(false));
            Ok(if failed { 3 } else { 0 })
        }
    }
}

fn table_text(rows: &[TableRow]) -> String {
    let mut out = String::new();
    for r in rows {
        writeln!(
            out,
            "{} (m={}, n={}, s={}; |G|={}, e={})",
            r.spec, r.m, r.n, r.s, r.order, r.exponent
        )
        .unwrap();
        for c in &r.cells {
            let computed = c
                .computed
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into());
            let ok = match c.ok {
                Some(true) => "ok",
                Some(false) => "MISMATCH",
                None => "",
            };
            writeln!(
                out,
                "  {:<6} {:>8} {:>2} {:<4} {:<13} {:<8} {}",
                c.name,
                computed,
                c.relation,
                c.formula,
                c.method.as_str(),
                ok,
                c.note
            )
            .unwrap();
        }
    }
    out
}

fn extract(
    extractor: &str,
    spec: &str,
    seq: Option<&Path>,
    random: Option<&str>,
    trace: bool,
    emit: Emit,
) -> anyhow::Result<i32> {
    let group = build_spec(spec)?;
    let kind: ExtractorKind = extractor.parse()?;
    let input: Sequence = match (seq, random) {
        (Some(path), _) => {
            let s = read_sequence(path)?;
            if s.group().spec() != group.spec() {
                return Err(usage(format!(
                    "{} is over {}, not {}",
                    path.display(),
                    s.group().spec(),
                    group.spec()
                )));
            }
            Sequence::from_counts(group.clone(), s.counts().iter().map(|(&g, &k)| (g, k)))?
        }
        (None, Some(r)) => {
            let parsed = r
                .strip_prefix("random:")
                .unwrap_or(r)
                .split_once(':')
                .and_then(|(a, b)| Some((a.parse::<u64>().ok()?, b.parse::<usize>().ok()?)));
            let (seed, len) =
                parsed.ok_or_else(|| usage(format!("--random expects seed:len, got {r:?}")))?;
            random_sequence(&group, len, seed, 0)
        }
        (None, None) => return Err(usage("one of --seq or --random is required")),
    };
    let prepared = Prepared::new(kind, &group)?;
    let outcome = match prepared.extract(&input) {
        Ok(o) => o,
        Err(e) => {
            if let (true, zerosum_core::Error::TheoremViolation { trace: Some(t), .. }) =
                (trace, &e)
            {
                eprintln!("{}", serde_json::to_string(t)?);
            }
            return Err(e.into());
        }
    };
    let witness = outcome.witness.as_ref().map(|w| witness_to_json(&group, w));
    match emit {
        Emit::Json => {
            let mut value = json!({
                "group": group.spec(),
                "extractor": kind.to_string(),
                "input": input.to_string(),
                "witness": witness,
                "certificate": outcome.certificate,
            });
            if trace {
                value["trace"] = serde_json::to_value(&outcome.trace)?;
            }
            println!("{value}");
        }
        _ => {
            println!("input    {input}  ({} terms)", input.len());
            match &witness {
                Some(w) => println!(
                    "witness  {:?}  (length {}, product {})",
                    w.ordered, w.length, w.product
                ),
                None => println!("witness  none"),
            }
            if let Some(c) = &outcome.certificate {
                println!("certificate  {}", serde_json::to_string(c)?);
            }
            if let (true, Some(t)) = (trace, &outcome.trace) {
                for step in &t.steps {
                    println!(
                        "  [{}:{}] {}  positions {:?}  sigma {}{}",
                        step.scope,
                        step.level,
                        step.description,
                        step.positions,
                        step.sigma,
                        if step.in_kernel { "  in kernel" } else { "" }
                    );
                }
                for note in &t.notes {
                    println!("  note: {note}");
                }
            }
        }
    }
    Ok(0)
}
