//! Command-line front end: construct perfect sequence covering arrays from
//! projective groups, verify permutation files by exhaustive counting,
//! histogram 4-sequence coverage over a full group stream, print size
//! bounds, and compute or validate planar difference sets.
//!
//! Exit codes: 0 success (and, where applicable, the perfection or bound
//! check passed); 1 the computation ran but the check failed (imperfect
//! array, bound not exceeded); 2 bad input (precondition violation,
//! malformed file); 3 a resource guard refused the run (pass `--heavy`
//! and/or raise `--max-group-size` to override).

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use psca_core::ascstats::{coverage_histogram_thm2, Thm2Report, DEFAULT_GROUP_GUARD};
use psca_core::psca::{
    construct_psca_streaming, construction_summary, g_upper_bound, read_psca, CoverageReport,
    PscaWriter, DEFAULT_ROW_CAP,
};
use psca_core::singer::{singer_difference_set, DifferenceSet, SingerJson};
use psca_core::Error;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;

/// Work cap (coverage-count increments) for thm2 runs without --heavy.
const LIGHT_WORK_CAP: u64 = 1_000_000_000;

#[derive(Parser)]
#[command(
    name = "psca",
    version,
    about = "Perfect sequence covering arrays from projective linear groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for coverage tallies (0 = one per core).
    #[arg(long, global = true, env = "PSCA_THREADS", default_value_t = 0)]
    threads: usize,

    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Allow runs that take hours or write huge files.
    #[arg(long, global = true)]
    heavy: bool,

    /// Refuse to stream groups with more elements than this.
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_GUARD)]
    max_group_size: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build the group-based array on q + 1 symbols at strength t and
    /// stream it to a file.
    Construct {
        /// Field order (a prime power, at least t - 1).
        #[arg(long)]
        q: u64,
        /// Strength: length of the sequences to cover.
        #[arg(long)]
        t: usize,
        /// Output file for the permutation rows.
        #[arg(long)]
        out: PathBuf,
    },
    /// Count the coverage of every t-sequence in a permutation file.
    Verify {
        /// Permutation file to check.
        file: PathBuf,
        /// Strength to verify at (default: the file header's t).
        #[arg(long)]
        t: Option<usize>,
    },
    /// Stream a whole group over the cyclically labeled plane of order q
    /// and histogram the coverage of all 4-sequences of points.
    Thm2 {
        /// Plane order (a prime power).
        #[arg(long)]
        q: u64,
        /// Optional path for the full JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print size bounds for a perfect array on v symbols at strength t.
    Bound {
        /// Number of symbols.
        #[arg(long)]
        v: usize,
        /// Strength (at least 4).
        #[arg(long)]
        t: usize,
    },
    /// Compute the planar difference set of order q (or validate a
    /// user-supplied one) and list its translate lines.
    Singer {
        /// Plane order.
        #[arg(long)]
        q: u64,
        /// File of q + 1 integers to validate instead of computing the
        /// set; entries may be separated by spaces, commas, or newlines,
        /// and '#' starts a comment.
        #[arg(long)]
        difference_set: Option<PathBuf>,
        /// Optional path for the full JSON dump.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: could not size the thread pool: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::GuardExceeded { .. } => ExitCode::from(EXIT_GUARD),
                _ => ExitCode::from(EXIT_BAD_INPUT),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Construct { q, t, out } => cmd_construct(cli, *q, *t, out),
        Command::Verify { file, t } => cmd_verify(cli, file, *t),
        Command::Thm2 { q, out } => cmd_thm2(cli, *q, out.as_deref()),
        Command::Bound { v, t } => cmd_bound(cli, *v, *t),
        Command::Singer {
            q,
            difference_set,
            out,
        } => cmd_singer(cli, *q, difference_set.as_deref(), out.as_deref()),
    }
}

fn cmd_construct(cli: &Cli, q: u64, t: usize, out: &Path) -> Result<u8, Error> {
    let probe = construction_summary(q, t)?;
    let row_cap = if cli.heavy {
        cli.max_group_size
    } else {
        DEFAULT_ROW_CAP.min(cli.max_group_size)
    };
    if probe.rows > row_cap {
        return Err(Error::GuardExceeded {
            what: "construction rows (pass --heavy to allow long runs)",
            limit: row_cap,
            actual: probe.rows,
        });
    }

    let file = File::create(out)?;
    let mut bw = BufWriter::new(file);
    let mut write_err: Option<io::Error> = None;
    let summary = {
        let mut writer = PscaWriter::new(&mut bw, probe.v, t, Some(probe.lambda), probe.rows)?;
        construct_psca_streaming(q, t, |row| {
            if write_err.is_none() {
                if let Err(e) = writer.push_row(row) {
                    write_err = Some(e);
                }
            }
        })?
    };
    if let Some(e) = write_err {
        return Err(e.into());
    }
    bw.flush()?;

    match cli.format {
        Format::Text => println!(
            "wrote {}: v={} t={} lambda={} count={}",
            out.display(),
            summary.v,
            summary.t,
            summary.lambda,
            summary.rows
        ),
        Format::Json => print_json(&json!({
            "out": out.display().to_string(),
            "v": summary.v,
            "t": summary.t,
            "lambda": summary.lambda,
            "rows": summary.rows,
        })),
    }
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, file: &Path, t_flag: Option<usize>) -> Result<u8, Error> {
    let parsed = read_psca(BufReader::new(File::open(file)?))?;
    let t = t_flag.unwrap_or(parsed.t);
    let claimed = if t == parsed.t { parsed.lambda } else { None };
    let report = parsed.multiset.coverage_report(t, claimed)?;

    if let (Some(found), Some(claim)) = (report.lambda, claimed) {
        if found != claim {
            eprintln!("note: header claims lambda={claim}, actual uniform coverage is {found}");
        }
    }
    match cli.format {
        Format::Text => print_verify_text(file, &report),
        Format::Json => print_json(&verify_json(&report)),
    }
    Ok(if report.is_perfect() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn print_verify_text(file: &Path, report: &CoverageReport) {
    println!(
        "{}: {} rows on {} symbols, strength t={}",
        file.display(),
        report.rows,
        report.v,
        report.t
    );
    if let Some(lambda) = report.lambda {
        println!("perfect: every sequence covered exactly lambda={lambda} times");
        return;
    }
    println!("not perfect; coverage histogram (count: sequences):");
    for (count, mult) in &report.histogram {
        println!("  {count}: {mult}");
    }
    println!("witnesses (up to 10, expected {}):", report.expected);
    for w in report.witnesses.iter().take(10) {
        let seq: Vec<String> = w.seq.iter().map(|x| x.to_string()).collect();
        println!("  [{}] covered {} times", seq.join(" "), w.count);
    }
}

fn verify_json(report: &CoverageReport) -> Value {
    let histogram: serde_json::Map<String, Value> = report
        .histogram
        .iter()
        .map(|(&c, &m)| (c.to_string(), json!(m)))
        .collect();
    let witnesses: Vec<Value> = report
        .witnesses
        .iter()
        .take(10)
        .map(|w| json!({ "seq": w.seq, "count": w.count }))
        .collect();
    json!({
        "v": report.v,
        "t": report.t,
        "rows": report.rows,
        "perfect": report.is_perfect(),
        "lambda": report.lambda,
        "expected": report.expected,
        "histogram": Value::Object(histogram),
        "witnesses": witnesses,
    })
}

fn cmd_thm2(cli: &Cli, q: u64, out: Option<&Path>) -> Result<u8, Error> {
    let r = q * q + q + 1;
    let order = psca_core::grp::pgl_order_u64(2, q).ok_or(Error::GuardExceeded {
        what: "group order",
        limit: u64::MAX,
        actual: u64::MAX,
    })?;
    let subsets = r * (r - 1) * (r - 2) * (r - 3) / 24;
    let work = order.saturating_mul(subsets);
    if !cli.heavy && work > LIGHT_WORK_CAP {
        return Err(Error::GuardExceeded {
            what: "coverage work (pass --heavy to allow long runs)",
            limit: LIGHT_WORK_CAP,
            actual: work,
        });
    }

    let report = coverage_histogram_thm2(q, cli.max_group_size)?;
    if let Some(path) = out {
        let mut f = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut f, &report.to_json()).map_err(Error::from)?;
        f.write_all(b"\n")?;
        f.flush()?;
    }
    match cli.format {
        Format::Text => print_thm2_text(&report),
        Format::Json => print_json(&report.to_json()),
    }
    Ok(
        if report.exceeds_strict_bound() && report.exceeds_weak_bound() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        },
    )
}

fn print_thm2_text(report: &Thm2Report) {
    let q = report.q;
    println!(
        "q={q}: streamed {} group elements over {} points",
        report.rows,
        q * q + q + 1
    );
    println!(
        "every 4-sequence with no four collinear points is covered exactly {} times",
        report.lambda_star
    );
    let c = &report.census;
    println!(
        "census: frame={} t1={} t2={} t3={} t4={} collinear4={} total={}",
        c.frame, c.t[0], c.t[1], c.t[2], c.t[3], c.collinear4, c.total
    );
    let s = &report.sums;
    println!(
        "ascent sums: e1={} e2={} e3={} e4={} (total e5={})",
        s.e1, s.e2, s.e3, s.e4, s.e5
    );
    println!(
        "coverage histogram: {}",
        report
            .histogram
            .iter()
            .map(|(c, m)| format!("{c}:{m}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!(
        "perfectly covered: {} of {} sequences ({:.6})",
        report.perfect_count,
        report.total_sequences,
        report.perfect_fraction()
    );
    println!(
        "exceeds q/(q+1) = {:.6}: {}; exceeds 1 - 1/q = {:.6}: {}",
        q as f64 / (q + 1) as f64,
        report.exceeds_strict_bound(),
        1.0 - 1.0 / q as f64,
        report.exceeds_weak_bound()
    );
}

fn cmd_bound(cli: &Cli, v: usize, t: usize) -> Result<u8, Error> {
    if t < 4 || v < t {
        eprintln!("error: bounds need v >= t >= 4 (got v={v}, t={t})");
        return Ok(EXIT_BAD_INPUT);
    }
    let ub = g_upper_bound(v, t)?;
    match cli.format {
        Format::Text => {
            println!("v={v} t={t}: least usable prime power q* = {}", ub.q_star);
            println!("constructive multiplicity at q*: {}", ub.constructive);
            println!("closed-form ceiling: {}", ub.closed_form);
        }
        Format::Json => print_json(&json!({
            "v": v,
            "t": t,
            "q_star": ub.q_star,
            "constructive": big_json(&ub.constructive),
            "closed_form": big_json(&ub.closed_form),
        })),
    }
    Ok(EXIT_OK)
}

fn cmd_singer(cli: &Cli, q: u64, ds_file: Option<&Path>, out: Option<&Path>) -> Result<u8, Error> {
    let d = match ds_file {
        Some(path) => parse_difference_set(path, q)?,
        None => singer_difference_set(q)?,
    };
    let dump = SingerJson {
        q,
        r: d.r(),
        d: d.elems().to_vec(),
        lines: d.lineset(),
    };
    if let Some(path) = out {
        let mut f = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut f, &dump).map_err(Error::from)?;
        f.write_all(b"\n")?;
        f.flush()?;
    }
    match cli.format {
        Format::Text => {
            println!("q={} r={}", dump.q, dump.r);
            let elems: Vec<String> = dump.d.iter().map(|x| x.to_string()).collect();
            println!("D = {{{}}}", elems.join(", "));
            println!(
                "lines: the {} cyclic translates D + j (normalized so min(D) = 0)",
                dump.r
            );
        }
        Format::Json => print_json(&serde_json::to_value(&dump).map_err(Error::from)?),
    }
    Ok(EXIT_OK)
}

/// Reads a difference set from a text file: integers separated by
/// whitespace or commas, '#' comments allowed. The set is validated against
/// the plane of order q and normalized so its least entry is 0.
fn parse_difference_set(path: &Path, q: u64) -> Result<DifferenceSet, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut elems: Vec<u64> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            let x: u64 = tok.parse().map_err(|_| Error::Malformed {
                line: no + 1,
                reason: format!("not a nonnegative integer: {tok:?}"),
            })?;
            elems.push(x);
        }
    }
    if elems.len() as u64 != q + 1 {
        return Err(Error::Malformed {
            line: 0,
            reason: format!(
                "difference set for order {q} needs q + 1 = {} entries, found {}",
                q + 1,
                elems.len()
            ),
        });
    }
    DifferenceSet::new(q * q + q + 1, elems)
}

fn big_json(x: &BigUint) -> Value {
    match u64::try_from(x) {
        Ok(small) if small <= (1u64 << 53) => json!(small),
        _ => json!(x.to_string()),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("valid json"));
}
