//! Sequence covering arrays built from group actions on projective space.
//!
//! A multiset X of permutations of [v] covers the ordered sequence
//! (s_1, ..., s_t) of distinct symbols when the symbols appear in that
//! relative order in a row. X is a perfect sequence covering array of
//! strength t when every such sequence is covered by exactly lambda rows;
//! counting rows forces |X| = t! * lambda.
//!
//! The construction here streams PGL(t-1, q) acting on PG(t-2, q) with the
//! points of a rational normal curve arc labeled 0..=q and every other point
//! labeled afterwards in enumeration order. Erasing the non-arc symbols from
//! each group element's one-line row leaves a perfect array on q + 1 symbols,
//! of strength t and multiplicity |PGL(t-1, q)| / t!.
//!
//! Coverage is tallied by walking position subsets: each increasing tuple of
//! positions in a row witnesses exactly one covered sequence, so no sorting
//! or searching is involved. Sequences are indexed by a mixed-radix rank
//! ([`seq_rank`] / [`seq_unrank`]) so tallies live in a flat table.

use crate::error::{Error, Result};
use crate::grp::{pgl_order, Labeling, PglStream};
use crate::projgeom::Geometry;
use num_bigint::BigUint;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::{SystemTime, UNIX_EPOCH};

/// Default cap on materialized rows.
pub const DEFAULT_ROW_CAP: u64 = 10_000_000;

/// Cap on the flat tally table, in sequence ranks.
pub const MAX_RANK_SPACE: u64 = 100_000_000;

/// Witnesses reported per deviant coverage count.
const WITNESSES_PER_COUNT: usize = 3;

/// Total witness cap in a report.
const WITNESS_CAP: usize = 24;

/// t! as a u64 (t is small everywhere in this crate).
#[must_use]
pub fn factorial(t: usize) -> u64 {
    (1..=t as u64).product()
}

/// Number of ordered t-sequences of distinct symbols from [v].
#[must_use]
pub fn rank_space_size(v: usize, t: usize) -> u64 {
    (0..t).map(|i| (v - i) as u64).product()
}

/// Mixed-radix rank of a sequence of distinct symbols from [v]: digit k is
/// s_k minus the number of earlier symbols below it, with radix v - k.
#[must_use]
pub fn seq_rank(v: usize, s: &[u32]) -> u64 {
    let mut rank = 0u64;
    for (k, &sk) in s.iter().enumerate() {
        let below = s[..k].iter().filter(|&&e| e < sk).count() as u64;
        rank = rank * (v - k) as u64 + (u64::from(sk) - below);
    }
    rank
}

/// Inverse of [`seq_rank`]: digit k picks the k-th smallest unused symbol.
#[must_use]
pub fn seq_unrank(v: usize, t: usize, mut rank: u64) -> Vec<u32> {
    let mut digits = vec![0u64; t];
    for k in (0..t).rev() {
        let radix = (v - k) as u64;
        digits[k] = rank % radix;
        rank /= radix;
    }
    let mut used = vec![false; v];
    let mut out = Vec::with_capacity(t);
    for &d in &digits {
        let mut remaining = d;
        for (sym, flag) in used.iter_mut().enumerate() {
            if *flag {
                continue;
            }
            if remaining == 0 {
                *flag = true;
                out.push(sym as u32);
                break;
            }
            remaining -= 1;
        }
    }
    out
}

/// True when the symbols of s appear in order in the permutation row.
#[must_use]
pub fn covers(row: &[u32], s: &[u32]) -> bool {
    let mut pos = vec![0u32; row.len()];
    for (i, &x) in row.iter().enumerate() {
        pos[x as usize] = i as u32;
    }
    s.windows(2)
        .all(|w| pos[w[0] as usize] < pos[w[1] as usize])
}

/// A multiset of permutations of [v], stored as one-line rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMultiset {
    v: usize,
    rows: Vec<Vec<u32>>,
}

impl PermutationMultiset {
    /// Wraps rows after checking each is a permutation of [v].
    pub fn new(v: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        for row in &rows {
            validate_row(v, row)?;
        }
        Ok(PermutationMultiset { v, rows })
    }

    /// Number of symbols.
    #[must_use]
    pub fn v(&self) -> usize {
        self.v
    }

    /// Number of rows, multiplicity included.
    #[must_use]
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The rows, in stored order.
    #[must_use]
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Keeps only the symbols below the cutoff in each row, preserving
    /// relative order; the result is a multiset of permutations of [j].
    pub fn delete_symbols_from(&self, j: usize) -> Result<PermutationMultiset> {
        if j < 1 || j > self.v {
            return Err(Error::InvalidCutoff { j, v: self.v });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().copied().filter(|&x| (x as usize) < j).collect())
            .collect();
        Ok(PermutationMultiset { v: j, rows })
    }

    /// Tallies the coverage of every t-sequence. `claimed` seeds the
    /// expected count for witness reporting; otherwise the modal count is
    /// used.
    pub fn coverage_report(&self, t: usize, claimed: Option<u64>) -> Result<CoverageReport> {
        if self.rows.is_empty() {
            return Err(Error::EmptyMultiset);
        }
        if t < 2 || t > self.v {
            return Err(Error::InvalidStrength { t, v: self.v });
        }
        let space = rank_space_size(self.v, t);
        if space > MAX_RANK_SPACE {
            return Err(Error::GuardExceeded {
                what: "sequence tally table",
                limit: MAX_RANK_SPACE,
                actual: space,
            });
        }
        let space = space as usize;
        let v = self.v;
        let counts = self
            .rows
            .par_chunks(4096)
            .map(|chunk| {
                let mut local = vec![0u32; space];
                for row in chunk {
                    tally_row(&mut local, row, v, t);
                }
                local
            })
            .reduce(
                || vec![0u32; space],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    a
                },
            );

        let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
        for &c in &counts {
            *histogram.entry(u64::from(c)).or_insert(0) += 1;
        }
        let lambda = if histogram.len() == 1 {
            Some(*histogram.keys().next().expect("nonempty histogram"))
        } else {
            None
        };
        let expected = claimed.or(lambda).unwrap_or_else(|| {
            *histogram
                .iter()
                .max_by_key(|&(_, &mult)| mult)
                .expect("nonempty histogram")
                .0
        });
        let mut witnesses = Vec::new();
        let mut per_count: BTreeMap<u64, usize> = BTreeMap::new();
        if lambda != Some(expected) {
            for (rank, &c) in counts.iter().enumerate() {
                let c = u64::from(c);
                if c == expected {
                    continue;
                }
                let slot = per_count.entry(c).or_insert(0);
                if *slot >= WITNESSES_PER_COUNT {
                    continue;
                }
                *slot += 1;
                witnesses.push(Witness {
                    seq: seq_unrank(v, t, rank as u64),
                    count: c,
                });
                if witnesses.len() >= WITNESS_CAP {
                    break;
                }
            }
        }

        // A uniform tally forces the size law |X| = t! * lambda.
        if let Some(l) = lambda {
            if self.rows.len() as u64 != factorial(t) * l {
                return Err(Error::Internal(format!(
                    "uniform coverage {l} contradicts {} rows at strength {t}",
                    self.rows.len()
                )));
            }
        }
        Ok(CoverageReport {
            v,
            t,
            rows: self.rows.len() as u64,
            lambda,
            expected,
            histogram,
            witnesses,
        })
    }
}

fn validate_row(v: usize, row: &[u32]) -> Result<()> {
    if row.len() != v {
        return Err(Error::WrongSequenceLength {
            expected: v,
            got: row.len(),
        });
    }
    let mut seen = vec![false; v];
    for &x in row {
        let x = x as usize;
        if x >= v {
            return Err(Error::ValueOutOfRange {
                value: x as u64,
                q: v as u64,
            });
        }
        if seen[x] {
            return Err(Error::RepeatedEntries);
        }
        seen[x] = true;
    }
    Ok(())
}

/// Adds every sequence covered by the row into the tally table: each
/// increasing tuple of t positions contributes the sequence read off those
/// positions. The mixed-radix rank is built incrementally along the way.
pub(crate) fn tally_row(counts: &mut [u32], row: &[u32], v: usize, t: usize) {
    let mut prefix = vec![0u32; t];
    tally_positions(counts, row, v, t, 0, 0, 0, &mut prefix);
}

#[allow(clippy::too_many_arguments)]
fn tally_positions(
    counts: &mut [u32],
    row: &[u32],
    v: usize,
    t: usize,
    depth: usize,
    start: usize,
    rank: u64,
    prefix: &mut [u32],
) {
    if depth == t {
        counts[rank as usize] += 1;
        return;
    }
    // Positions left must still accommodate t - depth picks.
    let last_start = row.len() - (t - depth) + 1;
    for p in start..last_start {
        let sym = row[p];
        let below = prefix[..depth].iter().filter(|&&e| e < sym).count() as u64;
        let digit = u64::from(sym) - below;
        prefix[depth] = sym;
        tally_positions(
            counts,
            row,
            v,
            t,
            depth + 1,
            p + 1,
            rank * (v - depth) as u64 + digit,
            prefix,
        );
    }
}

/// A sequence whose coverage deviates from the expected count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub seq: Vec<u32>,
    pub count: u64,
}

/// Outcome of a full coverage tally at one strength.
#[derive(Clone, Debug)]
pub struct CoverageReport {
    pub v: usize,
    pub t: usize,
    pub rows: u64,
    /// The uniform coverage count, when one exists.
    pub lambda: Option<u64>,
    /// The count deviants are measured against (claimed, else uniform,
    /// else modal).
    pub expected: u64,
    /// coverage count -> number of sequences with that count.
    pub histogram: BTreeMap<u64, u64>,
    /// A few deviant sequences per off-count, capped.
    pub witnesses: Vec<Witness>,
}

impl CoverageReport {
    /// True when every sequence is covered the same number of times.
    #[must_use]
    pub fn is_perfect(&self) -> bool {
        self.lambda.is_some()
    }
}

/// Shape of a finished construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionSummary {
    pub q: u64,
    pub t: usize,
    /// Symbols in the array: q + 1.
    pub v: usize,
    /// Rows emitted: |PGL(t-1, q)|.
    pub rows: u64,
    /// Uniform coverage count: rows / t!.
    pub lambda: u64,
}

/// Labels the points of the geometry so that the rational normal curve arc
/// comes first (curve points in field order, then the last coordinate
/// point), with all remaining points following in enumeration order.
pub fn arc_first_labeling(g: &Geometry) -> Result<Labeling> {
    let arc = g.rational_normal_curve_arc()?;
    let r = g.num_points();
    let mut to_label = vec![usize::MAX; r];
    for (label, &p) in arc.iter().enumerate() {
        to_label[p] = label;
    }
    let mut next = arc.len();
    for slot in &mut to_label {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    Labeling::new(to_label)
}

/// Validates (q, t) and reports the shape the construction will have,
/// without running it: row count, symbol count, uniform coverage.
pub fn construction_summary(q: u64, t: usize) -> Result<ConstructionSummary> {
    construction_parameters(q, t).map(|(_, _, s)| s)
}

fn construction_parameters(q: u64, t: usize) -> Result<(Geometry, Labeling, ConstructionSummary)> {
    if t < 3 {
        return Err(Error::StrengthTooSmall { t });
    }
    if q + 1 < t as u64 {
        return Err(Error::FieldTooSmall {
            q,
            n: t - 2,
            needed: t as u64 - 1,
        });
    }
    let g = Geometry::new(t - 2, q)?;
    let labeling = arc_first_labeling(&g)?;
    let order = pgl_order(t - 2, q);
    let fact = BigUint::from(factorial(t));
    let lambda_big = &order / &fact;
    if &order % &fact != BigUint::from(0u32) {
        return Err(Error::Internal(format!(
            "group order {order} is not divisible by {t}!"
        )));
    }
    let rows = u64::try_from(&order).map_err(|_| Error::GuardExceeded {
        what: "group order",
        limit: u64::MAX,
        actual: u64::MAX,
    })?;
    let lambda = u64::try_from(&lambda_big).expect("lambda fits when the order does");
    let summary = ConstructionSummary {
        q,
        t,
        v: q as usize + 1,
        rows,
        lambda,
    };
    Ok((g, labeling, summary))
}

/// Streams the construction row by row without materializing it. Rows are
/// produced in canonical group order, so output is deterministic.
pub fn construct_psca_streaming<F: FnMut(&[u32])>(
    q: u64,
    t: usize,
    mut sink: F,
) -> Result<ConstructionSummary> {
    let (g, labeling, summary) = construction_parameters(q, t)?;
    let keep = summary.v as u32;
    let stream = PglStream::new(&g);
    let mut short = vec![0u32; summary.v];
    let mut emitted = 0u64;
    stream.for_each_row(&labeling, |row| {
        let mut k = 0;
        for &x in row {
            if x < keep {
                short[k] = x;
                k += 1;
            }
        }
        debug_assert_eq!(k, summary.v);
        sink(&short);
        emitted += 1;
    });
    if emitted != summary.rows {
        return Err(Error::Internal(format!(
            "streamed {emitted} rows, expected {}",
            summary.rows
        )));
    }
    Ok(summary)
}

/// Materializes the construction, guarded by a row cap.
pub fn construct_psca(
    q: u64,
    t: usize,
    row_cap: u64,
) -> Result<(PermutationMultiset, ConstructionSummary)> {
    let (_, _, probe) = construction_parameters(q, t)?;
    if probe.rows > row_cap {
        return Err(Error::GuardExceeded {
            what: "materialized rows",
            limit: row_cap,
            actual: probe.rows,
        });
    }
    let mut rows = Vec::with_capacity(probe.rows as usize);
    let summary = construct_psca_streaming(q, t, |row| rows.push(row.to_vec()))?;
    Ok((PermutationMultiset { v: summary.v, rows }, summary))
}

/// Upper-bound data for the least multiplicity of a perfect array on v
/// symbols at strength t: the least prime power admitting the construction,
/// the multiplicity the construction achieves there, and the closed-form
/// ceiling floor((2v)^((t-1)^2) / (t! (2v - 1))).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperBound {
    pub q_star: u64,
    pub constructive: BigUint,
    pub closed_form: BigUint,
}

/// Least prime power at least x.
#[must_use]
pub fn next_prime_power(x: u64) -> u64 {
    let mut k = x.max(2);
    loop {
        if crate::gf::factor_prime_power(k).is_ok() {
            return k;
        }
        k += 1;
    }
}

/// Computes [`UpperBound`] for v symbols at strength t.
pub fn g_upper_bound(v: usize, t: usize) -> Result<UpperBound> {
    if t < 3 {
        return Err(Error::StrengthTooSmall { t });
    }
    if v < t {
        return Err(Error::InvalidStrength { t, v });
    }
    let q_star = next_prime_power(((v - 1).max(t - 1)) as u64);
    let constructive = pgl_order(t - 2, q_star) / BigUint::from(factorial(t));
    let exponent = ((t - 1) * (t - 1)) as u32;
    let closed_form = BigUint::from(2 * v as u64).pow(exponent)
        / (BigUint::from(factorial(t)) * BigUint::from(2 * v as u64 - 1));
    Ok(UpperBound {
        q_star,
        constructive,
        closed_form,
    })
}

/// Writes the text form: a header, a timestamp comment, then one row per
/// line. The header carries v, t, the uniform count when known, and the
/// row count; everything but the comment is deterministic.
pub fn write_psca<W: Write>(
    w: &mut W,
    multiset: &PermutationMultiset,
    t: usize,
    lambda: Option<u64>,
) -> std::io::Result<()> {
    let mut sink = PscaWriter::new(w, multiset.v(), t, lambda, multiset.len() as u64)?;
    for row in multiset.rows() {
        sink.push_row(row)?;
    }
    Ok(())
}

/// Incremental writer for streamed construction output.
pub struct PscaWriter<'w, W: Write> {
    w: &'w mut W,
    v: usize,
}

impl<'w, W: Write> PscaWriter<'w, W> {
    /// Writes the header and timestamp comment immediately.
    pub fn new(
        w: &'w mut W,
        v: usize,
        t: usize,
        lambda: Option<u64>,
        count: u64,
    ) -> std::io::Result<Self> {
        let lambda = lambda.map_or_else(|| "?".to_string(), |l| l.to_string());
        writeln!(w, "psca v={v} t={t} lambda={lambda} count={count}")?;
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        writeln!(w, "# generated at unix time {stamp}")?;
        Ok(PscaWriter { w, v })
    }

    pub fn push_row(&mut self, row: &[u32]) -> std::io::Result<()> {
        debug_assert_eq!(row.len(), self.v);
        let mut line = String::with_capacity(self.v * 3);
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&x.to_string());
        }
        writeln!(self.w, "{line}")
    }
}

/// A parsed text-format array.
#[derive(Clone, Debug)]
pub struct ReadPsca {
    pub multiset: PermutationMultiset,
    pub t: usize,
    /// The header's count, when it was not "?".
    pub lambda: Option<u64>,
}

/// Reads the text form back, validating the header, the row count, and that
/// every row is a permutation. Comment lines and blank lines are skipped.
pub fn read_psca<R: BufRead>(r: R) -> Result<ReadPsca> {
    let mut lines = r.lines().enumerate();
    let (header_no, header) = loop {
        match lines.next() {
            None => {
                return Err(Error::Malformed {
                    line: 1,
                    reason: "missing header".into(),
                })
            }
            Some((no, line)) => {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                break (no + 1, line);
            }
        }
    };

    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "psca" {
        return Err(Error::Malformed {
            line: header_no,
            reason: "header must be `psca v=.. t=.. lambda=.. count=..`".into(),
        });
    }
    let v = parse_kv(fields[1], "v", header_no)? as usize;
    let t = parse_kv(fields[2], "t", header_no)? as usize;
    let lambda = match fields[3].strip_prefix("lambda=") {
        Some("?") => None,
        Some(x) => Some(x.parse::<u64>().map_err(|_| Error::Malformed {
            line: header_no,
            reason: "lambda must be an integer or `?`".into(),
        })?),
        None => {
            return Err(Error::Malformed {
                line: header_no,
                reason: "expected lambda=..".into(),
            })
        }
    };
    let count = parse_kv(fields[4], "count", header_no)?;

    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if rows.len() as u64 == count {
            return Err(Error::Malformed {
                line: no + 1,
                reason: format!("more than {count} rows"),
            });
        }
        let mut row = Vec::with_capacity(v);
        for tok in trimmed.split_whitespace() {
            row.push(tok.parse::<u32>().map_err(|_| Error::Malformed {
                line: no + 1,
                reason: format!("`{tok}` is not a symbol"),
            })?);
        }
        validate_row(v, &row).map_err(|e| Error::Malformed {
            line: no + 1,
            reason: e.to_string(),
        })?;
        rows.push(row);
    }
    if rows.len() as u64 != count {
        return Err(Error::Malformed {
            line: 0,
            reason: format!("expected {count} rows, found {}", rows.len()),
        });
    }
    Ok(ReadPsca {
        multiset: PermutationMultiset { v, rows },
        t,
        lambda,
    })
}

fn parse_kv(field: &str, key: &str, line: usize) -> Result<u64> {
    field
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .and_then(|x| x.parse::<u64>().ok())
        .ok_or_else(|| Error::Malformed {
            line,
            reason: format!("expected {key}=<integer>"),
        })
}
