//! Ascent statistics of labeled projective planes, and the almost-perfect
//! coverage census for 4-sequences.
//!
//! Fix a bijective labeling of the r = q^2 + q + 1 points of PG(2, q) and
//! write each line as its sorted label vector l_0 < l_1 < ... < l_q. With
//! b_i = l_i - i, four families of strictly ascending 4-sequences that use
//! exactly three collinear points are counted by the sums
//!
//!   e1 = sum over lines of sum_i C(q-i, 2) b_i        (off point last)
//!   e2 = sum over lines of sum_{i<j} (q-j)(b_j - b_i)
//!   e3 = sum over lines of sum_{i<j} i (b_j - b_i)
//!   e4 = sum over lines of sum_i C(i, 2) (q^2 - b_i)  (off point first)
//!
//! and their total is e5 = r q^3 (q+1)(q-1)/6 for every labeling; the two
//! halves e1 + e4 and e2 + e3 are each e5/2 for every labeling, and a cyclic
//! (difference-set) labeling splits all four evenly at e5/4. Those facts make
//! the coverage of every sequence with three collinear points equal to the
//! coverage of a frame, which is what the histogram here demonstrates: under
//! the full group stream, every Frame and every T_i sequence is covered
//! exactly |group|/24 times, so the fraction of 4-sequences with that exact
//! coverage exceeds q/(q+1).

use crate::error::{Error, Result};
use crate::grp::{orbit_asc_stab, pgl_order, Labeling, PglStream, DEFAULT_ORBIT_GUARD};
use crate::projgeom::Geometry;
use crate::psca::{rank_space_size, seq_unrank, tally_row};
use crate::singer::{labeling_from_singer, DifferenceSet, SingerLabeling};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, HashSet};

/// Default cap on the group order streamed by the coverage histogram.
pub const DEFAULT_GROUP_GUARD: u64 = 1_000_000_000;

/// The lines of a labeled plane, each sorted ascending, with a pair-to-line
/// index for classification.
#[derive(Clone, Debug)]
pub struct LabeledLineSet {
    r: usize,
    q: usize,
    lines: Vec<Vec<u32>>,
    /// pair_line[a * r + b] = index of the line through labels a and b.
    pair_line: Vec<u32>,
}

impl LabeledLineSet {
    /// Validates and indexes a lineset: r = q^2 + q + 1 lines of q + 1
    /// labels each, every pair of labels on exactly one line.
    pub fn new(lines: Vec<Vec<u64>>) -> Result<Self> {
        let Some(first) = lines.first() else {
            return Err(Error::InvalidLineset {
                reason: "no lines".into(),
            });
        };
        if first.len() < 2 {
            return Err(Error::InvalidLineset {
                reason: "lines must have at least two labels".into(),
            });
        }
        let q = first.len() - 1;
        let r = q * q + q + 1;
        if lines.len() != r {
            return Err(Error::InvalidLineset {
                reason: format!("{} lines, expected {r}", lines.len()),
            });
        }
        let mut sorted: Vec<Vec<u32>> = Vec::with_capacity(r);
        for line in &lines {
            if line.len() != q + 1 {
                return Err(Error::InvalidLineset {
                    reason: "lines have mixed sizes".into(),
                });
            }
            let mut l: Vec<u32> = Vec::with_capacity(q + 1);
            for &x in line {
                if x >= r as u64 {
                    return Err(Error::InvalidLineset {
                        reason: format!("label {x} is out of range for r = {r}"),
                    });
                }
                l.push(x as u32);
            }
            l.sort_unstable();
            if l.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidLineset {
                    reason: "a line repeats a label".into(),
                });
            }
            sorted.push(l);
        }
        sorted.sort();
        let mut pair_line = vec![u32::MAX; r * r];
        for (id, line) in sorted.iter().enumerate() {
            for (i, &a) in line.iter().enumerate() {
                for &b in &line[i + 1..] {
                    let (a, b) = (a as usize, b as usize);
                    if pair_line[a * r + b] != u32::MAX {
                        return Err(Error::InvalidLineset {
                            reason: format!("labels {a} and {b} share two lines"),
                        });
                    }
                    pair_line[a * r + b] = id as u32;
                    pair_line[b * r + a] = id as u32;
                }
            }
        }
        if pair_line
            .iter()
            .enumerate()
            .any(|(k, &id)| id == u32::MAX && k / r != k % r)
        {
            return Err(Error::InvalidLineset {
                reason: "some label pair lies on no line".into(),
            });
        }
        Ok(LabeledLineSet {
            r,
            q,
            lines: sorted,
            pair_line,
        })
    }

    /// The lineset of a cyclic labeling: all difference-set translates.
    pub fn from_singer(s: &SingerLabeling) -> Result<Self> {
        Self::new(s.lineset())
    }

    /// The geometric lines pushed through an arbitrary labeling.
    pub fn from_geometry(g: &Geometry, lab: &Labeling) -> Result<Self> {
        let lines = g
            .lines()
            .iter()
            .map(|line| line.iter().map(|&p| lab.label_of(p) as u64).collect())
            .collect();
        Self::new(lines)
    }

    #[must_use]
    pub fn r(&self) -> usize {
        self.r
    }

    #[must_use]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Lines as sorted label vectors, in lexicographic order.
    #[must_use]
    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    /// Index of the unique line through two distinct labels.
    #[inline]
    #[must_use]
    pub fn line_through(&self, a: usize, b: usize) -> usize {
        self.pair_line[a * self.r + b] as usize
    }
}

/// The family of a 4-sequence of distinct labels: no three collinear
/// (Frame), exactly three collinear with the off-line point at position i
/// (Ti), or all four on one line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SequenceClass {
    Frame,
    T1,
    T2,
    T3,
    T4,
    Collinear4,
}

impl SequenceClass {
    /// The Ti class with the off-line point at 1-based position i.
    #[must_use]
    pub fn t(i: usize) -> Self {
        match i {
            1 => SequenceClass::T1,
            2 => SequenceClass::T2,
            3 => SequenceClass::T3,
            4 => SequenceClass::T4,
            _ => unreachable!("positions run 1..=4"),
        }
    }
}

/// Classifies a 4-sequence of distinct labels against a lineset. At most one
/// triple can be collinear (two collinear triples share a pair, hence a
/// line, forcing all four onto it), so the answer is unique.
pub fn classify(s: &[u32], lines: &LabeledLineSet) -> Result<SequenceClass> {
    if s.len() != 4 {
        return Err(Error::WrongSequenceLength {
            expected: 4,
            got: s.len(),
        });
    }
    let mut sorted = [s[0], s[1], s[2], s[3]];
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::RepeatedEntries);
    }
    let collinear3 = |a: u32, b: u32, c: u32| -> bool {
        lines.line_through(a as usize, b as usize) == lines.line_through(a as usize, c as usize)
    };
    let l01 = lines.line_through(s[0] as usize, s[1] as usize);
    if l01 == lines.line_through(s[0] as usize, s[2] as usize)
        && l01 == lines.line_through(s[0] as usize, s[3] as usize)
    {
        return Ok(SequenceClass::Collinear4);
    }
    for off in 0..4 {
        let rest: Vec<u32> = (0..4).filter(|&k| k != off).map(|k| s[k]).collect();
        if collinear3(rest[0], rest[1], rest[2]) {
            return Ok(SequenceClass::t(off + 1));
        }
    }
    Ok(SequenceClass::Frame)
}

/// First sequence (by rank) in a class, if the class is nonempty.
#[must_use]
pub fn class_representative(lines: &LabeledLineSet, class: SequenceClass) -> Option<Vec<u32>> {
    let r = lines.r();
    for rank in 0..rank_space_size(r, 4) {
        let s = seq_unrank(r, 4, rank);
        if classify(&s, lines).expect("ranked sequences are distinct") == class {
            return Some(s);
        }
    }
    None
}

/// Counts of each family among all 4-sequences of distinct labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassCensus {
    pub frame: u64,
    pub t: [u64; 4],
    pub collinear4: u64,
    pub total: u64,
}

/// The census closed forms for a plane of order q.
#[must_use]
pub fn expected_census(q: u64) -> ClassCensus {
    let r = q * q + q + 1;
    let q3 = q * q * q;
    let frame = r * q3 * (q + 1) * (q - 1) * (q - 1);
    let t_each = r * q3 * (q + 1) * (q - 1);
    let collinear4 = r * (q + 1) * q * (q - 1) * (q.saturating_sub(2));
    ClassCensus {
        frame,
        t: [t_each; 4],
        collinear4,
        total: r * (r - 1) * (r - 2) * (r - 3),
    }
}

/// The four ascent sums and their forced total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AscentSums {
    pub e1: i64,
    pub e2: i64,
    pub e3: i64,
    pub e4: i64,
    pub e5: i64,
}

impl AscentSums {
    /// True when e1 + e4 and e2 + e3 are each e5/2 (holds for every
    /// labeling).
    #[must_use]
    pub fn halves_hold(&self) -> bool {
        2 * (self.e1 + self.e4) == self.e5 && 2 * (self.e2 + self.e3) == self.e5
    }

    /// True when all four sums are e5/4 (holds for translate linesets).
    #[must_use]
    pub fn quarters_hold(&self) -> bool {
        [self.e2, self.e3, self.e4].iter().all(|&e| e == self.e1) && 4 * self.e1 == self.e5
    }

    /// The sum counting ascending sequences whose off-line point sits at the
    /// given 1-based position.
    #[must_use]
    pub fn by_position(&self, i: usize) -> i64 {
        [self.e4, self.e3, self.e2, self.e1][i - 1]
    }
}

/// Evaluates the ascent sums over a lineset, computing e2 and e3 both from
/// the defining double sums and from their collapsed single-sum forms; any
/// disagreement, or a total different from the closed form e5, is an
/// internal error.
pub fn ascent_sums(lines: &LabeledLineSet) -> Result<AscentSums> {
    let q = lines.q() as i64;
    let mut e1 = 0i64;
    let mut e2_raw = 0i64;
    let mut e2_collapsed = 0i64;
    let mut e3_raw = 0i64;
    let mut e3_collapsed = 0i64;
    let mut e4 = 0i64;
    let choose2 = |n: i64| n * (n - 1) / 2;
    let mut b = vec![0i64; lines.q() + 1];
    for line in lines.lines() {
        for (i, &l) in line.iter().enumerate() {
            b[i] = i64::from(l) - i as i64;
        }
        for i in 0..=q {
            let bi = b[i as usize];
            e1 += choose2(q - i) * bi;
            e4 += choose2(i) * (q * q - bi);
            e2_collapsed += (i * (q - i) - choose2(q - i)) * bi;
            e3_collapsed += (choose2(i) - i * (q - i)) * bi;
            for j in (i + 1)..=q {
                let d = b[j as usize] - bi;
                e2_raw += (q - j) * d;
                e3_raw += i * d;
            }
        }
    }
    if e2_raw != e2_collapsed || e3_raw != e3_collapsed {
        return Err(Error::Internal(format!(
            "ascent sum forms disagree: e2 {e2_raw} vs {e2_collapsed}, e3 {e3_raw} vs {e3_collapsed}"
        )));
    }
    let r = lines.r() as i64;
    let e5_num = r * q * q * q * (q + 1) * (q - 1);
    if e5_num % 6 != 0 {
        return Err(Error::Internal("ascent total is not divisible by 6".into()));
    }
    let e5 = e5_num / 6;
    if e1 + e2_raw + e3_raw + e4 != e5 {
        return Err(Error::Internal(format!(
            "ascent sums total {} instead of {e5}",
            e1 + e2_raw + e3_raw + e4
        )));
    }
    Ok(AscentSums {
        e1,
        e2: e2_raw,
        e3: e3_raw,
        e4,
        e5,
    })
}

/// Evaluates the weighted line sum and its labeling-independent closed form
/// (q^2 + q)(q^2 + q + 1)(2q^2 + 2q + 1)/6; they agree for every bijective
/// labeling.
#[must_use]
pub fn linesum_check(lines: &LabeledLineSet) -> (u64, u64, bool) {
    let computed: u64 = lines
        .lines()
        .iter()
        .map(|line| {
            line.iter()
                .enumerate()
                .map(|(i, &l)| i as u64 * u64::from(l))
                .sum::<u64>()
        })
        .sum();
    let q = lines.q() as u64;
    let s = q * q + q;
    let closed = s * (s + 1) * (2 * s + 1) / 6;
    (computed, closed, computed == closed)
}

/// Checks the difference-set autocorrelation identity at shift i: summing
/// over one period of the cyclically indexed set, the products of the
/// i-step gap with the preceding 1-step gap match the products of the
/// 1-step gap with the trailing i-step gap. Differences of wrapped entries
/// are lifted into [0, r).
pub fn diffset_identity_check(d: &DifferenceSet, i: u64) -> Result<bool> {
    let q = d.q();
    if i > q {
        return Err(Error::ValueOutOfRange { value: i, q: q + 1 });
    }
    let r = d.r() as i64;
    let lift = |x: i64| x.rem_euclid(r);
    let a = |k: i64| d.cyclic_index(k) as i64;
    let i = i as i64;
    let mut lhs = 0i64;
    let mut rhs = 0i64;
    for k in 0..=q as i64 {
        lhs += lift(a(k + i) - a(k)) * lift(a(k) - a(k - 1));
        rhs += lift(a(k + 1) - a(k)) * lift(a(k) - a(k - i));
    }
    Ok(lhs == rhs)
}

/// Checks the flip identity at index i over a translate lineset: the sum of
/// q^2 + q - l_{q-i} equals the sum of l_i. Linesets that are not the
/// translate closure of one of their lines are rejected, since the identity
/// is about cyclic structure.
pub fn lineflip_check(lines: &LabeledLineSet, i: usize) -> Result<bool> {
    let q = lines.q();
    if i > q {
        return Err(Error::ValueOutOfRange {
            value: i as u64,
            q: q as u64 + 1,
        });
    }
    let r = lines.r() as u64;
    let base = &lines.lines()[0];
    let translates: HashSet<Vec<u32>> = (0..r)
        .map(|j| {
            let mut t: Vec<u32> = base
                .iter()
                .map(|&x| ((u64::from(x) + j) % r) as u32)
                .collect();
            t.sort_unstable();
            t
        })
        .collect();
    if translates.len() != lines.lines().len()
        || !lines.lines().iter().all(|l| translates.contains(l))
    {
        return Err(Error::NotTranslateLineset);
    }
    let mut lhs = 0u64;
    let mut rhs = 0u64;
    for line in lines.lines() {
        lhs += (q * q + q) as u64 - u64::from(line[q - i]);
        rhs += u64::from(line[i]);
    }
    Ok(lhs == rhs)
}

/// True when the ascent-sum prediction for a class matches a direct orbit
/// walk from a representative: the group is transitive on each Ti and on
/// frames, so the class's ascending-member count is the orbit's.
pub fn asc_equals_orbit_count(
    g: &Geometry,
    singer: &SingerLabeling,
    class: SequenceClass,
) -> Result<bool> {
    let lines = LabeledLineSet::from_singer(singer)?;
    let predicted = match class {
        SequenceClass::Frame => {
            let census = expected_census(singer.q());
            (census.frame / 24) as i64
        }
        SequenceClass::T1 => ascent_sums(&lines)?.by_position(1),
        SequenceClass::T2 => ascent_sums(&lines)?.by_position(2),
        SequenceClass::T3 => ascent_sums(&lines)?.by_position(3),
        SequenceClass::T4 => ascent_sums(&lines)?.by_position(4),
        SequenceClass::Collinear4 => {
            return Err(Error::Internal(
                "collinear sequences split into several orbits; no single ascent sum applies"
                    .into(),
            ))
        }
    };
    let rep = class_representative(&lines, class)
        .ok_or_else(|| Error::Internal("requested class is empty for this plane order".into()))?;
    let rep: Vec<usize> = rep.iter().map(|&x| x as usize).collect();
    let counts = orbit_asc_stab(g, singer.labeling(), &rep, DEFAULT_ORBIT_GUARD)?;
    Ok(counts.asc_size as i64 == predicted)
}

/// Everything the coverage run over a full group stream establishes.
#[derive(Clone, Debug)]
pub struct Thm2Report {
    pub q: u64,
    /// Group order = number of streamed rows.
    pub rows: u64,
    /// rows / 4!, the coverage every Frame and Ti sequence receives.
    pub lambda_star: u64,
    pub sums: AscentSums,
    pub census: ClassCensus,
    /// coverage count -> number of 4-sequences with that count.
    pub histogram: BTreeMap<u64, u64>,
    /// Number of sequences covered exactly lambda_star times.
    pub perfect_count: u64,
    pub total_sequences: u64,
}

impl Thm2Report {
    /// Fraction of 4-sequences at exactly lambda_star, as a float for
    /// display; comparisons against bounds are done exactly.
    #[must_use]
    pub fn perfect_fraction(&self) -> f64 {
        self.perfect_count as f64 / self.total_sequences as f64
    }

    /// Exact test of perfect_count / total > q / (q + 1).
    #[must_use]
    pub fn exceeds_strict_bound(&self) -> bool {
        u128::from(self.perfect_count) * u128::from(self.q + 1)
            > u128::from(self.q) * u128::from(self.total_sequences)
    }

    /// Exact test of perfect_count / total > 1 - 1/q.
    #[must_use]
    pub fn exceeds_weak_bound(&self) -> bool {
        u128::from(self.perfect_count) * u128::from(self.q)
            > u128::from(self.q - 1) * u128::from(self.total_sequences)
    }

    /// Serializable dump; integers beyond 2^53 are emitted as strings so
    /// consumers reading doubles cannot silently lose precision.
    #[must_use]
    pub fn to_json(&self) -> Value {
        let mut histogram = Map::new();
        for (&count, &mult) in &self.histogram {
            histogram.insert(count.to_string(), json_int(mult));
        }
        json!({
            "q": self.q,
            "rows": json_int(self.rows),
            "lambda_star": json_int(self.lambda_star),
            "e": [self.sums.e1, self.sums.e2, self.sums.e3, self.sums.e4],
            "e5": self.sums.e5,
            "census": {
                "frame": json_int(self.census.frame),
                "t1": json_int(self.census.t[0]),
                "t2": json_int(self.census.t[1]),
                "t3": json_int(self.census.t[2]),
                "t4": json_int(self.census.t[3]),
                "collinear4": json_int(self.census.collinear4),
                "total": json_int(self.census.total),
            },
            "histogram": Value::Object(histogram),
            "perfect_count": json_int(self.perfect_count),
            "perfect_fraction": self.perfect_fraction(),
            "bound": self.q as f64 / (self.q + 1) as f64,
        })
    }
}

fn json_int(x: u64) -> Value {
    if x <= (1u64 << 53) {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// Streams the whole group over the cyclically labeled plane of order q and
/// tallies the coverage of every 4-sequence of labels. Verifies on the way
/// out that the class census matches the closed forms, that every Frame and
/// Ti sequence is covered exactly rows/24 times, and that the tally total is
/// consistent; any failure is an internal error, since these facts hold for
/// every prime power order and cannot be caused by the caller.
pub fn coverage_histogram_thm2(q: u64, group_guard: u64) -> Result<Thm2Report> {
    let order = pgl_order(2, q);
    if order > BigUint::from(group_guard) {
        return Err(Error::GuardExceeded {
            what: "group order",
            limit: group_guard,
            actual: u64::try_from(order).unwrap_or(u64::MAX),
        });
    }
    let rows = u64::try_from(order).expect("guarded order fits");
    let g = Geometry::new(2, q)?;
    let singer = labeling_from_singer(&g)?;
    let lines = LabeledLineSet::from_singer(&singer)?;
    let sums = ascent_sums(&lines)?;
    let r = g.num_points();
    let space_u64 = rank_space_size(r, 4);
    if space_u64 > crate::psca::MAX_RANK_SPACE {
        return Err(Error::GuardExceeded {
            what: "coverage rank space",
            limit: crate::psca::MAX_RANK_SPACE,
            actual: space_u64,
        });
    }
    let space = space_u64 as usize;

    let stream = PglStream::new(&g);
    let counts = stream.par_fold_matrices(
        || (vec![0u32; space], vec![0u32; r]),
        |(counts, row), m| {
            m.fill_row(&g, singer.labeling(), row);
            tally_row(counts, row, r, 4);
        },
        |(mut a, row), (b, _)| {
            for (x, y) in a.iter_mut().zip(&b) {
                *x += y;
            }
            (a, row)
        },
    );
    let counts = counts.0;

    let lambda_star = rows / 24;
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    let mut census = ClassCensus {
        frame: 0,
        t: [0; 4],
        collinear4: 0,
        total: 0,
    };
    let mut tally_total = 0u64;
    for (rank, &c) in counts.iter().enumerate() {
        let c = u64::from(c);
        tally_total += c;
        *histogram.entry(c).or_insert(0) += 1;
        let s = seq_unrank(r, 4, rank as u64);
        let class = classify(&s, &lines)?;
        census.total += 1;
        match class {
            SequenceClass::Frame => census.frame += 1,
            SequenceClass::T1 => census.t[0] += 1,
            SequenceClass::T2 => census.t[1] += 1,
            SequenceClass::T3 => census.t[2] += 1,
            SequenceClass::T4 => census.t[3] += 1,
            SequenceClass::Collinear4 => census.collinear4 += 1,
        }
        if !matches!(class, SequenceClass::Collinear4) && c != lambda_star {
            return Err(Error::Internal(format!(
                "{class:?} sequence {s:?} covered {c} times, expected {lambda_star}"
            )));
        }
    }
    // Each row covers exactly C(r, 4) position subsets.
    let subsets = (r as u64) * (r as u64 - 1) * (r as u64 - 2) * (r as u64 - 3) / 24;
    if tally_total != rows * subsets {
        return Err(Error::Internal(format!(
            "tally total {tally_total} is not rows * C(r,4) = {}",
            rows * subsets
        )));
    }
    if census != expected_census(q) {
        return Err(Error::Internal(format!(
            "census {census:?} does not match the closed forms"
        )));
    }
    let perfect_count = histogram.get(&lambda_star).copied().unwrap_or(0);
    Ok(Thm2Report {
        q,
        rows,
        lambda_star,
        sums,
        census,
        histogram,
        perfect_count,
        total_sequences: census.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singer::singer_difference_set;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn singer_lines(q: u64) -> LabeledLineSet {
        let g = Geometry::new(2, q).unwrap();
        let s = labeling_from_singer(&g).unwrap();
        LabeledLineSet::from_singer(&s).unwrap()
    }

    fn shuffled_lines(q: u64, seed: u64) -> LabeledLineSet {
        let g = Geometry::new(2, q).unwrap();
        let mut labels: Vec<usize> = (0..g.num_points()).collect();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        labels.shuffle(&mut rng);
        let lab = Labeling::new(labels).unwrap();
        LabeledLineSet::from_geometry(&g, &lab).unwrap()
    }

    #[test]
    fn lineset_validation_catches_defects() {
        // Too few lines.
        assert!(matches!(
            LabeledLineSet::new(vec![vec![0, 1, 2]]),
            Err(Error::InvalidLineset { .. })
        ));
        // A pair on two lines.
        let d = singer_difference_set(2).unwrap();
        let mut lines = d.lineset();
        lines[1] = lines[0].clone();
        assert!(matches!(
            LabeledLineSet::new(lines),
            Err(Error::InvalidLineset { .. })
        ));
    }

    #[test]
    fn classification_matches_definitions() {
        let lines = singer_lines(3);
        // All four on the line D + 0 = {0, 1, 3, 9}.
        assert_eq!(
            classify(&[0, 1, 3, 9], &lines).unwrap(),
            SequenceClass::Collinear4
        );
        // Three of those plus an off point, at each position.
        let off = (0..13u32)
            .find(|&x| !lines.lines()[lines.line_through(0, 1)].contains(&x))
            .unwrap();
        assert_eq!(
            classify(&[off, 0, 1, 3], &lines).unwrap(),
            SequenceClass::T1
        );
        assert_eq!(
            classify(&[0, off, 1, 3], &lines).unwrap(),
            SequenceClass::T2
        );
        assert_eq!(
            classify(&[0, 1, off, 3], &lines).unwrap(),
            SequenceClass::T3
        );
        assert_eq!(
            classify(&[0, 1, 3, off], &lines).unwrap(),
            SequenceClass::T4
        );
        assert!(matches!(
            classify(&[0, 0, 1, 2], &lines),
            Err(Error::RepeatedEntries)
        ));
    }

    #[test]
    fn census_matches_closed_forms_by_brute_force() {
        for q in [2u64, 3] {
            let lines = singer_lines(q);
            let r = lines.r();
            let mut census = ClassCensus {
                frame: 0,
                t: [0; 4],
                collinear4: 0,
                total: 0,
            };
            for rank in 0..rank_space_size(r, 4) {
                let s = seq_unrank(r, 4, rank);
                census.total += 1;
                match classify(&s, &lines).unwrap() {
                    SequenceClass::Frame => census.frame += 1,
                    SequenceClass::T1 => census.t[0] += 1,
                    SequenceClass::T2 => census.t[1] += 1,
                    SequenceClass::T3 => census.t[2] += 1,
                    SequenceClass::T4 => census.t[3] += 1,
                    SequenceClass::Collinear4 => census.collinear4 += 1,
                }
            }
            assert_eq!(census, expected_census(q), "q = {q}");
        }
        // Spot values for q = 3.
        let c = expected_census(3);
        assert_eq!(c.frame, 5616);
        assert_eq!(c.t, [2808; 4]);
        assert_eq!(c.collinear4, 312);
        assert_eq!(c.total, 17160);
    }

    #[test]
    fn singer_sums_split_into_equal_quarters() {
        let sums2 = ascent_sums(&singer_lines(2)).unwrap();
        assert_eq!(
            (sums2.e1, sums2.e2, sums2.e3, sums2.e4, sums2.e5),
            (7, 7, 7, 7, 28)
        );
        assert!(sums2.quarters_hold());

        let sums3 = ascent_sums(&singer_lines(3)).unwrap();
        assert_eq!(
            (sums3.e1, sums3.e2, sums3.e3, sums3.e4, sums3.e5),
            (117, 117, 117, 117, 468)
        );

        for q in [4u64, 5, 7, 8, 9] {
            let sums = ascent_sums(&singer_lines(q)).unwrap();
            assert!(sums.quarters_hold(), "q = {q}: {sums:?}");
        }
    }

    #[test]
    fn arbitrary_labelings_split_into_equal_halves() {
        for seed in 0..8 {
            let sums = ascent_sums(&shuffled_lines(3, seed)).unwrap();
            assert!(sums.halves_hold(), "seed {seed}: {sums:?}");
            assert_eq!(sums.e1 + sums.e4, 234);
        }
        for seed in 0..3 {
            let sums = ascent_sums(&shuffled_lines(4, seed)).unwrap();
            assert!(sums.halves_hold(), "seed {seed}: {sums:?}");
        }
    }

    #[test]
    fn linesums_match_the_closed_form_for_any_labeling() {
        let (c2, f2, ok2) = linesum_check(&singer_lines(2));
        assert!(ok2);
        assert_eq!((c2, f2), (91, 91));
        let (c3, f3, ok3) = linesum_check(&singer_lines(3));
        assert!(ok3);
        assert_eq!((c3, f3), (650, 650));
        for seed in 0..5 {
            let (_, _, ok) = linesum_check(&shuffled_lines(4, seed));
            assert!(ok, "seed {seed}");
        }
    }

    #[test]
    fn diffset_identity_holds_at_every_shift() {
        for q in [2u64, 3, 4, 5] {
            let d = singer_difference_set(q).unwrap();
            for i in 0..=q {
                assert!(diffset_identity_check(&d, i).unwrap(), "q = {q}, shift {i}");
            }
        }
        let d = singer_difference_set(3).unwrap();
        assert!(matches!(
            diffset_identity_check(&d, 4),
            Err(Error::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn lineflips_hold_for_translate_linesets_only() {
        for q in [2u64, 3] {
            let lines = singer_lines(q);
            for i in 0..=q as usize {
                assert!(lineflip_check(&lines, i).unwrap(), "q = {q}, i = {i}");
            }
        }
        // A shuffled geometric labeling is (essentially never) cyclic.
        let lines = shuffled_lines(3, 11);
        assert!(matches!(
            lineflip_check(&lines, 0),
            Err(Error::NotTranslateLineset)
        ));
    }

    #[test]
    fn ascent_sums_predict_orbit_walks() {
        let g2 = Geometry::new(2, 2).unwrap();
        let s2 = labeling_from_singer(&g2).unwrap();
        assert!(asc_equals_orbit_count(&g2, &s2, SequenceClass::T1).unwrap());

        let g3 = Geometry::new(2, 3).unwrap();
        let s3 = labeling_from_singer(&g3).unwrap();
        for class in [
            SequenceClass::Frame,
            SequenceClass::T1,
            SequenceClass::T2,
            SequenceClass::T3,
            SequenceClass::T4,
        ] {
            assert!(
                asc_equals_orbit_count(&g3, &s3, class).unwrap(),
                "{class:?}"
            );
        }
        assert!(asc_equals_orbit_count(&g3, &s3, SequenceClass::Collinear4).is_err());
    }

    #[test]
    fn fano_coverage_is_perfect_everywhere() {
        let report = coverage_histogram_thm2(2, DEFAULT_GROUP_GUARD).unwrap();
        assert_eq!(report.rows, 168);
        assert_eq!(report.lambda_star, 7);
        assert_eq!(report.census.collinear4, 0, "no 4-point lines at q = 2");
        assert_eq!(report.histogram, BTreeMap::from([(7, 840)]));
        assert_eq!(report.perfect_count, 840);
        assert!(report.exceeds_strict_bound());
        assert!(report.exceeds_weak_bound());
        assert!((report.perfect_fraction() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fano_histogram_agrees_with_orbit_coverage() {
        let g = Geometry::new(2, 2).unwrap();
        let singer = labeling_from_singer(&g).unwrap();
        let report = coverage_histogram_thm2(2, DEFAULT_GROUP_GUARD).unwrap();
        // Every sequence's orbit-derived coverage lands in the histogram
        // with the right multiplicity; at q = 2 all are lambda_star.
        for rank in 0..rank_space_size(7, 4) {
            let s = seq_unrank(7, 4, rank);
            let labels: Vec<usize> = s.iter().map(|&x| x as usize).collect();
            let counts =
                orbit_asc_stab(&g, singer.labeling(), &labels, DEFAULT_ORBIT_GUARD).unwrap();
            assert_eq!(counts.coverage(), report.lambda_star, "rank {rank}");
        }
    }

    #[test]
    fn order_three_coverage_matches_the_almost_perfect_census() {
        let report = coverage_histogram_thm2(3, DEFAULT_GROUP_GUARD).unwrap();
        assert_eq!(report.rows, 5616);
        assert_eq!(report.lambda_star, 234);
        assert_eq!(report.census, expected_census(3));
        // All frames and Ti sequences sit at 234; only collinear
        // sequences may deviate.
        let deviants: u64 = report
            .histogram
            .iter()
            .filter(|&(&c, _)| c != 234)
            .map(|(_, &m)| m)
            .sum();
        assert!(deviants <= report.census.collinear4);
        assert!(report.perfect_count >= 16848);
        assert!(report.exceeds_strict_bound());
        assert!(report.exceeds_weak_bound());
    }

    #[test]
    fn group_guard_stops_large_orders() {
        assert!(matches!(
            coverage_histogram_thm2(5, 100_000),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn json_dump_has_the_documented_shape() {
        let report = coverage_histogram_thm2(2, DEFAULT_GROUP_GUARD).unwrap();
        let v = report.to_json();
        assert_eq!(v["q"], 2);
        assert_eq!(v["e"], serde_json::json!([7, 7, 7, 7]));
        assert_eq!(v["e5"], 28);
        assert_eq!(v["census"]["frame"], 168);
        assert_eq!(v["histogram"]["7"], 840);
        assert_eq!(v["perfect_fraction"], 1.0);
        let bound = v["bound"].as_f64().unwrap();
        assert!((bound - 2.0 / 3.0).abs() < 1e-12);
    }
}
