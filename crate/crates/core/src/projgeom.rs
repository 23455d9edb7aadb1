//! The projective space PG(n, q): points, lines, ranks, frames and arcs.
//!
//! Points are the 1-dimensional subspaces of GF(q)^(n+1). Each is stored by
//! its canonical representative, the vector whose first nonzero coordinate
//! (scanning left to right) equals 1. Points are enumerated in lexicographic
//! order of their representatives, where coordinates compare by the
//! discrete-log order on field elements (zero first, then generator powers).
//! Point indices into that enumeration are the currency the rest of the
//! crate trades in.
//!
//! A [`Geometry`] also carries flat lookup tables for field arithmetic on
//! value encodings and a table mapping any nonzero coordinate vector to the
//! index of its normalization, so applying matrices to points in the hot
//! group-streaming loops never touches polynomial arithmetic.

use crate::error::{Error, Result};
use crate::gf::{factor_prime_power, FieldSpec};
use serde::Serialize;

/// Index of a point in the canonical enumeration of PG(n, q).
pub type PointIndex = usize;

/// Largest supported n + 1 (matrix and coordinate-vector side length).
pub const MAX_DIM: usize = 16;

/// Largest supported q^(n+1), which bounds the vector-normalization table.
pub const MAX_VECTOR_TABLE: u64 = 1 << 24;

/// Fixed-capacity coordinate vector; entries are field value encodings and
/// only the first `dim` lanes of a given geometry are meaningful.
pub type CoordVec = [u16; MAX_DIM];

const NO_POINT: u32 = u32::MAX;

/// PG(n, q) with its canonical point enumeration, line list, and the lookup
/// tables used by matrix application.
pub struct Geometry {
    field: FieldSpec,
    n: usize,
    dim: usize,
    q: usize,
    r: usize,
    points: Vec<CoordVec>,
    /// Encoded nonzero vector -> index of its normalization.
    vec_to_point: Vec<u32>,
    /// Sorted point indices of every line (2-dimensional subspace); empty
    /// for n = 1 where the only line is the whole space.
    lines: Vec<Vec<PointIndex>>,
    add_tab: Vec<u16>,
    mul_tab: Vec<u16>,
    neg_tab: Vec<u16>,
    inv_tab: Vec<u16>,
}

impl Geometry {
    /// Builds PG(n, q) for n >= 1 and q a prime power.
    pub fn new(n: usize, q: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension(n));
        }
        let (p, m) = factor_prime_power(q)?;
        let field = FieldSpec::new(p, m)?;
        let dim = n + 1;
        if dim > MAX_DIM {
            return Err(Error::GuardExceeded {
                what: "projective dimension n+1",
                limit: MAX_DIM as u64,
                actual: dim as u64,
            });
        }
        let table_size = (0..dim).try_fold(1u64, |acc, _| {
            acc.checked_mul(q).filter(|&x| x <= MAX_VECTOR_TABLE)
        });
        let Some(table_size) = table_size else {
            return Err(Error::GuardExceeded {
                what: "vector table q^(n+1)",
                limit: MAX_VECTOR_TABLE,
                actual: u64::MAX,
            });
        };

        let qu = q as usize;
        let values = field.values_in_order();

        // Enumerate canonical representatives in lexicographic order of
        // their coordinate tuples under the field's element order.
        let mut points: Vec<CoordVec> = Vec::new();
        let mut keys = vec![0usize; dim];
        loop {
            let mut vec: CoordVec = [0; MAX_DIM];
            for (i, &k) in keys.iter().enumerate() {
                vec[i] = values[k] as u16;
            }
            if let Some(first) = vec[..dim].iter().position(|&c| c != 0) {
                if vec[first] == 1 {
                    points.push(vec);
                }
            }
            // Advance the key odometer; most-significant lane is keys[0].
            let mut lane = dim;
            loop {
                if lane == 0 {
                    break;
                }
                lane -= 1;
                keys[lane] += 1;
                if keys[lane] < qu {
                    break;
                }
                keys[lane] = 0;
            }
            if keys.iter().all(|&k| k == 0) {
                break;
            }
        }

        let r = points.len();
        let expected_r = ((table_size - 1) / (q - 1)) as usize;
        if r != expected_r {
            return Err(Error::Internal(format!(
                "PG({n}, {q}) enumerated {r} points, expected {expected_r}"
            )));
        }

        // Field value tables.
        let mut add_tab = vec![0u16; qu * qu];
        let mut mul_tab = vec![0u16; qu * qu];
        let mut neg_tab = vec![0u16; qu];
        let mut inv_tab = vec![0u16; qu];
        for a in 0..qu as u64 {
            neg_tab[a as usize] = field.neg_value(a) as u16;
            if a != 0 {
                inv_tab[a as usize] = field.inv_value(a).expect("nonzero") as u16;
            }
            for b in 0..qu as u64 {
                add_tab[a as usize * qu + b as usize] = field.add_values(a, b) as u16;
                mul_tab[a as usize * qu + b as usize] = field.mul_values(a, b) as u16;
            }
        }

        let mut geom = Geometry {
            field,
            n,
            dim,
            q: qu,
            r,
            points,
            vec_to_point: vec![NO_POINT; table_size as usize],
            lines: Vec::new(),
            add_tab,
            mul_tab,
            neg_tab,
            inv_tab,
        };

        // Every nonzero vector maps to the index of its projective class.
        for idx in 0..r {
            let rep = geom.points[idx];
            for c in 1..qu as u16 {
                let mut w: CoordVec = [0; MAX_DIM];
                for i in 0..dim {
                    w[i] = geom.mulv(c, rep[i]);
                }
                let enc = geom.vector_enc(&w[..dim]);
                geom.vec_to_point[enc] = idx as u32;
            }
        }

        if n >= 2 {
            geom.lines = geom.enumerate_lines();
        }
        Ok(geom)
    }

    /// Projective dimension n.
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Vector-space dimension n + 1.
    #[must_use]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Field order q.
    #[must_use]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of points (q^(n+1) - 1) / (q - 1).
    #[must_use]
    pub fn num_points(&self) -> usize {
        self.r
    }

    /// The underlying field.
    #[must_use]
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Canonical representative of a point (first nonzero coordinate is 1).
    #[must_use]
    pub fn coords(&self, idx: PointIndex) -> &[u16] {
        &self.points[idx][..self.dim]
    }

    /// All lines as sorted point-index vectors (empty for n = 1).
    #[must_use]
    pub fn lines(&self) -> &[Vec<PointIndex>] {
        &self.lines
    }

    // --- value arithmetic on the geometry's field --------------------------

    /// Field addition on value encodings.
    #[inline]
    #[must_use]
    pub fn addv(&self, a: u16, b: u16) -> u16 {
        self.add_tab[a as usize * self.q + b as usize]
    }

    /// Field multiplication on value encodings.
    #[inline]
    #[must_use]
    pub fn mulv(&self, a: u16, b: u16) -> u16 {
        self.mul_tab[a as usize * self.q + b as usize]
    }

    /// Field negation on value encodings.
    #[inline]
    #[must_use]
    pub fn negv(&self, a: u16) -> u16 {
        self.neg_tab[a as usize]
    }

    /// Field inversion on value encodings; the zero lane holds 0 and must
    /// not be consulted.
    #[inline]
    #[must_use]
    pub fn invv(&self, a: u16) -> u16 {
        debug_assert_ne!(a, 0, "inverse of zero");
        self.inv_tab[a as usize]
    }

    /// Big-endian base-q encoding of a coordinate vector.
    #[inline]
    #[must_use]
    pub fn vector_enc(&self, coords: &[u16]) -> usize {
        let mut enc = 0usize;
        for &c in coords {
            enc = enc * self.q + c as usize;
        }
        enc
    }

    /// Point index of the projective class of an encoded nonzero vector.
    #[inline]
    #[must_use]
    pub fn point_of_enc(&self, enc: usize) -> PointIndex {
        let idx = self.vec_to_point[enc];
        debug_assert_ne!(idx, NO_POINT, "zero vector has no projective class");
        idx as usize
    }

    /// Point index of the projective class of a nonzero coordinate vector.
    pub fn point_of_vector(&self, coords: &[u16]) -> Result<PointIndex> {
        if coords.len() != self.dim {
            return Err(Error::WrongSequenceLength {
                expected: self.dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|&c| c as usize >= self.q) {
            return Err(Error::ValueOutOfRange {
                value: *coords.iter().find(|&&c| c as usize >= self.q).unwrap() as u64,
                q: self.q as u64,
            });
        }
        let enc = self.vector_enc(coords);
        let idx = self.vec_to_point[enc];
        if idx == NO_POINT {
            return Err(Error::Internal(
                "zero vector has no projective class".into(),
            ));
        }
        Ok(idx as usize)
    }

    fn check_points(&self, pts: &[PointIndex]) -> Result<()> {
        for &p in pts {
            if p >= self.r {
                return Err(Error::InvalidPointIndex {
                    index: p,
                    r: self.r,
                });
            }
        }
        Ok(())
    }

    /// Rank of the set of representative vectors, by Gaussian elimination.
    pub fn rank_of(&self, pts: &[PointIndex]) -> Result<usize> {
        self.check_points(pts)?;
        let mut rows: Vec<CoordVec> = pts.iter().map(|&p| self.points[p]).collect();
        Ok(self.rank_in_place(&mut rows))
    }

    #[allow(clippy::needless_range_loop)]
    fn rank_in_place(&self, rows: &mut [CoordVec]) -> usize {
        let mut rank = 0;
        for col in 0..self.dim {
            let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = self.invv(rows[rank][col]);
            for i in (rank + 1)..rows.len() {
                if rows[i][col] == 0 {
                    continue;
                }
                let factor = self.negv(self.mulv(rows[i][col], inv));
                for c in col..self.dim {
                    let t = self.mulv(factor, rows[rank][c]);
                    rows[i][c] = self.addv(rows[i][c], t);
                }
            }
            rank += 1;
            if rank == self.dim {
                break;
            }
        }
        rank
    }

    /// True when the n + 2 points form a frame: every n + 1 of them span.
    pub fn is_frame(&self, pts: &[PointIndex]) -> Result<bool> {
        if pts.len() != self.n + 2 {
            return Err(Error::WrongSequenceLength {
                expected: self.n + 2,
                got: pts.len(),
            });
        }
        self.check_points(pts)?;
        let mut subset: Vec<PointIndex> = Vec::with_capacity(self.n + 1);
        for omit in 0..pts.len() {
            subset.clear();
            subset.extend(
                pts.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != omit)
                    .map(|(_, &p)| p),
            );
            if self.rank_of(&subset)? != self.dim {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when no n + 1 of the points lie in a hyperplane. Sets smaller
    /// than n + 1 qualify exactly when their representatives are independent.
    pub fn is_arc(&self, pts: &[PointIndex]) -> Result<bool> {
        self.check_points(pts)?;
        let k = pts.len().min(self.dim);
        if k < pts.len() {
            // Check every (n+1)-subset for full rank.
            let mut subset = vec![0usize; k];
            return self.all_subsets_full_rank(pts, &mut subset, 0, 0);
        }
        Ok(self.rank_of(pts)? == pts.len())
    }

    fn all_subsets_full_rank(
        &self,
        pts: &[PointIndex],
        subset: &mut [PointIndex],
        depth: usize,
        start: usize,
    ) -> Result<bool> {
        if depth == subset.len() {
            return Ok(self.rank_of(subset)? == subset.len());
        }
        for i in start..pts.len() {
            subset[depth] = pts[i];
            if !self.all_subsets_full_rank(pts, subset, depth + 1, i + 1)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The rational normal curve arc: the q points (1, t, t^2, ..., t^n) for
    /// t in field order, followed by (0, ..., 0, 1). A (q+1)-arc for q >= n.
    pub fn rational_normal_curve_arc(&self) -> Result<Vec<PointIndex>> {
        if (self.q as u64) < self.n as u64 {
            return Err(Error::QTooSmallForArc {
                q: self.q as u64,
                n: self.n,
            });
        }
        let mut arc = Vec::with_capacity(self.q + 1);
        for &t in &self.field.values_in_order() {
            let t = t as u16;
            let mut v: CoordVec = [0; MAX_DIM];
            v[0] = 1;
            for i in 1..self.dim {
                v[i] = self.mulv(v[i - 1], t);
            }
            arc.push(self.point_of_enc(self.vector_enc(&v[..self.dim])));
        }
        let mut inf: CoordVec = [0; MAX_DIM];
        inf[self.dim - 1] = 1;
        arc.push(self.point_of_enc(self.vector_enc(&inf[..self.dim])));
        Ok(arc)
    }

    fn enumerate_lines(&self) -> Vec<Vec<PointIndex>> {
        let mut lines = Vec::new();
        let nonzero: Vec<u16> = (1..self.q as u16).collect();
        for i in 0..self.r {
            for j in (i + 1)..self.r {
                // Points of the line: [v_j], and [v_i + c v_j] for all c.
                let mut line = Vec::with_capacity(self.q + 1);
                line.push(i);
                line.push(j);
                let vi = self.points[i];
                let vj = self.points[j];
                for &c in &nonzero {
                    let mut w: CoordVec = [0; MAX_DIM];
                    for d in 0..self.dim {
                        w[d] = self.addv(vi[d], self.mulv(c, vj[d]));
                    }
                    line.push(self.point_of_enc(self.vector_enc(&w[..self.dim])));
                }
                line.sort_unstable();
                // Keep the line only at its lexicographically least pair, so
                // each line is produced exactly once.
                if line[0] == i && line[1] == j {
                    lines.push(line);
                }
            }
        }
        lines
    }

    /// Serializable dump of the geometry.
    #[must_use]
    pub fn to_json(&self) -> GeometryJson {
        let points = self
            .points
            .iter()
            .map(|p| {
                p[..self.dim]
                    .iter()
                    .map(|&c| {
                        if c == 0 {
                            -1
                        } else {
                            self.field.dlog_value(u64::from(c)).expect("nonzero") as i64
                        }
                    })
                    .collect()
            })
            .collect();
        GeometryJson {
            n: self.n,
            q: self.q as u64,
            points,
            lines: self.lines.clone(),
        }
    }
}

/// JSON form of a geometry: coordinates are discrete logs, with zero encoded
/// as -1; lines are sorted point-index vectors.
#[derive(Serialize)]
pub struct GeometryJson {
    pub n: usize,
    pub q: u64,
    pub points: Vec<Vec<i64>>,
    pub lines: Vec<Vec<PointIndex>>,
}
