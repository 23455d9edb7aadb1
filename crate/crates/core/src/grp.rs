//! The projective linear group PGL(n+1, q) as permutations of PG(n, q).
//!
//! Elements are enumerated by streaming canonical matrix representatives:
//! the invertible (n+1)x(n+1) matrices whose first nonzero entry in row-major
//! order equals 1. Every scalar class of invertible matrices contains exactly
//! one such representative, so the stream hits each group element once. The
//! enumeration never materializes the group: the first row ranges over the
//! canonical point representatives (in point-enumeration order) and each
//! later row ranges over all vectors outside the span of the rows above it,
//! tracked with a bitset over encoded vectors. Chunks that share a first row
//! are independent, which is what the parallel fold exploits.
//!
//! Point relabelings are [`Labeling`] bijections; a [`Projectivity`] is a
//! group element rendered in one-line notation on labels.

use crate::error::{Error, Result};
use crate::projgeom::{CoordVec, Geometry, PointIndex, MAX_DIM};
use num_bigint::BigUint;
use rayon::prelude::*;
use std::collections::HashSet;

/// Default cap on orbit walks, counted in stored sequence tuples.
pub const DEFAULT_ORBIT_GUARD: u64 = 100_000_000;

/// |PGL(n+1, q)| = prod_{i=0..n} (q^(n+1) - q^i) / (q - 1), exactly.
#[must_use]
pub fn pgl_order(n: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let dim = (n + 1) as u32;
    let q_dim = q.pow(dim);
    let mut order = BigUint::from(1u32);
    for i in 0..=n {
        order *= &q_dim - q.pow(i as u32);
    }
    order / (q - BigUint::from(1u32))
}

/// [`pgl_order`] when it fits in a u64.
#[must_use]
pub fn pgl_order_u64(n: usize, q: u64) -> Option<u64> {
    u64::try_from(pgl_order(n, q)).ok()
}

/// A square matrix over GF(q) acting on column vectors; entries are field
/// value encodings and rows beyond `dim` are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjMatrix {
    dim: usize,
    rows: [CoordVec; MAX_DIM],
}

impl ProjMatrix {
    /// The identity matrix of the geometry's dimension.
    #[must_use]
    pub fn identity(g: &Geometry) -> Self {
        let mut rows = [[0; MAX_DIM]; MAX_DIM];
        for (i, row) in rows.iter_mut().enumerate().take(g.dim()) {
            row[i] = 1;
        }
        ProjMatrix { dim: g.dim(), rows }
    }

    /// Builds a matrix from row slices of field values.
    pub fn from_rows(g: &Geometry, rows: &[&[u16]]) -> Result<Self> {
        let dim = g.dim();
        if rows.len() != dim {
            return Err(Error::WrongSequenceLength {
                expected: dim,
                got: rows.len(),
            });
        }
        let mut out = [[0; MAX_DIM]; MAX_DIM];
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::WrongSequenceLength {
                    expected: dim,
                    got: r.len(),
                });
            }
            for (j, &c) in r.iter().enumerate() {
                if c as usize >= g.q() {
                    return Err(Error::ValueOutOfRange {
                        value: u64::from(c),
                        q: g.q() as u64,
                    });
                }
                out[i][j] = c;
            }
        }
        Ok(ProjMatrix { dim, rows: out })
    }

    /// Side length n + 1.
    #[must_use]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row `i` as a slice of field values.
    #[must_use]
    pub fn row(&self, i: usize) -> &[u16] {
        &self.rows[i][..self.dim]
    }

    /// Entry at (row, col).
    #[must_use]
    pub fn entry(&self, i: usize, j: usize) -> u16 {
        self.rows[i][j]
    }

    /// Image of a point under the induced map on PG(n, q).
    #[inline]
    #[must_use]
    pub fn apply(&self, g: &Geometry, p: PointIndex) -> PointIndex {
        let v = g.coords(p);
        let q = g.q();
        let mut enc = 0usize;
        for i in 0..self.dim {
            let row = &self.rows[i];
            let mut acc = 0u16;
            for (j, &vj) in v.iter().enumerate() {
                acc = g.addv(acc, g.mulv(row[j], vj));
            }
            enc = enc * q + acc as usize;
        }
        g.point_of_enc(enc)
    }

    /// Matrix product self * other (apply other first, then self).
    #[must_use]
    #[allow(clippy::needless_range_loop)]
    pub fn matmul(&self, g: &Geometry, other: &ProjMatrix) -> ProjMatrix {
        let dim = self.dim;
        let mut rows = [[0; MAX_DIM]; MAX_DIM];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = 0u16;
                for k in 0..dim {
                    acc = g.addv(acc, g.mulv(self.rows[i][k], other.rows[k][j]));
                }
                rows[i][j] = acc;
            }
        }
        ProjMatrix { dim, rows }
    }

    /// Inverse by Gauss-Jordan elimination; errors on singular input.
    pub fn inverse(&self, g: &Geometry) -> Result<ProjMatrix> {
        let dim = self.dim;
        let mut a = self.rows;
        let mut inv = ProjMatrix::identity_rows(dim);
        for col in 0..dim {
            let Some(pivot) = (col..dim).find(|&i| a[i][col] != 0) else {
                return Err(Error::Internal("singular matrix has no inverse".into()));
            };
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let scale = g.invv(a[col][col]);
            for j in 0..dim {
                a[col][j] = g.mulv(a[col][j], scale);
                inv[col][j] = g.mulv(inv[col][j], scale);
            }
            for i in 0..dim {
                if i == col || a[i][col] == 0 {
                    continue;
                }
                let factor = g.negv(a[i][col]);
                for j in 0..dim {
                    a[i][j] = g.addv(a[i][j], g.mulv(factor, a[col][j]));
                    inv[i][j] = g.addv(inv[i][j], g.mulv(factor, inv[col][j]));
                }
            }
        }
        Ok(ProjMatrix { dim, rows: inv })
    }

    fn identity_rows(dim: usize) -> [CoordVec; MAX_DIM] {
        let mut rows = [[0; MAX_DIM]; MAX_DIM];
        for (i, row) in rows.iter_mut().enumerate().take(dim) {
            row[i] = 1;
        }
        rows
    }

    /// Writes the induced permutation in one-line notation on labels:
    /// out[label of p] = label of image of p.
    pub fn fill_row(&self, g: &Geometry, lab: &Labeling, out: &mut [u32]) {
        debug_assert_eq!(out.len(), g.num_points());
        for p in 0..g.num_points() {
            out[lab.label_of(p)] = lab.label_of(self.apply(g, p)) as u32;
        }
    }
}

/// A bijective relabeling of the points of a geometry.
#[derive(Clone, Debug)]
pub struct Labeling {
    to_label: Vec<u32>,
    from_label: Vec<u32>,
}

impl Labeling {
    /// The identity labeling on r points.
    #[must_use]
    pub fn identity(r: usize) -> Self {
        let ids: Vec<u32> = (0..r as u32).collect();
        Labeling {
            to_label: ids.clone(),
            from_label: ids,
        }
    }

    /// Builds a labeling from the map point index -> label, validating that
    /// it is a bijection on [r].
    pub fn new(to_label: Vec<usize>) -> Result<Self> {
        let r = to_label.len();
        let mut from_label = vec![u32::MAX; r];
        for (p, &l) in to_label.iter().enumerate() {
            if l >= r || from_label[l] != u32::MAX {
                return Err(Error::InvalidLabeling { r });
            }
            from_label[l] = p as u32;
        }
        Ok(Labeling {
            to_label: to_label.into_iter().map(|l| l as u32).collect(),
            from_label,
        })
    }

    /// Number of points.
    #[must_use]
    pub fn r(&self) -> usize {
        self.to_label.len()
    }

    /// Label of a point.
    #[inline]
    #[must_use]
    pub fn label_of(&self, p: PointIndex) -> usize {
        self.to_label[p] as usize
    }

    /// Point carrying a label.
    #[inline]
    #[must_use]
    pub fn point_of(&self, label: usize) -> PointIndex {
        self.from_label[label] as usize
    }
}

/// A group element rendered as a permutation of labels in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Projectivity {
    perm: Vec<u32>,
}

impl Projectivity {
    /// Renders a matrix as a permutation of labels.
    #[must_use]
    pub fn from_matrix(g: &Geometry, lab: &Labeling, m: &ProjMatrix) -> Self {
        let mut perm = vec![0u32; g.num_points()];
        m.fill_row(g, lab, &mut perm);
        Projectivity { perm }
    }

    /// One-line notation: perm()[i] is the image of label i.
    #[must_use]
    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    /// Image of a label.
    #[must_use]
    pub fn apply(&self, label: usize) -> usize {
        self.perm[label] as usize
    }

    /// True for the identity permutation.
    #[must_use]
    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }
}

/// Streaming access to PGL(n+1, q) over a fixed geometry.
pub struct PglStream<'g> {
    geom: &'g Geometry,
}

impl<'g> PglStream<'g> {
    #[must_use]
    pub fn new(geom: &'g Geometry) -> Self {
        PglStream { geom }
    }

    /// Exact group order.
    #[must_use]
    pub fn order(&self) -> BigUint {
        pgl_order(self.geom.n(), self.geom.q() as u64)
    }

    /// Streams every canonical matrix once, in canonical order.
    pub fn for_each_matrix<F: FnMut(&ProjMatrix)>(&self, mut f: F) {
        for first in 0..self.geom.num_points() {
            self.for_each_matrix_with_first_row(first, &mut f);
        }
    }

    /// Streams the chunk of canonical matrices whose first row is the
    /// representative of the given point.
    pub fn for_each_matrix_with_first_row<F: FnMut(&ProjMatrix)>(
        &self,
        first: PointIndex,
        mut f: F,
    ) {
        let g = self.geom;
        let dim = g.dim();
        let mut en = RowEnum::new(g);
        let mut mat = ProjMatrix {
            dim,
            rows: [[0; MAX_DIM]; MAX_DIM],
        };
        let rep = g.coords(first);
        mat.rows[0][..dim].copy_from_slice(rep);
        if dim == 1 {
            // PG(0, q) is a single point; the group is trivial.
            f(&mat);
            return;
        }
        en.push_row(&mat.rows[0]);
        en.recurse(&mut mat, 1, &mut f);
    }

    /// Parallel fold over the whole group, chunked by first row. The fold
    /// must be order-insensitive (all uses here merge integer counters).
    pub fn par_fold_matrices<T, MAKE, FOLD, MERGE>(&self, make: MAKE, fold: FOLD, merge: MERGE) -> T
    where
        T: Send,
        MAKE: Fn() -> T + Sync,
        FOLD: Fn(&mut T, &ProjMatrix) + Sync,
        MERGE: Fn(T, T) -> T + Sync,
    {
        (0..self.geom.num_points())
            .into_par_iter()
            .map(|first| {
                let mut acc = make();
                self.for_each_matrix_with_first_row(first, |m| fold(&mut acc, m));
                acc
            })
            .reduce_with(&merge)
            .unwrap_or_else(make)
    }

    /// Number of elements, by streaming (cross-checks [`PglStream::order`]).
    #[must_use]
    pub fn count_elements(&self) -> u64 {
        self.par_fold_matrices(|| 0u64, |acc, _| *acc += 1, |a, b| a + b)
    }

    /// Streams every element as a one-line row on labels, reusing a scratch
    /// buffer. Rows arrive in canonical matrix order.
    pub fn for_each_row<F: FnMut(&[u32])>(&self, lab: &Labeling, mut f: F) {
        let mut row = vec![0u32; self.geom.num_points()];
        self.for_each_matrix(|m| {
            m.fill_row(self.geom, lab, &mut row);
            f(&row);
        });
    }

    /// Materializes the whole group as permutations; guarded, for small
    /// groups only.
    pub fn materialize(&self, lab: &Labeling, cap: u64) -> Result<Vec<Projectivity>> {
        let order = self.order();
        if order > BigUint::from(cap) {
            return Err(Error::GuardExceeded {
                what: "materialized group order",
                limit: cap,
                actual: u64::try_from(order).unwrap_or(u64::MAX),
            });
        }
        let mut out = Vec::new();
        self.for_each_matrix(|m| out.push(Projectivity::from_matrix(self.geom, lab, m)));
        Ok(out)
    }
}

/// Enumeration state for the rows below the first: a bitset of the span of
/// the rows chosen so far, with an undo stack for backtracking.
struct RowEnum<'g> {
    geom: &'g Geometry,
    dim: usize,
    q: usize,
    table: usize,
    bits: Vec<u64>,
    /// Every vector in the span of the chosen rows, in insertion order;
    /// starts with just the zero vector.
    span: Vec<CoordVec>,
    marks: Vec<usize>,
}

impl<'g> RowEnum<'g> {
    fn new(geom: &'g Geometry) -> Self {
        let dim = geom.dim();
        let q = geom.q();
        let table = q.pow(dim as u32);
        let mut bits = vec![0u64; table.div_ceil(64)];
        bits[0] |= 1; // the zero vector
        RowEnum {
            geom,
            dim,
            q,
            table,
            bits,
            span: vec![[0; MAX_DIM]],
            marks: Vec::new(),
        }
    }

    #[inline]
    fn test(&self, enc: usize) -> bool {
        self.bits[enc >> 6] & (1 << (enc & 63)) != 0
    }

    #[inline]
    fn set(&mut self, enc: usize) {
        self.bits[enc >> 6] |= 1 << (enc & 63);
    }

    #[inline]
    fn clear(&mut self, enc: usize) {
        self.bits[enc >> 6] &= !(1 << (enc & 63));
    }

    /// Extends the span with all vectors s + c v for s in the current span
    /// and c nonzero.
    fn push_row(&mut self, v: &CoordVec) {
        let g = self.geom;
        let old_len = self.span.len();
        self.marks.push(old_len);
        for si in 0..old_len {
            let s = self.span[si];
            for c in 1..self.q as u16 {
                let mut w: CoordVec = [0; MAX_DIM];
                for d in 0..self.dim {
                    w[d] = g.addv(s[d], g.mulv(c, v[d]));
                }
                let enc = g.vector_enc(&w[..self.dim]);
                self.set(enc);
                self.span.push(w);
            }
        }
    }

    fn pop_row(&mut self) {
        let mark = self.marks.pop().expect("pop matches push");
        for i in mark..self.span.len() {
            let enc = self.geom.vector_enc(&self.span[i][..self.dim]);
            self.clear(enc);
        }
        self.span.truncate(mark);
    }

    /// Fills rows depth..dim with every choice of vectors outside the span
    /// of the rows above, calling f for each completed matrix.
    fn recurse<F: FnMut(&ProjMatrix)>(&mut self, mat: &mut ProjMatrix, depth: usize, f: &mut F) {
        let last = depth == self.dim - 1;
        // Walk candidate vectors with an odometer so the encoding advances
        // by repeated increments instead of per-candidate division.
        let mut vec: CoordVec = [0; MAX_DIM];
        let mut enc = 0usize;
        'outer: loop {
            let mut lane = self.dim;
            loop {
                lane -= 1;
                vec[lane] += 1;
                if (vec[lane] as usize) < self.q {
                    break;
                }
                vec[lane] = 0;
                if lane == 0 {
                    break 'outer;
                }
            }
            enc += 1;
            if self.test(enc) {
                continue;
            }
            mat.rows[depth] = vec;
            if last {
                f(&*mat);
            } else {
                self.push_row(&vec);
                self.recurse(mat, depth + 1, f);
                self.pop_row();
            }
        }
        debug_assert_eq!(enc + 1, self.table);
    }
}

/// Orbit, ascent and stabilizer counts of a label sequence under the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitCounts {
    /// Distinct images of the sequence.
    pub orbit_size: u64,
    /// Distinct images that are strictly increasing.
    pub asc_size: u64,
    /// Group elements fixing the sequence pointwise.
    pub stab_size: u64,
}

impl OrbitCounts {
    /// Number of group permutations covering the sequence: the count of
    /// ascending orbit members times the stabilizer order.
    #[must_use]
    pub fn coverage(&self) -> u64 {
        self.asc_size * self.stab_size
    }
}

/// Walks the orbit of a sequence of distinct labels under the streamed
/// group, counting distinct images, ascending images, and stabilizing
/// elements in one pass.
pub fn orbit_asc_stab(
    g: &Geometry,
    lab: &Labeling,
    seq: &[usize],
    guard: u64,
) -> Result<OrbitCounts> {
    let r = g.num_points();
    for &s in seq {
        if s >= r {
            return Err(Error::InvalidPointIndex { index: s, r });
        }
    }
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::RepeatedEntries);
    }

    let points: Vec<PointIndex> = seq.iter().map(|&l| lab.point_of(l)).collect();
    let target: Vec<u32> = seq.iter().map(|&l| l as u32).collect();
    let mut orbit: HashSet<Box<[u32]>> = HashSet::new();
    let mut stab = 0u64;
    let mut guard_hit = false;
    let stream = PglStream::new(g);
    let mut image = vec![0u32; seq.len()];
    stream.for_each_matrix(|m| {
        if guard_hit {
            return;
        }
        for (i, &p) in points.iter().enumerate() {
            image[i] = lab.label_of(m.apply(g, p)) as u32;
        }
        if image == target {
            stab += 1;
        }
        if !orbit.contains(image.as_slice()) {
            if orbit.len() as u64 >= guard {
                guard_hit = true;
                return;
            }
            orbit.insert(image.clone().into_boxed_slice());
        }
    });
    if guard_hit {
        return Err(Error::GuardExceeded {
            what: "orbit size",
            limit: guard,
            actual: guard + 1,
        });
    }

    let asc = orbit
        .iter()
        .filter(|t| t.windows(2).all(|w| w[0] < w[1]))
        .count() as u64;
    let counts = OrbitCounts {
        orbit_size: orbit.len() as u64,
        asc_size: asc,
        stab_size: stab,
    };

    // Orbit-stabilizer sanity: |orbit| * |stabilizer| = |group|.
    if let Some(order) = pgl_order_u64(g.n(), g.q() as u64) {
        if counts.orbit_size * counts.stab_size != order {
            return Err(Error::Internal(format!(
                "orbit {} times stabilizer {} is not the group order {order}",
                counts.orbit_size, counts.stab_size
            )));
        }
    }
    Ok(counts)
}

/// The unique projectivity mapping one frame to another, as a permutation
/// of labels. Both sequences must be frames of length n + 2.
pub fn projectivity_from_frames(
    g: &Geometry,
    lab: &Labeling,
    from: &[PointIndex],
    to: &[PointIndex],
) -> Result<Projectivity> {
    let m_from = frame_matrix(g, from, "source")?;
    let m_to = frame_matrix(g, to, "target")?;
    let f = m_to.matmul(g, &m_from.inverse(g)?);
    Ok(Projectivity::from_matrix(g, lab, &f))
}

/// Matrix sending the standard frame (e_1, ..., e_{n+1}, e_1 + ... + e_{n+1})
/// to the given frame: columns are the first n+1 representatives scaled so
/// that they sum to the last one.
fn frame_matrix(g: &Geometry, frame: &[PointIndex], which: &'static str) -> Result<ProjMatrix> {
    if !g.is_frame(frame)? {
        return Err(Error::NotAFrame { which });
    }
    let dim = g.dim();
    // Solve sum_i lambda_i v_i = v_{n+2} for the lambdas.
    let mut a = vec![[0u16; MAX_DIM]; dim];
    for (col, &p) in frame[..dim].iter().enumerate() {
        let v = g.coords(p);
        for (row, &c) in v.iter().enumerate() {
            a[row][col] = c;
        }
    }
    let b: Vec<u16> = g.coords(frame[dim]).to_vec();
    let lambda = solve_linear(g, &mut a, b)?;
    // A frame forces every lambda to be nonzero.
    if lambda[..dim].contains(&0) {
        return Err(Error::Internal(
            "frame solve produced a zero coefficient".into(),
        ));
    }
    let mut rows = [[0u16; MAX_DIM]; MAX_DIM];
    for (col, &p) in frame[..dim].iter().enumerate() {
        let v = g.coords(p);
        for (row, &c) in v.iter().enumerate() {
            rows[row][col] = g.mulv(lambda[col], c);
        }
    }
    Ok(ProjMatrix { dim, rows })
}

/// Gaussian elimination solve of a square system over the geometry's field.
#[allow(clippy::needless_range_loop)]
fn solve_linear(g: &Geometry, a: &mut [[u16; MAX_DIM]], mut b: Vec<u16>) -> Result<Vec<u16>> {
    let dim = b.len();
    for col in 0..dim {
        let Some(pivot) = (col..dim).find(|&i| a[i][col] != 0) else {
            return Err(Error::Internal("singular frame system".into()));
        };
        a.swap(col, pivot);
        b.swap(col, pivot);
        let scale = g.invv(a[col][col]);
        for j in 0..dim {
            a[col][j] = g.mulv(a[col][j], scale);
        }
        b[col] = g.mulv(b[col], scale);
        for i in 0..dim {
            if i == col || a[i][col] == 0 {
                continue;
            }
            let factor = g.negv(a[i][col]);
            for j in 0..dim {
                a[i][j] = g.addv(a[i][j], g.mulv(factor, a[col][j]));
            }
            b[i] = g.addv(b[i], g.mulv(factor, b[col]));
        }
    }
    Ok(b)
}
