//! Crate-wide error type.
//!
//! Variants are grouped by how callers are expected to react: bad inputs and
//! unmet preconditions, resource guards that refused to start expensive work,
//! malformed data files, and internal invariant failures (always a bug).

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // --- invalid inputs / preconditions -----------------------------------
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be at least 1")]
    InvalidDegree,

    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),

    #[error("coefficient {value} is not a residue mod {p}")]
    InvalidCoefficient { value: u64, p: u64 },

    #[error("element has {got} coefficients, field has degree {expected}")]
    WrongElementSize { expected: u32, got: usize },

    #[error("value {value} is not in [0, {q})")]
    ValueOutOfRange { value: u64, q: u64 },

    #[error("division by zero in a finite field")]
    DivisionByZero,

    #[error("discrete log of zero is undefined")]
    DlogOfZero,

    #[error("projective dimension must be at least 1, got {0}")]
    InvalidDimension(usize),

    #[error("arc construction needs q >= n, got q = {q}, n = {n}")]
    QTooSmallForArc { q: u64, n: usize },

    #[error("point index {index} out of range for {r} points")]
    InvalidPointIndex { index: usize, r: usize },

    #[error("sequence has repeated entries")]
    RepeatedEntries,

    #[error("expected a sequence of length {expected}, got {got}")]
    WrongSequenceLength { expected: usize, got: usize },

    #[error("the {which} point tuple is not a frame")]
    NotAFrame { which: &'static str },

    #[error("labeling is not a bijection on [{r}]")]
    InvalidLabeling { r: usize },

    #[error("strength t must satisfy 2 <= t <= v, got t = {t}, v = {v}")]
    InvalidStrength { t: usize, v: usize },

    #[error("construction needs t >= 3, got t = {t}")]
    StrengthTooSmall { t: usize },

    #[error("construction needs q >= {needed} for a (q+1)-arc of degree {n}, got q = {q}")]
    FieldTooSmall { q: u64, n: usize, needed: u64 },

    #[error("symbol deletion cutoff must satisfy 1 <= j <= v, got j = {j}, v = {v}")]
    InvalidCutoff { j: usize, v: usize },

    #[error("multiset of permutations is empty")]
    EmptyMultiset,

    #[error("geometry is not a projective plane (n = {n})")]
    NotAPlane { n: usize },

    // --- data conditions ----------------------------------------------------
    #[error("not a difference set mod {r}: residue {missing} is not a difference of members")]
    NotADifferenceSet { r: u64, missing: u64 },

    #[error("difference set mod {r} is not planar: residue {residue} occurs {count} times as a difference")]
    NonPlanarDifferenceSet { r: u64, residue: u64, count: u64 },

    #[error("difference set entries must be distinct residues mod {r}")]
    InvalidDifferenceSetEntries { r: u64 },

    #[error("line set is not the translate closure of a single line")]
    NotTranslateLineset,

    #[error("invalid line set: {reason}")]
    InvalidLineset { reason: String },

    // --- resource guards ------------------------------------------------------
    #[error("guard exceeded: {what} = {actual} is over the limit {limit}")]
    GuardExceeded {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    // --- file handling ----------------------------------------------------
    #[error("malformed input at line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    // --- invariant failures (bugs) -----------------------------------------
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error is a resource guard refusing to start expensive
    /// work (as opposed to an invalid input or a data condition).
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. })
    }
}
