//! Perfect sequence covering arrays from projective linear groups.
//!
//! A perfect sequence covering array PSCA(v, t, λ) is a multiset of
//! permutations of v symbols in which every sequence of t distinct symbols
//! appears as a subsequence of exactly λ of the permutations. This crate
//! builds such arrays from the permutation action of PGL(n+1, q) on the
//! points of the projective space PG(n, q), verifies arbitrary arrays by
//! exhaustive coverage counting, and computes the line-counting statistics
//! that explain how close the group action comes to perfect coverage of
//! 4-sequences over the full point set.
//!
//! Module map:
//! - [`gf`]: GF(p^m) arithmetic with canonical moduli and log tables.
//! - [`projgeom`]: points, lines, ranks, frames and arcs of PG(n, q).
//! - [`grp`]: streaming enumeration of PGL(n+1, q) as permutations, orbit
//!   and stabilizer counting.
//! - [`psca`]: coverage verification, symbol deletion, the group-based
//!   construction, size bounds, and the on-disk permutation format.
//! - [`singer`]: planar difference sets from field extensions and the
//!   point labeling that turns lines into cyclic translates.
//! - [`ascstats`]: classification of 4-point sequences, ascent-sum
//!   statistics of labeled line sets, and full coverage histograms.

pub mod ascstats;
pub mod error;
pub mod gf;
pub mod grp;
pub mod projgeom;
pub mod psca;
pub mod singer;

pub use error::{Error, Result};
