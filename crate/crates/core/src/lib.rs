//! Twin subsequence algorithms for permutations.

pub mod arith;
pub mod close_twins;
pub mod error;
pub mod experiment;
pub mod format;
pub mod gen;
pub mod grid;
pub mod monotone;
pub mod oracle;
pub mod perm;
pub mod sample;

pub use error::{Error, Result};
pub use perm::{
    order_isomorphic, pattern_of, restrict_by_values, restrict_to_positions, verify_twins,
    Permutation, PositionSubsequence, TwinPair, TwinViolation,
};
