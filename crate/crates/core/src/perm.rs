//! Permutations, position subsequences, and twin pairs.
//!
//! A twin pair is two disjoint subsequences of a host permutation whose value
//! sequences are order-isomorphic: they trace the same up/down shape even
//! though they use different symbols. Example: in `1 3 5 6 4 2` the
//! subsequences `1 5 2` (positions 1, 3, 6) and `3 6 4` (positions 2, 4, 5)
//! are twins of length three.
//!
//! Hosts here are slightly more general than textbook permutations: a
//! `Permutation` is a sequence of distinct values drawn from `[1, n]` for a
//! declared ground bound `n`, not necessarily using every value. The
//! distinction matters because the guaranteed-length construction repeatedly
//! deletes values and recurses on what is left, while all thresholds keep
//! referring to the original `n`.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// A sequence of distinct values from `[1, ground_bound]`, in host order.
#[derive(Clone, PartialEq, Eq)]
pub struct Permutation {
    values: Vec<u32>,
    ground_bound: u32,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation(n={}, {:?})", self.ground_bound, self.values)
    }
}

impl Permutation {
    /// Validates and wraps a value sequence with an explicit ground bound.
    pub fn new(values: Vec<u32>, ground_bound: u32) -> Result<Self> {
        if values.len() > ground_bound as usize {
            return Err(Error::LengthExceedsBound {
                len: values.len(),
                bound: ground_bound,
            });
        }
        for &v in &values {
            if v == 0 || v > ground_bound {
                return Err(Error::ValueOutOfBounds {
                    value: v,
                    bound: ground_bound,
                });
            }
        }
        // Distinctness via a scratch sort; values are already range-checked.
        let mut sorted = values.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateValue { value: w[0] });
            }
        }
        Ok(Permutation {
            values,
            ground_bound,
        })
    }

    /// Ground bound defaults to the maximum value (0 for an empty sequence).
    pub fn from_values(values: Vec<u32>) -> Result<Self> {
        let bound = values.iter().copied().max().unwrap_or(0);
        Permutation::new(values, bound)
    }

    /// Wraps values the caller has already proven distinct and in range.
    /// Used on hot paths where the invariant is inherited from an existing
    /// permutation (deletion remainders, unbiased shuffles of the identity).
    pub(crate) fn from_parts_unchecked(values: Vec<u32>, ground_bound: u32) -> Self {
        Permutation {
            values,
            ground_bound,
        }
    }

    /// The identity permutation `1 2 .. n`.
    pub fn identity(n: u32) -> Self {
        Permutation::from_parts_unchecked((1..=n).collect(), n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn ground_bound(&self) -> u32 {
        self.ground_bound
    }

    /// Value at a 1-based position.
    pub fn value_at(&self, position: u32) -> Option<u32> {
        self.values.get(position as usize - 1).copied()
    }

    /// The same values in reversed host order.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Permutation::from_parts_unchecked(values, self.ground_bound)
    }

    /// Each value `v` replaced by `ground_bound + 1 - v`.
    pub fn complemented(&self) -> Self {
        let n = self.ground_bound;
        let values = self.values.iter().map(|&v| n + 1 - v).collect();
        Permutation::from_parts_unchecked(values, n)
    }
}

/// Strictly increasing 1-based positions into some host permutation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PositionSubsequence {
    positions: Vec<u32>,
}

impl PositionSubsequence {
    pub fn new(positions: Vec<u32>) -> Result<Self> {
        let mut prev = 0u32;
        for (index, &p) in positions.iter().enumerate() {
            if p <= prev {
                return Err(Error::PositionsNotIncreasing { index });
            }
            prev = p;
        }
        Ok(PositionSubsequence { positions })
    }

    pub fn empty() -> Self {
        PositionSubsequence { positions: vec![] }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    /// The values a host holds at these positions, in order.
    /// Errors if any position exceeds the host length.
    pub fn values_in(&self, host: &Permutation) -> Result<Vec<u32>> {
        self.positions
            .iter()
            .map(|&p| {
                host.value_at(p).ok_or(Error::PositionOutOfRange {
                    position: p,
                    len: host.len(),
                })
            })
            .collect()
    }
}

/// A claimed pair of twins: two position subsequences of one host.
///
/// `closeness_bound` is an optional extra contract: every aligned value pair
/// must satisfy `|first_i - second_i| <= bound`. The guaranteed-length
/// construction emits pairs with this bound set to `floor(n^(2/5))`; other
/// algorithms leave it `None`.
#[derive(Clone, Debug)]
pub struct TwinPair {
    pub host: Permutation,
    pub first: PositionSubsequence,
    pub second: PositionSubsequence,
    pub closeness_bound: Option<u32>,
}

impl TwinPair {
    pub fn new(
        host: Permutation,
        first: PositionSubsequence,
        second: PositionSubsequence,
        closeness_bound: Option<u32>,
    ) -> Self {
        TwinPair {
            host,
            first,
            second,
            closeness_bound,
        }
    }

    /// Twin length as claimed by the first subsequence. Equal to the second's
    /// length whenever the pair verifies.
    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty() && self.second.is_empty()
    }
}

/// First invariant a twin pair violates, with a concrete witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwinViolation {
    LengthMismatch { first: usize, second: usize },
    SharedSymbol { value: u32 },
    NotOrderIsomorphic { left: usize, right: usize },
    ClosenessExceeded { index: usize, gap: u32, bound: u32 },
}

impl fmt::Display for TwinViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwinViolation::LengthMismatch { first, second } => {
                write!(f, "length mismatch: {first} vs {second}")
            }
            TwinViolation::SharedSymbol { value } => {
                write!(f, "symbol disjointness violated: both sides use value {value}")
            }
            TwinViolation::NotOrderIsomorphic { left, right } => {
                write!(
                    f,
                    "not order-isomorphic: aligned indices {left} and {right} compare differently"
                )
            }
            TwinViolation::ClosenessExceeded { index, gap, bound } => {
                write!(
                    f,
                    "closeness exceeded at index {index}: gap {gap} > bound {bound}"
                )
            }
        }
    }
}

/// Ranks of a distinct-value sequence: the result maps each entry to its
/// 1-based rank, so `pattern_of(&[13, 5, 642])` is `[2, 1, 3]`.
pub fn pattern_of(x: &[u32]) -> Result<Vec<u32>> {
    let mut order: Vec<u32> = (0..x.len() as u32).collect();
    order.sort_unstable_by_key(|&i| x[i as usize]);
    for w in order.windows(2) {
        if x[w[0] as usize] == x[w[1] as usize] {
            return Err(Error::DuplicateValue {
                value: x[w[0] as usize],
            });
        }
    }
    let mut ranks = vec![0u32; x.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i as usize] = rank as u32 + 1;
    }
    Ok(ranks)
}

/// Whether two equal-length distinct-value sequences trace the same shape.
/// Length mismatch is an error, not `false`.
pub fn order_isomorphic(x: &[u32], y: &[u32]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(iso_witness(x, y)?.is_none())
}

/// `None` if isomorphic, else a pair of indices ordered differently.
/// Both inputs must already have equal length; duplicates are an error.
fn iso_witness(x: &[u32], y: &[u32]) -> Result<Option<(usize, usize)>> {
    debug_assert_eq!(x.len(), y.len());
    let mut order: Vec<u32> = (0..x.len() as u32).collect();
    order.sort_unstable_by_key(|&i| x[i as usize]);
    for w in order.windows(2) {
        if x[w[0] as usize] == x[w[1] as usize] {
            return Err(Error::DuplicateValue {
                value: x[w[0] as usize],
            });
        }
    }
    // x and y are isomorphic iff y, read in x's sorting order, is increasing.
    for w in order.windows(2) {
        let (a, b) = (w[0] as usize, w[1] as usize);
        if y[a] >= y[b] {
            if y[a] == y[b] {
                return Err(Error::DuplicateValue { value: y[a] });
            }
            return Ok(Some((a.min(b), a.max(b))));
        }
    }
    Ok(None)
}

/// Checks a claimed twin pair against every invariant, in a fixed order:
/// positions in range (malformed input, an error), equal lengths, symbol
/// disjointness, order isomorphism, then the closeness bound if one is
/// declared. Returns the first violation, or `None` for a valid pair.
pub fn verify_twins(pair: &TwinPair) -> Result<Option<TwinViolation>> {
    let a = pair.first.values_in(&pair.host)?;
    let b = pair.second.values_in(&pair.host)?;
    if a.len() != b.len() {
        return Ok(Some(TwinViolation::LengthMismatch {
            first: a.len(),
            second: b.len(),
        }));
    }
    // Positions are strictly increasing per side and the host is duplicate
    // free, so a shared position is the same thing as a shared value.
    let mut fp = pair.first.positions().iter().peekable();
    let mut sp = pair.second.positions().iter().peekable();
    while let (Some(&&p), Some(&&q)) = (fp.peek(), sp.peek()) {
        if p == q {
            return Ok(Some(TwinViolation::SharedSymbol {
                value: pair.host.value_at(p).expect("position already range-checked"),
            }));
        } else if p < q {
            fp.next();
        } else {
            sp.next();
        }
    }
    if let Some((left, right)) = iso_witness(&a, &b)? {
        return Ok(Some(TwinViolation::NotOrderIsomorphic { left, right }));
    }
    if let Some(bound) = pair.closeness_bound {
        for (index, (&x, &y)) in a.iter().zip(&b).enumerate() {
            let gap = x.abs_diff(y);
            if gap > bound {
                return Ok(Some(TwinViolation::ClosenessExceeded { index, gap, bound }));
            }
        }
    }
    Ok(None)
}

/// Keeps the values satisfying a predicate, preserving host order and the
/// ground bound.
pub fn restrict_by_values(p: &Permutation, keep: impl Fn(u32) -> bool) -> Permutation {
    let values = p.values().iter().copied().filter(|&v| keep(v)).collect();
    Permutation::from_parts_unchecked(values, p.ground_bound())
}

/// Keeps the values at the given positions, preserving the ground bound.
/// Positions beyond the host length are an error.
pub fn restrict_to_positions(p: &Permutation, keep: &PositionSubsequence) -> Result<Permutation> {
    let values = keep.values_in(p)?;
    Ok(Permutation::from_parts_unchecked(values, p.ground_bound()))
}

/// Intersection of two strictly increasing position lists, for the
/// restriction-composition laws.
pub fn intersect_positions(
    a: &PositionSubsequence,
    b: &PositionSubsequence,
) -> PositionSubsequence {
    let set: HashSet<u32> = b.positions().iter().copied().collect();
    let positions = a
        .positions()
        .iter()
        .copied()
        .filter(|p| set.contains(p))
        .collect();
    PositionSubsequence { positions }
}
