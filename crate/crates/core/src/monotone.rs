//! Monotone-subsequence kernels: LIS/LDS with witnesses, longest common
//! subsequence of two permutations over one symbol set, selection of the best
//! pair out of three permutations, and the baseline twins obtained by halving
//! a longest monotone run.

use crate::error::{Error, Result};
use crate::perm::{Permutation, PositionSubsequence, TwinPair};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Increasing,
    Decreasing,
}

const NONE: u32 = u32::MAX;

/// Longest strictly increasing subsequence of `values`, as 0-based indices.
/// Patience sorting over tails with back-pointers, O(m log m).
fn lis_indices(values: &[u32]) -> Vec<u32> {
    // tails[k] = index of the smallest tail value among increasing
    // subsequences of length k+1; tail values are increasing in k.
    let mut tails: Vec<u32> = Vec::new();
    let mut prev = vec![NONE; values.len()];
    for (i, &v) in values.iter().enumerate() {
        let class = tails.partition_point(|&t| values[t as usize] < v);
        if class > 0 {
            prev[i] = tails[class - 1];
        }
        if class == tails.len() {
            tails.push(i as u32);
        } else {
            tails[class] = i as u32;
        }
    }
    let mut indices = Vec::with_capacity(tails.len());
    let mut cur = match tails.last() {
        Some(&t) => t,
        None => return indices,
    };
    while cur != NONE {
        indices.push(cur);
        cur = prev[cur as usize];
    }
    indices.reverse();
    indices
}

/// A longest monotone subsequence in the given direction, as 1-based
/// positions. Length is exactly the optimum; the witness is the canonical one
/// recovered from patience-sort back-pointers.
pub fn lis(p: &Permutation, direction: Direction) -> PositionSubsequence {
    let indices = match direction {
        Direction::Increasing => lis_indices(p.values()),
        Direction::Decreasing => {
            // v strictly decreasing iff bound+1-v strictly increasing.
            let bound = p.ground_bound();
            let flipped: Vec<u32> = p.values().iter().map(|&v| bound + 1 - v).collect();
            lis_indices(&flipped)
        }
    };
    let positions = indices.into_iter().map(|i| i + 1).collect();
    PositionSubsequence::new(positions).expect("indices recovered in increasing order")
}

/// A longest common subsequence of two permutations of the same symbol set,
/// as the shared symbol sequence. Exact, via the classical reduction: relabel
/// each symbol of `x` by its position in `y`; common subsequences are then
/// exactly the increasing runs of the relabeling, so one LIS call suffices.
pub fn lcs_of_permutations(x: &Permutation, y: &Permutation) -> Result<Vec<u32>> {
    if !same_symbol_set(x, y) {
        return Err(Error::SymbolSetMismatch);
    }
    let mut pos_in_y = vec![0u32; y.ground_bound() as usize + 1];
    for (i, &v) in y.values().iter().enumerate() {
        pos_in_y[v as usize] = i as u32 + 1;
    }
    let relabeled: Vec<u32> = x.values().iter().map(|&v| pos_in_y[v as usize]).collect();
    let indices = lis_indices(&relabeled);
    Ok(indices.into_iter().map(|i| x.values()[i as usize]).collect())
}

fn same_symbol_set(x: &Permutation, y: &Permutation) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut a: Vec<u32> = x.values().to_vec();
    let mut b: Vec<u32> = y.values().to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// The winning pair out of three permutations of one `m`-element symbol set,
/// with their longest common subsequence.
#[derive(Clone, Debug)]
pub struct CommonSubpermutation {
    /// Indices of the two chosen permutations, `pair.0 < pair.1`.
    pub pair: (usize, usize),
    /// The common subsequence, in its shared order of appearance.
    pub symbols: Vec<u32>,
}

/// Picks, among the three pairs of the given permutations, one whose exact
/// LCS is longest (ties to the lexicographically smallest index pair). Any
/// three permutations of one `m`-element set share a common subsequence of
/// length at least m^(1/3); that floor is asserted, and a violation (which
/// would mean a defect in the LCS kernel) comes back as an error.
pub fn best_common_pair(perms: [&Permutation; 3]) -> Result<CommonSubpermutation> {
    let mut best: Option<CommonSubpermutation> = None;
    for (k, l) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let symbols = lcs_of_permutations(perms[k], perms[l])?;
        if best.as_ref().map_or(true, |b| symbols.len() > b.symbols.len()) {
            best = Some(CommonSubpermutation {
                pair: (k, l),
                symbols,
            });
        }
    }
    let best = best.expect("three pairs examined");
    let m = perms[0].len();
    let len = best.symbols.len() as u128;
    if len * len * len < m as u128 {
        return Err(Error::CubeRootBoundViolated { m, len: best.symbols.len() });
    }
    Ok(best)
}

/// Floor of half the guaranteed monotone-run length: ⌊⌈√m⌉ / 2⌋. Every
/// permutation of length `m` has a monotone run of length ≥ ⌈√m⌉, so the
/// baseline twins below always reach this.
pub fn baseline_guarantee(m: u64) -> u64 {
    crate::arith::ceil_sqrt(m) / 2
}

/// Twins from halving the longest monotone run: take the longer of LIS and
/// LDS (ties to increasing), drop trailing elements to an even count, and
/// split in half. Both halves run in the same direction, so they are
/// order-isomorphic, and they share no symbol. Length is ⌊s/2⌋ ≥ ⌊⌈√m⌉/2⌋.
pub fn es_baseline_twins(p: &Permutation) -> TwinPair {
    let inc = lis(p, Direction::Increasing);
    let dec = lis(p, Direction::Decreasing);
    let run = if inc.len() >= dec.len() { inc } else { dec };
    let half = run.len() / 2;
    let first = PositionSubsequence::new(run.positions()[..half].to_vec())
        .expect("prefix of increasing positions");
    let second = PositionSubsequence::new(run.positions()[half..2 * half].to_vec())
        .expect("slice of increasing positions");
    TwinPair::new(p.clone(), first, second, None)
}
