//! Guaranteed-length close twins by windowed rounds.
//!
//! One round inspects the first `3r` elements of the current permutation,
//! sorts their values into `r` consecutive triples, and keeps the triples
//! whose value spread is small (at most `floor(2n/r)`; a counting argument
//! over disjoint value ranges inside `[1, n]` forces more than half the
//! triples to qualify). The three per-triple value copies form three
//! permutations of one symbol set, some two of which share a common
//! subsequence of cube-root length. Reading that common subsequence through
//! two different columns of the kept triples yields two interleaved
//! subsequences that are order-isomorphic, value-disjoint, and pointwise
//! within `tau = floor(n^(2/5))` of each other: close twins of length
//! `trim_target = ceil(n^(1/5))` inside the window.
//!
//! Deleting the window plus every later element whose value falls in one of
//! the `trim_target` intervals `[first_i, first_i + tau]` leaves a remainder
//! on which the next round's twins concatenate cleanly: a surviving value
//! lies outside each interval, and since both twin values of a round sit
//! inside their interval, any later aligned pair lands strictly on one side
//! of both (its own span is at most `tau`, the interval's width). Iterating
//! while the window fits multiplies the per-round length by the round count.

use crate::arith::{ceil_root, floor_root};
use crate::error::{Error, Result};
use crate::monotone::{best_common_pair, es_baseline_twins};
use crate::perm::{verify_twins, Permutation, PositionSubsequence, TwinPair};

/// All thresholds of the construction, derived from the ground bound alone
/// by exact integer arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    /// Ground bound of the host.
    pub n: u32,
    /// Triple count per window: `ceil(2 * n^(3/5))`.
    pub r: u64,
    /// Closeness threshold: `floor(n^(2/5))`.
    pub tau: u64,
    /// Twin length added per round: `ceil(n^(1/5))`.
    pub trim_target: u64,
    /// Window length `3r`; a round needs at least this many elements.
    pub min_window_length: u64,
    /// Nominal round count `floor(n^(2/5) / 7)`.
    pub rounds_target: u64,
    /// Spread threshold for keeping a triple: `floor(2n / r)`.
    pub spread_cap: u64,
    /// Provable worst-case deletion of one round:
    /// `3r + (tau - 1) * trim_target`. The window accounts for `3r`; each of
    /// the `trim_target` deletion intervals spans `tau + 1` values of which
    /// at least two (the interval's base and its triple's largest value) are
    /// window elements already counted.
    pub max_deleted_per_round: u64,
}

impl Params {
    pub fn for_ground_bound(n: u32) -> Params {
        let n3 = (n as u128) * (n as u128) * (n as u128);
        let r = ceil_root(32 * n3, 5);
        let tau = floor_root((n as u128) * (n as u128), 5);
        let trim_target = ceil_root(n as u128, 5);
        Params {
            n,
            r,
            tau,
            trim_target,
            min_window_length: 3 * r,
            rounds_target: tau / 7,
            spread_cap: if r == 0 { 0 } else { 2 * n as u64 / r },
            max_deleted_per_round: 3 * r + tau.saturating_sub(1) * trim_target,
        }
    }

    /// Rounds provably executable on a host of length `m`: every round costs
    /// at most `max_deleted_per_round` elements and needs a full window.
    pub fn provable_rounds(&self, m: u64) -> u64 {
        if self.min_window_length == 0 || m < self.min_window_length {
            return 0;
        }
        1 + (m - self.min_window_length) / self.max_deleted_per_round
    }
}

/// Per-round knobs. `trim_to_target` keeps exactly `trim_target` symbols of
/// the common subsequence (the accounted-for choice); switching it off keeps
/// the whole common subsequence for longer twins at the price of larger,
/// unaccounted deletions.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub trim_to_target: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            trim_to_target: true,
        }
    }
}

/// Everything one round produces.
#[derive(Clone, Debug)]
pub struct RoundOutcome {
    /// Values of the first twin prefix, in twin order.
    pub prefix_first: Vec<u32>,
    /// Values of the second twin prefix; `prefix_first[i] < prefix_second[i]`
    /// and they differ by at most `tau`.
    pub prefix_second: Vec<u32>,
    /// 1-based positions of `prefix_first` in this round's input.
    pub positions_first: Vec<u32>,
    /// 1-based positions of `prefix_second` in this round's input.
    pub positions_second: Vec<u32>,
    /// Input minus the window and the deletion intervals.
    pub remainder: Permutation,
    /// 1-based input positions surviving into `remainder`, increasing.
    pub kept_positions: Vec<u32>,
    /// Elements removed this round (window plus interval hits).
    pub deleted_count: usize,
    /// Number of tight triples found.
    pub i0_len: usize,
    /// Which two of the three value columns were selected.
    pub pair: (usize, usize),
    /// Common subsequence length before trimming.
    pub common_len: usize,
}

/// Runs one window round with default options.
pub fn round(p: &Permutation, params: &Params) -> Result<RoundOutcome> {
    round_with(p, params, Options::default())
}

pub fn round_with(p: &Permutation, params: &Params, options: Options) -> Result<RoundOutcome> {
    if params.r == 0 {
        return Err(Error::InvalidSpec {
            reason: "window round needs a positive ground bound".into(),
        });
    }
    let w = params.min_window_length as usize;
    if p.len() < w {
        return Err(Error::WindowUnderflow {
            len: p.len(),
            needed: w,
        });
    }
    let window = &p.values()[..w];
    let mut b: Vec<u32> = window.to_vec();
    b.sort_unstable();

    let r = params.r as usize;
    let mut tight: Vec<u32> = Vec::with_capacity(r);
    for i in 0..r {
        if (b[3 * i + 2] - b[3 * i]) as u64 <= params.spread_cap {
            tight.push(i as u32);
        }
    }
    // Disjoint triple ranges inside [1, n] sum to < n, so fewer than half of
    // the r triples can exceed floor(2n/r).
    if 2 * tight.len() < r {
        return Err(Error::DerivationViolated {
            step: "tight-triple census fell below half the triples".into(),
        });
    }

    // Split the window into the three per-triple value columns, each
    // relabeled by its triple's rank so all three share the symbol set
    // [1, |tight|].
    let mut kept: Vec<(u32, u8, u32)> = Vec::with_capacity(3 * tight.len());
    for (rank, &i) in tight.iter().enumerate() {
        for j in 0..3u8 {
            kept.push((b[3 * i as usize + j as usize], j, rank as u32 + 1));
        }
    }
    kept.sort_unstable_by_key(|&(v, _, _)| v);
    let s = tight.len();
    let mut symbols: [Vec<u32>; 3] = [
        Vec::with_capacity(s),
        Vec::with_capacity(s),
        Vec::with_capacity(s),
    ];
    let mut positions: [Vec<u32>; 3] = [
        Vec::with_capacity(s),
        Vec::with_capacity(s),
        Vec::with_capacity(s),
    ];
    let mut values: [Vec<u32>; 3] = [
        Vec::with_capacity(s),
        Vec::with_capacity(s),
        Vec::with_capacity(s),
    ];
    for (t, &v) in window.iter().enumerate() {
        if let Ok(idx) = kept.binary_search_by_key(&v, |&(value, _, _)| value) {
            let (_, j, sym) = kept[idx];
            symbols[j as usize].push(sym);
            positions[j as usize].push(t as u32 + 1);
            values[j as usize].push(v);
        }
    }
    let copies: Vec<Permutation> = symbols
        .iter()
        .map(|sy| Permutation::from_parts_unchecked(sy.clone(), s as u32))
        .collect();

    let selection = best_common_pair([&copies[0], &copies[1], &copies[2]])?;
    let (k, l) = selection.pair;
    if (selection.symbols.len() as u64) < params.trim_target {
        return Err(Error::DerivationViolated {
            step: "common subsequence shorter than the trim target".into(),
        });
    }
    let chosen: &[u32] = if options.trim_to_target {
        &selection.symbols[..params.trim_target as usize]
    } else {
        &selection.symbols
    };

    // Symbol -> column index lookup for the two selected columns.
    let mut inverse_k = vec![0u32; s];
    let mut inverse_l = vec![0u32; s];
    for (idx, &sym) in symbols[k].iter().enumerate() {
        inverse_k[sym as usize - 1] = idx as u32;
    }
    for (idx, &sym) in symbols[l].iter().enumerate() {
        inverse_l[sym as usize - 1] = idx as u32;
    }
    let mut prefix_first = Vec::with_capacity(chosen.len());
    let mut prefix_second = Vec::with_capacity(chosen.len());
    let mut positions_first = Vec::with_capacity(chosen.len());
    let mut positions_second = Vec::with_capacity(chosen.len());
    for &sym in chosen {
        let ik = inverse_k[sym as usize - 1] as usize;
        let il = inverse_l[sym as usize - 1] as usize;
        prefix_first.push(values[k][ik]);
        positions_first.push(positions[k][ik]);
        prefix_second.push(values[l][il]);
        positions_second.push(positions[l][il]);
    }
    for (i, (&a, &c)) in prefix_first.iter().zip(&prefix_second).enumerate() {
        if a >= c || (c - a) as u64 > params.tau {
            return Err(Error::DerivationViolated {
                step: "aligned prefix values not close or not ordered".into(),
            });
        }
        let _ = i;
    }

    // Delete the window and every later element inside an interval
    // [first_i, first_i + tau].
    let mut starts: Vec<u32> = prefix_first.clone();
    starts.sort_unstable();
    let tau = params.tau;
    let in_interval = |v: u32| -> bool {
        let idx = starts.partition_point(|&c| c <= v);
        idx > 0 && (v as u64) <= starts[idx - 1] as u64 + tau
    };
    let mut kept_positions: Vec<u32> = Vec::with_capacity(p.len() - w);
    let mut remainder_values: Vec<u32> = Vec::with_capacity(p.len() - w);
    for (t, &v) in p.values().iter().enumerate().skip(w) {
        if !in_interval(v) {
            kept_positions.push(t as u32 + 1);
            remainder_values.push(v);
        }
    }
    let deleted_count = p.len() - remainder_values.len();
    let deletion_bound =
        params.min_window_length + params.tau.saturating_sub(1) * chosen.len() as u64;
    if deleted_count as u64 > deletion_bound {
        return Err(Error::DerivationViolated {
            step: "deletion exceeded the provable per-round bound".into(),
        });
    }
    let remainder = Permutation::from_parts_unchecked(remainder_values, p.ground_bound());

    Ok(RoundOutcome {
        prefix_first,
        prefix_second,
        positions_first,
        positions_second,
        remainder,
        kept_positions,
        deleted_count,
        i0_len: s,
        pair: (k, l),
        common_len: selection.symbols.len(),
    })
}

/// One line of the per-round trace.
#[derive(Clone, Debug)]
pub struct RoundTrace {
    pub round_index: usize,
    pub i0_len: usize,
    pub pair: (usize, usize),
    pub common_len: usize,
    pub kept_len: usize,
    pub deleted_count: usize,
    pub remainder_len: usize,
}

/// Iterated rounds: close twins with closeness bound `tau`, of length
/// (rounds executed) x (symbols kept per round). Hosts too short for one
/// window yield a valid empty pair.
pub fn close_twins(p: &Permutation) -> Result<TwinPair> {
    close_twins_with(p, Options::default())
}

pub fn close_twins_with(p: &Permutation, options: Options) -> Result<TwinPair> {
    close_twins_traced(p, options).map(|(pair, _)| pair)
}

pub fn close_twins_traced(
    p: &Permutation,
    options: Options,
) -> Result<(TwinPair, Vec<RoundTrace>)> {
    let params = Params::for_ground_bound(p.ground_bound());
    let mut first_positions: Vec<u32> = Vec::new();
    let mut second_positions: Vec<u32> = Vec::new();
    let mut traces: Vec<RoundTrace> = Vec::new();
    let mut current = p.clone();
    // original[i] = 1-based host position of current element i.
    let mut original: Vec<u32> = (1..=p.len() as u32).collect();
    while params.min_window_length > 0 && current.len() as u64 >= params.min_window_length {
        let outcome = round_with(&current, &params, options)?;
        for &q in &outcome.positions_first {
            first_positions.push(original[q as usize - 1]);
        }
        for &q in &outcome.positions_second {
            second_positions.push(original[q as usize - 1]);
        }
        traces.push(RoundTrace {
            round_index: traces.len(),
            i0_len: outcome.i0_len,
            pair: outcome.pair,
            common_len: outcome.common_len,
            kept_len: outcome.prefix_first.len(),
            deleted_count: outcome.deleted_count,
            remainder_len: outcome.remainder.len(),
        });
        original = outcome
            .kept_positions
            .iter()
            .map(|&q| original[q as usize - 1])
            .collect();
        current = outcome.remainder;
    }
    let pair = TwinPair::new(
        p.clone(),
        PositionSubsequence::new(first_positions)?,
        PositionSubsequence::new(second_positions)?,
        Some(params.tau.min(u32::MAX as u64) as u32),
    );
    if verify_twins(&pair)?.is_some() {
        return Err(Error::DerivationViolated {
            step: "final concatenation failed verification".into(),
        });
    }
    Ok((pair, traces))
}

/// The full guaranteed algorithm: the longer of the windowed close twins and
/// the monotone-run baseline (ties go to the close twins, which carry the
/// closeness bound).
pub fn guaranteed_twins(p: &Permutation) -> Result<TwinPair> {
    let close = close_twins(p)?;
    let baseline = es_baseline_twins(p);
    Ok(if close.len() >= baseline.len() {
        close
    } else {
        baseline
    })
}

/// Twin length `guaranteed_twins` provably reaches on every permutation of
/// `[1, n]`: the larger of the baseline floor `floor(ceil(sqrt(n)) / 2)` and
/// the windowed product (provable rounds) x `trim_target`.
pub fn guaranteed_length(n: u32) -> u64 {
    if n < 2 {
        return 0;
    }
    let params = Params::for_ground_bound(n);
    let product = params.provable_rounds(n as u64) * params.trim_target;
    crate::monotone::baseline_guarantee(n as u64).max(product)
}
