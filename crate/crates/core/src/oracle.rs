//! Exact twin computations by exhaustive search, plus brute-force referees
//! for the fast kernels.
//!
//! `exact_twins` finds a provably longest twin pair in one small host.
//! `exact_t_of_n` minimizes that over every permutation of `[1, n]`, which is
//! the ground-truth floor the constructive algorithms are measured against.
//! Both are exponential and guarded by hard caps and a node budget.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{verify_twins, Permutation, PositionSubsequence, TwinPair};

/// Hard limits for the exhaustive searches.
#[derive(Clone, Debug)]
pub struct OracleBudget {
    /// Longest single host `exact_twins` accepts.
    pub max_length_single: usize,
    /// Largest universe `exact_t_of_n` accepts.
    pub max_n_universal: u32,
    /// Search nodes allowed per target length before the attempt is abandoned.
    pub node_limit: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_length_single: 12,
            max_n_universal: 8,
            node_limit: 10_000_000,
        }
    }
}

/// Result of a longest-twin search. `optimal` is false when some target
/// length above the returned one was abandoned on the node budget, so the
/// pair is only a lower bound.
#[derive(Clone, Debug)]
pub struct ExactOutcome {
    pub pair: TwinPair,
    pub optimal: bool,
    pub nodes: u64,
}

enum Attempt {
    Found(Vec<u32>, Vec<u32>),
    Exhausted,
    Impossible,
}

/// Depth-first search for one fixed target length.
///
/// Positions are scanned left to right; each is assigned to the first twin,
/// the second, or skipped. A state is dead once (a) too few positions remain
/// to fill both sides, or (b) it was already proven hopeless. The memo key
/// captures everything extensions can observe about the partials: how each
/// held value compares to the unread suffix, and the relative order inside
/// each side. Cross-side comparisons never enter the isomorphism constraint,
/// so they stay out of the key.
struct Search<'a> {
    values: &'a [u32],
    target: usize,
    node_limit: u64,
    nodes: u64,
    exhausted: bool,
    a_vals: Vec<u32>,
    a_pos: Vec<u32>,
    b_vals: Vec<u32>,
    b_pos: Vec<u32>,
    suffix_sorted: Vec<Vec<u32>>,
    failed: HashSet<u128>,
}

impl<'a> Search<'a> {
    fn new(values: &'a [u32], target: usize, node_limit: u64) -> Self {
        let m = values.len();
        let mut suffix_sorted = Vec::with_capacity(m + 1);
        for pos in 0..=m {
            let mut s = values[pos..].to_vec();
            s.sort_unstable();
            suffix_sorted.push(s);
        }
        Search {
            values,
            target,
            node_limit,
            nodes: 0,
            exhausted: false,
            a_vals: Vec::with_capacity(target),
            a_pos: Vec::with_capacity(target),
            b_vals: Vec::with_capacity(target),
            b_pos: Vec::with_capacity(target),
            suffix_sorted,
            failed: HashSet::new(),
        }
    }

    fn run(&mut self) -> Attempt {
        if self.dfs(0) {
            Attempt::Found(self.a_pos.clone(), self.b_pos.clone())
        } else if self.exhausted {
            Attempt::Exhausted
        } else {
            Attempt::Impossible
        }
    }

    /// New pair k is consistent when its orientation against every settled
    /// pair matches on both sides.
    fn consistent(&self, k: usize, ak: u32, bk: u32) -> bool {
        (0..k).all(|t| (self.a_vals[t] < ak) == (self.b_vals[t] < bk))
    }

    fn state_key(&self, pos: usize) -> u128 {
        let suffix = &self.suffix_sorted[pos];
        let mut key = pos as u128;
        key = (key << 4) | self.a_vals.len() as u128;
        key = (key << 4) | self.b_vals.len() as u128;
        for side in [&self.a_vals, &self.b_vals] {
            for &v in side.iter() {
                let rank = suffix.partition_point(|&s| s < v);
                key = (key << 4) | rank as u128;
            }
            for &v in side.iter() {
                let below = side.iter().filter(|&&u| u < v).count();
                key = (key << 4) | below as u128;
            }
        }
        key
    }

    fn dfs(&mut self, pos: usize) -> bool {
        if self.a_vals.len() == self.target && self.b_vals.len() == self.target {
            return true;
        }
        if pos == self.values.len() || self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.exhausted = true;
            return false;
        }
        let need = (self.target - self.a_vals.len()) + (self.target - self.b_vals.len());
        if need > self.values.len() - pos {
            return false;
        }
        let key = self.state_key(pos);
        if self.failed.contains(&key) {
            return false;
        }
        let v = self.values[pos];
        if self.a_vals.len() < self.target {
            let k = self.a_vals.len();
            // Pair k settles now only if the second side already holds b_k.
            if k >= self.b_vals.len() || self.consistent(k, v, self.b_vals[k]) {
                self.a_vals.push(v);
                self.a_pos.push(pos as u32 + 1);
                if self.dfs(pos + 1) {
                    return true;
                }
                self.a_vals.pop();
                self.a_pos.pop();
            }
        }
        // Swapping the two sides preserves twins, so the first assigned
        // element is pinned to the first side.
        if self.b_vals.len() < self.target && !self.a_vals.is_empty() {
            let k = self.b_vals.len();
            if k >= self.a_vals.len() || self.consistent(k, self.a_vals[k], v) {
                self.b_vals.push(v);
                self.b_pos.push(pos as u32 + 1);
                if self.dfs(pos + 1) {
                    return true;
                }
                self.b_vals.pop();
                self.b_pos.pop();
            }
        }
        if self.dfs(pos + 1) {
            return true;
        }
        if !self.exhausted {
            self.failed.insert(key);
        }
        false
    }
}

/// Longest twins in `p` by descending-target search from `len/2`.
///
/// Each target gets a fresh node budget; an abandoned target clears the
/// `optimal` flag and the search moves on, so the returned pair is the best
/// the budget could certify. The pair always verifies.
pub fn exact_twins(p: &Permutation, budget: &OracleBudget) -> Result<ExactOutcome> {
    if p.len() > budget.max_length_single {
        return Err(Error::ExactSearchCapExceeded {
            len: p.len(),
            cap: budget.max_length_single,
        });
    }
    let mut nodes = 0u64;
    let mut optimal = true;
    let mut witness: Option<(Vec<u32>, Vec<u32>)> = None;
    for target in (1..=p.len() / 2).rev() {
        let mut search = Search::new(p.values(), target, budget.node_limit);
        let attempt = search.run();
        nodes += search.nodes;
        match attempt {
            Attempt::Found(a, b) => {
                witness = Some((a, b));
                break;
            }
            Attempt::Exhausted => optimal = false,
            Attempt::Impossible => {}
        }
    }
    let (a, b) = witness.unwrap_or_default();
    let pair = TwinPair {
        host: p.clone(),
        first: PositionSubsequence::new(a)?,
        second: PositionSubsequence::new(b)?,
        closeness_bound: None,
    };
    debug_assert_eq!(verify_twins(&pair)?, None);
    Ok(ExactOutcome {
        pair,
        optimal,
        nodes,
    })
}

/// Minimum over all permutations of `[1, n]` of the longest twin length,
/// with a lexicographically smallest minimizer as witness.
#[derive(Clone, Debug)]
pub struct UniversalOutcome {
    pub value: u64,
    pub witness: Permutation,
    /// Orbit representatives actually searched.
    pub examined: u64,
}

fn next_permutation(vals: &mut [u32]) -> bool {
    if vals.len() < 2 {
        return false;
    }
    let mut i = vals.len() - 1;
    while i > 0 && vals[i - 1] >= vals[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = vals.len() - 1;
    while vals[j] <= vals[i - 1] {
        j -= 1;
    }
    vals.swap(i - 1, j);
    vals[i..].reverse();
    true
}

/// Reversal and complement both preserve twin length, so only the lex-least
/// member of each four-element orbit is searched.
fn is_orbit_representative(vals: &[u32], n: u32) -> bool {
    let rev = |i: usize| vals[vals.len() - 1 - i];
    let comp = |i: usize| n + 1 - vals[i];
    let revcomp = |i: usize| n + 1 - vals[vals.len() - 1 - i];
    for i in 0..vals.len() {
        if rev(i) != vals[i] {
            if rev(i) < vals[i] {
                return false;
            }
            break;
        }
    }
    for i in 0..vals.len() {
        if comp(i) != vals[i] {
            if comp(i) < vals[i] {
                return false;
            }
            break;
        }
    }
    for i in 0..vals.len() {
        if revcomp(i) != vals[i] {
            if revcomp(i) < vals[i] {
                return false;
            }
            break;
        }
    }
    true
}

/// Exhausts every permutation of `[1, n]`. Any abandoned search poisons the
/// minimum, so a blown node budget is an error here rather than a flag.
pub fn exact_t_of_n(n: u32, budget: &OracleBudget) -> Result<UniversalOutcome> {
    if n > budget.max_n_universal {
        return Err(Error::ExactSearchCapExceeded {
            len: n as usize,
            cap: budget.max_n_universal as usize,
        });
    }
    if n < 2 {
        return Ok(UniversalOutcome {
            value: 0,
            witness: Permutation::identity(n),
            examined: 1,
        });
    }
    let mut reps: Vec<Vec<u32>> = Vec::new();
    let mut vals: Vec<u32> = (1..=n).collect();
    loop {
        if is_orbit_representative(&vals, n) {
            reps.push(vals.clone());
        }
        if !next_permutation(&mut vals) {
            break;
        }
    }
    let examined = reps.len() as u64;
    let searched: Vec<(usize, Vec<u32>)> = reps
        .into_par_iter()
        .map(|vals| {
            let p = Permutation::from_parts_unchecked(vals.clone(), n);
            let out = exact_twins(&p, budget)?;
            if !out.optimal {
                return Err(Error::BudgetExhausted {
                    limit: budget.node_limit,
                    visited: out.nodes,
                });
            }
            Ok((out.pair.len(), vals))
        })
        .collect::<Result<_>>()?;
    let best = searched
        .into_iter()
        .min()
        .expect("n >= 2 leaves at least one representative");
    Ok(UniversalOutcome {
        value: best.0 as u64,
        witness: Permutation::from_parts_unchecked(best.1, n),
        examined,
    })
}

/// One row of a scaling probe: twin-length statistics at a single size.
#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub n: u32,
    pub trials: u32,
    pub mean: f64,
    pub min: u64,
    pub max: u64,
}

/// Least-squares slope of log(mean length) against log(n).
#[derive(Clone, Copy, Debug)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    pub exponent: Option<ExponentFit>,
}

/// Measures `twin_len` on `trials` uniform hosts at each size and fits a
/// power law through the means. Informational: the fit carries a standard
/// error, not a guarantee. Trial seeds are `mix([master_seed, n, trial])`.
pub fn scaling_probe<F>(
    ns: &[u32],
    trials: u32,
    master_seed: u64,
    twin_len: F,
) -> Result<ProbeReport>
where
    F: Fn(&Permutation) -> Result<usize>,
{
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut sum = 0u64;
        let mut min = u64::MAX;
        let mut max = 0u64;
        for trial in 0..trials {
            let seed = crate::gen::mix(&[master_seed, u64::from(n), u64::from(trial)]);
            let p = crate::gen::uniform(n, seed);
            let len = twin_len(&p)? as u64;
            sum += len;
            min = min.min(len);
            max = max.max(len);
        }
        rows.push(ProbeRow {
            n,
            trials,
            mean: if trials == 0 {
                0.0
            } else {
                sum as f64 / f64::from(trials)
            },
            min: if trials == 0 { 0 } else { min },
            max,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 2 && r.mean > 0.0)
        .map(|r| (f64::from(r.n).ln(), r.mean.ln()))
        .collect();
    let mut distinct: Vec<u64> = pts.iter().map(|p| p.0.to_bits()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let exponent = if distinct.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let stderr = if pts.len() > 2 {
            let rss: f64 = pts
                .iter()
                .map(|p| {
                    let fit = my + slope * (p.0 - mx);
                    (p.1 - fit) * (p.1 - fit)
                })
                .sum();
            (rss / (k - 2.0) / sxx).sqrt()
        } else {
            0.0
        };
        Some(ExponentFit { slope, stderr })
    } else {
        None
    };
    Ok(ProbeReport { rows, exponent })
}

/// Quadratic reference for the longest monotone subsequence length.
pub fn lis_length_quadratic(values: &[u32], increasing: bool) -> usize {
    let m = values.len();
    let mut best = vec![1usize; m];
    let mut ans = 0;
    for i in 0..m {
        for j in 0..i {
            let ok = if increasing {
                values[j] < values[i]
            } else {
                values[j] > values[i]
            };
            if ok && best[j] + 1 > best[i] {
                best[i] = best[j] + 1;
            }
        }
        ans = ans.max(best[i]);
    }
    if m == 0 {
        0
    } else {
        ans
    }
}

/// Exponential reference for the longest common subsequence of two small
/// sequences: classic table, no symbol-set assumptions.
pub fn lcs_length_table(x: &[u32], y: &[u32]) -> usize {
    let mut row = vec![0usize; y.len() + 1];
    for &xv in x {
        let mut diag = 0;
        for (j, &yv) in y.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if xv == yv {
                diag + 1
            } else {
                up.max(row[j])
            };
            diag = up;
        }
    }
    row[y.len()]
}

/// Bitmask reference for maximum bipartite matching, rows and columns in
/// `[1, r]` with r small.
pub fn max_matching_bitmask(edges: &[(u32, u32)], r: u32) -> usize {
    assert!(r <= 16, "bitmask referee only handles r <= 16");
    let mut adj = vec![0u32; r as usize + 1];
    for &(i, j) in edges {
        assert!(i >= 1 && i <= r && j >= 1 && j <= r);
        adj[i as usize] |= 1 << (j - 1);
    }
    // best[mask] = max matching using only columns inside mask, rows scanned
    // outermost.
    let mut best = vec![0u8; 1 << r];
    for i in 1..=r as usize {
        let prev = best.clone();
        for mask in 0..(1u32 << r) {
            let mut b = prev[mask as usize];
            let mut avail = adj[i] & mask;
            while avail != 0 {
                let j = avail & avail.wrapping_neg();
                avail ^= j;
                b = b.max(prev[(mask ^ j) as usize] + 1);
            }
            best[mask as usize] = best[mask as usize].max(b);
        }
    }
    best[(1usize << r) - 1] as usize
}
