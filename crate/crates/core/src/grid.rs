//! Grid blocking and bipartite matching for long twins in typical inputs.
//!
//! The host's points `(t, p_t)` are bucketed into an `r x r` grid of blocks,
//! `r = ceil(n^(2/3))`, position-block `ceil(t*r/n)` by value-block
//! `ceil(p_t*r/n)`. A cell holding two or more points is an edge of a
//! bipartite graph between position-blocks and value-blocks. Any matching in
//! that graph converts to twins of the matching's size: per matched cell take
//! its two earliest points, sending the earlier to the first twin. Across
//! cells, positions follow the position-block order and both twins' values
//! follow the value-block order, so the two selections are order-isomorphic
//! and disjoint.
//!
//! For a uniform random host the expected fraction of cells that are edges
//! is about `n^(-2/3)/9`, which makes the matching, and hence the twins,
//! grow like `n^(2/3)` with high probability; `guarantee_threshold` exposes
//! the conventional `ceil(n^(2/3)/80)` yardstick used by the statistical
//! acceptance tests.

use crate::arith::{ceil_div, ceil_root};
use crate::error::{Error, Result};
use crate::perm::{verify_twins, Permutation, PositionSubsequence, TwinPair};

/// One nonempty grid cell: `start..start+len` indexes the model's points.
#[derive(Clone, Copy, Debug)]
pub struct CellRef {
    pub i: u32,
    pub j: u32,
    start: u32,
    len: u32,
}

/// The blocked host: every point in exactly one cell, cells sorted by
/// `(i, j)`, points inside a cell sorted by position.
#[derive(Clone, Debug)]
pub struct GridModel {
    /// Blocks per side.
    pub r: u64,
    host: Permutation,
    /// `(position, value)` pairs grouped by cell.
    points: Vec<(u32, u32)>,
    cells: Vec<CellRef>,
}

impl GridModel {
    pub fn host(&self) -> &Permutation {
        &self.host
    }

    /// Ground bound the blocks were computed from.
    pub fn n(&self) -> u32 {
        self.host.ground_bound()
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellRef, &[(u32, u32)])> {
        self.cells.iter().map(move |&c| (c, self.cell_points(c)))
    }

    pub fn cell_points(&self, c: CellRef) -> &[(u32, u32)] {
        &self.points[c.start as usize..(c.start + c.len) as usize]
    }

    /// Cells holding at least two points, as `(i, j)` pairs in cell order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.cells
            .iter()
            .filter(|c| c.len >= 2)
            .map(|c| (c.i, c.j))
    }

    pub fn edge_count(&self) -> usize {
        self.cells.iter().filter(|c| c.len >= 2).count()
    }

    pub fn find_cell(&self, i: u32, j: u32) -> Option<&[(u32, u32)]> {
        let idx = self
            .cells
            .binary_search_by_key(&(i, j), |c| (c.i, c.j))
            .ok()?;
        Some(self.cell_points(self.cells[idx]))
    }
}

/// Blocks the host into `ceil(n^(2/3))` intervals per side.
pub fn build_grid(p: &Permutation) -> GridModel {
    let r = ceil_root((p.ground_bound() as u128) * (p.ground_bound() as u128), 3);
    build_grid_with_r(p, r)
}

/// The same blocking with an explicit block count (exposed for small worked
/// examples and experiments).
pub fn build_grid_with_r(p: &Permutation, r: u64) -> GridModel {
    let n = p.ground_bound() as u64;
    let m = p.len();
    debug_assert!(r <= n, "more blocks than values");
    let block = |t: u64| -> u64 {
        debug_assert!(t >= 1 && t <= n);
        ceil_div(t * r, n)
    };
    // (i, j, position) packed for one flat sort; cells come out contiguous.
    let mut keys: Vec<u128> = Vec::with_capacity(m);
    for (t0, &v) in p.values().iter().enumerate() {
        let t = t0 as u64 + 1;
        let i = block(t);
        let j = block(v as u64);
        keys.push((i as u128) << 64 | (j as u128) << 32 | t as u128);
    }
    keys.sort_unstable();
    let mut points: Vec<(u32, u32)> = Vec::with_capacity(m);
    let mut cells: Vec<CellRef> = Vec::new();
    for &key in &keys {
        let i = (key >> 64) as u32;
        let j = (key >> 32) as u32;
        let t = key as u32;
        let v = p.values()[t as usize - 1];
        match cells.last_mut() {
            Some(c) if c.i == i && c.j == j => c.len += 1,
            _ => cells.push(CellRef {
                i,
                j,
                start: points.len() as u32,
                len: 1,
            }),
        }
        points.push((t, v));
    }
    GridModel {
        r,
        host: p.clone(),
        points,
        cells,
    }
}

/// Row- and column-distinct edge set, sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(u32, u32)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks row/column distinctness and that every pair is an edge of `g`.
    pub fn is_valid_for(&self, g: &GridModel) -> bool {
        let mut rows: Vec<u32> = self.pairs.iter().map(|&(i, _)| i).collect();
        let mut cols: Vec<u32> = self.pairs.iter().map(|&(_, j)| j).collect();
        rows.sort_unstable();
        cols.sort_unstable();
        let distinct = |v: &[u32]| v.windows(2).all(|w| w[0] != w[1]);
        distinct(&rows)
            && distinct(&cols)
            && self
                .pairs
                .iter()
                .all(|&(i, j)| g.find_cell(i, j).is_some_and(|pts| pts.len() >= 2))
    }
}

/// The halving procedure: while at least half of each side is live, take the
/// lowest live row; match it to its lowest live neighbor column if it has
/// one, otherwise discard it together with the lowest live column. Fully
/// deterministic; returns the matched pairs only.
pub fn greedy_matching(g: &GridModel) -> Matching {
    let r = g.r as usize;
    if r == 0 {
        return Matching { pairs: Vec::new() };
    }
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); r + 1];
    for (i, j) in g.edges() {
        adjacency[i as usize].push(j);
    }
    let mut live_row = vec![true; r + 1];
    let mut live_col = vec![true; r + 1];
    let mut live = r;
    let mut next_row = 1usize;
    let mut next_col = 1usize;
    let mut pairs = Vec::new();
    while live > 0 && 2 * live >= r {
        while !live_row[next_row] {
            next_row += 1;
        }
        let v = next_row;
        let matched = adjacency[v].iter().copied().find(|&j| live_col[j as usize]);
        let u = match matched {
            Some(j) => {
                pairs.push((v as u32, j));
                j as usize
            }
            None => {
                while !live_col[next_col] {
                    next_col += 1;
                }
                next_col
            }
        };
        live_row[v] = false;
        live_col[u] = false;
        live -= 1;
    }
    Matching { pairs }
}

const NIL: u32 = u32::MAX;

/// Maximum-cardinality matching over the grid's edges, by repeated phases of
/// layered BFS plus shortest augmenting paths (each phase augments a maximal
/// disjoint set of shortest paths, giving the O(E sqrt(V)) bound).
pub fn max_matching(g: &GridModel) -> Matching {
    let edges: Vec<(u32, u32)> = g.edges().collect();
    max_matching_of_edges(&edges)
}

/// The matching engine on a bare edge list (rows and columns are arbitrary
/// labels).
pub fn max_matching_of_edges(edges: &[(u32, u32)]) -> Matching {
    if edges.is_empty() {
        return Matching { pairs: Vec::new() };
    }
    let mut rows: Vec<u32> = edges.iter().map(|&(i, _)| i).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut cols: Vec<u32> = edges.iter().map(|&(_, j)| j).collect();
    cols.sort_unstable();
    cols.dedup();
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); rows.len()];
    for &(i, j) in edges {
        let u = rows.binary_search(&i).expect("row came from edges");
        let v = cols.binary_search(&j).expect("column came from edges");
        adjacency[u].push(v as u32);
    }
    for a in adjacency.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }

    let (nl, nr) = (rows.len(), cols.len());
    let mut pair_row = vec![NIL; nl];
    let mut pair_col = vec![NIL; nr];
    let mut dist = vec![u32::MAX; nl];
    let mut queue = std::collections::VecDeque::new();

    loop {
        // BFS layers from free rows; stop the layering at the depth of the
        // first free column found.
        queue.clear();
        let mut reachable_free = false;
        for u in 0..nl {
            if pair_row[u] == NIL {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut limit = u32::MAX;
        while let Some(u) = queue.pop_front() {
            let u = u as usize;
            if dist[u] >= limit {
                continue;
            }
            for &v in &adjacency[u] {
                let w = pair_col[v as usize];
                if w == NIL {
                    reachable_free = true;
                    limit = dist[u] + 1;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !reachable_free {
            break;
        }
        for u in 0..nl {
            if pair_row[u] == NIL {
                augment(u, &adjacency, &mut pair_row, &mut pair_col, &mut dist);
            }
        }
    }

    let mut pairs: Vec<(u32, u32)> = (0..nl)
        .filter(|&u| pair_row[u] != NIL)
        .map(|u| (rows[u], cols[pair_row[u] as usize]))
        .collect();
    pairs.sort_unstable();
    Matching { pairs }
}

fn augment(
    u: usize,
    adjacency: &[Vec<u32>],
    pair_row: &mut [u32],
    pair_col: &mut [u32],
    dist: &mut [u32],
) -> bool {
    for idx in 0..adjacency[u].len() {
        let v = adjacency[u][idx] as usize;
        let w = pair_col[v];
        if w == NIL
            || (dist[w as usize] == dist[u].wrapping_add(1)
                && augment(w as usize, adjacency, pair_row, pair_col, dist))
        {
            pair_row[u] = v as u32;
            pair_col[v] = u as u32;
            return true;
        }
    }
    // Dead end: exclude from this phase.
    dist[u] = u32::MAX;
    false
}

/// Converts a matching into twins: per matched cell, the two earliest
/// points; earlier position to the first twin. Cells are taken in row order.
pub fn matching_to_twins(g: &GridModel, m: &Matching) -> Result<TwinPair> {
    let mut pairs = m.pairs.clone();
    pairs.sort_unstable();
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InvalidSpec {
                reason: format!("matching reuses row {}", w[0].0),
            });
        }
    }
    let mut cols: Vec<u32> = pairs.iter().map(|&(_, j)| j).collect();
    cols.sort_unstable();
    for w in cols.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidSpec {
                reason: format!("matching reuses column {}", w[0]),
            });
        }
    }
    let mut first = Vec::with_capacity(pairs.len());
    let mut second = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let points = g
            .find_cell(i, j)
            .filter(|pts| pts.len() >= 2)
            .ok_or(Error::CellUnderfilled { i, j })?;
        first.push(points[0].0);
        second.push(points[1].0);
    }
    let pair = TwinPair::new(
        g.host().clone(),
        PositionSubsequence::new(first)?,
        PositionSubsequence::new(second)?,
        None,
    );
    debug_assert_eq!(verify_twins(&pair).unwrap(), None);
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Matcher {
    Greedy,
    Maximum,
}

/// Grid pipeline: block, match, extract twins.
pub fn grid_twins(p: &Permutation, matcher: Matcher) -> Result<TwinPair> {
    let g = build_grid(p);
    let m = match matcher {
        Matcher::Greedy => greedy_matching(&g),
        Matcher::Maximum => max_matching(&g),
    };
    matching_to_twins(&g, &m)
}

/// The `ceil(n^(2/3)/80)` yardstick for random hosts.
pub fn guarantee_threshold(n: u32) -> u64 {
    let r = ceil_root((n as u128) * (n as u128), 3);
    ceil_div(r, 80)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(values: &[u32]) -> Permutation {
        Permutation::from_values(values.to_vec()).unwrap()
    }

    fn shuffled(n: u32, seed: u64) -> Permutation {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<u32> = (1..=n).collect();
        values.shuffle(&mut rng);
        Permutation::from_values(values).unwrap()
    }

    /// Matcher-logic fixture: a grid whose edge set is given directly. The
    /// synthetic host places two points per edge on disjoint slots (position
    /// slot picked by column, value slot by row, so neither coordinate ever
    /// repeats). Only matcher routines should consume it.
    fn grid_from_edges(r: u64, edges: &[(u32, u32)]) -> GridModel {
        let width = 4 * r as u32;
        let n = width * r as u32;
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        let mut points = Vec::new();
        let mut cells = Vec::new();
        for &(i, j) in &sorted {
            let t = (i - 1) * width + 2 * (j - 1);
            let v = (j - 1) * width + 2 * (i - 1);
            cells.push(CellRef {
                i,
                j,
                start: points.len() as u32,
                len: 2,
            });
            points.push((t + 1, v + 1));
            points.push((t + 2, v + 2));
        }
        let mut host_values: Vec<(u32, u32)> = points.clone();
        host_values.sort_unstable();
        let host = Permutation::new(host_values.into_iter().map(|(_, v)| v).collect(), n)
            .expect("synthetic slots are distinct");
        GridModel {
            r,
            host,
            points,
            cells,
        }
    }

    #[test]
    fn block_formula_matches_the_interval_definition() {
        // Block i covers exactly the t with (i-1)*n < t*r <= i*n.
        for n in 1u64..=300 {
            let r = ceil_root((n * n) as u128, 3);
            for t in 1..=n {
                let i = ceil_div(t * r, n);
                assert!((i - 1) * n < t * r && t * r <= i * n, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn grid_reference_cases() {
        let p = perm(&[2, 1, 4, 3]);
        let g = build_grid(&p);
        assert_eq!(g.r, 3);
        assert_eq!(g.point_count(), 4);
        assert!(g.cells().all(|(_, pts)| pts.len() <= 2));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(3, 3)]);

        let g = build_grid_with_r(&p, 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 1), (2, 2)]);
        assert_eq!(g.find_cell(1, 1), Some(&[(1, 2), (2, 1)][..]));
        assert_eq!(g.find_cell(2, 2), Some(&[(3, 4), (4, 3)][..]));
        assert_eq!(g.find_cell(1, 2), None);

        let empty = build_grid(&perm(&[]));
        assert_eq!(empty.point_count(), 0);
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn partition_is_exact() {
        for seed in 0..10 {
            let p = shuffled(500, seed);
            let g = build_grid(&p);
            let total: usize = g.cells().map(|(_, pts)| pts.len()).sum();
            assert_eq!(total, 500);
            for (_, pts) in g.cells() {
                assert!(!pts.is_empty());
                for w in pts.windows(2) {
                    assert!(w[0].0 < w[1].0);
                }
            }
        }
    }

    #[test]
    fn greedy_matching_reference_cases() {
        let g = grid_from_edges(2, &[(1, 1), (2, 2)]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 1), (2, 2)]);
        let m = greedy_matching(&g);
        assert_eq!(m.pairs, vec![(1, 1), (2, 2)]);
        assert!(m.is_valid_for(&g));

        let empty = build_grid(&perm(&[]));
        assert_eq!(greedy_matching(&empty).len(), 0);

        // Complete bipartite r x r: the procedure stops at the half floor.
        for r in [4u64, 5] {
            let mut edges = Vec::new();
            for i in 1..=r as u32 {
                for j in 1..=r as u32 {
                    edges.push((i, j));
                }
            }
            let g = grid_from_edges(r, &edges);
            assert_eq!(g.edge_count(), (r * r) as usize);
            let m = greedy_matching(&g);
            assert!(m.len() as u64 >= ceil_div(r, 2), "r={r}: {}", m.len());
            assert!(m.is_valid_for(&g));
        }

        // A row with no live neighbor burns the lowest live column.
        let g = grid_from_edges(4, &[(2, 1), (3, 1)]);
        let m = greedy_matching(&g);
        // Row 1 discards column 1; rows 2 and 3 then have no live neighbor.
        assert_eq!(m.pairs, vec![]);
    }

    #[test]
    fn max_matching_reference_cases() {
        let g = grid_from_edges(2, &[(1, 1), (1, 2), (2, 1)]);
        let m = max_matching(&g);
        assert_eq!(m.len(), 2);
        assert!(m.is_valid_for(&g));
        assert_eq!(max_matching(&build_grid(&perm(&[]))).len(), 0);
        // A 6-edge path: maximum is 3; maximum never loses to greedy.
        let g = grid_from_edges(4, &[(1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3)]);
        let mm = max_matching(&g);
        assert_eq!(mm.len(), 3);
        assert!(mm.is_valid_for(&g));
        assert!(mm.len() >= greedy_matching(&g).len());
    }

    #[test]
    fn matching_to_twins_reference_case() {
        let p = perm(&[2, 1, 4, 3]);
        let g = build_grid_with_r(&p, 2);
        let m = Matching {
            pairs: vec![(1, 1), (2, 2)],
        };
        let t = matching_to_twins(&g, &m).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.first.positions(), &[1, 3]);
        assert_eq!(t.second.positions(), &[2, 4]);
        assert_eq!(t.first.values_in(&t.host).unwrap(), vec![2, 4]);
        assert_eq!(t.second.values_in(&t.host).unwrap(), vec![1, 3]);
        assert_eq!(verify_twins(&t).unwrap(), None);

        let bad = Matching {
            pairs: vec![(1, 2)],
        };
        assert!(matches!(
            matching_to_twins(&g, &bad),
            Err(Error::CellUnderfilled { i: 1, j: 2 })
        ));
        let dup = Matching {
            pairs: vec![(1, 1), (1, 2)],
        };
        assert!(matching_to_twins(&g, &dup).is_err());
    }

    #[test]
    fn identity_host_fills_the_diagonal() {
        let n = 10_000u32;
        let p = Permutation::identity(n);
        let g = build_grid(&p);
        assert_eq!(g.r, 465);
        // Every diagonal cell holds ~n/r >= 2 points, so the maximum
        // matching takes all r of them and the greedy one stops at the half
        // floor.
        let t = grid_twins(&p, Matcher::Maximum).unwrap();
        assert_eq!(t.len(), 465);
        assert_eq!(verify_twins(&t).unwrap(), None);
        let tg = grid_twins(&p, Matcher::Greedy).unwrap();
        assert_eq!(tg.len(), 233);
        assert_eq!(verify_twins(&tg).unwrap(), None);
    }

    #[test]
    fn guarantee_threshold_values() {
        assert_eq!(guarantee_threshold(1_000_000), 125);
        assert_eq!(guarantee_threshold(10_000), 6);
        assert_eq!(guarantee_threshold(0), 0);
    }

    #[test]
    fn random_hosts_round_trip() {
        for seed in 0..5 {
            let p = shuffled(3_000, seed);
            let g = build_grid(&p);
            let mm = max_matching(&g);
            assert!(mm.is_valid_for(&g));
            let gm = greedy_matching(&g);
            assert!(gm.is_valid_for(&g));
            assert!(mm.len() >= gm.len());
            let t = matching_to_twins(&g, &mm).unwrap();
            assert_eq!(t.host, p);
            assert_eq!(t.len(), mm.len());
            assert_eq!(verify_twins(&t).unwrap(), None);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sub_matchings_always_give_valid_twins(seed in 0u64..10_000, n in 20u32..400) {
            let p = shuffled(n, seed);
            let g = build_grid(&p);
            // Greedily keep a shuffled subset of edges with distinct rows
            // and columns.
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
            let mut edges: Vec<(u32, u32)> = g.edges().collect();
            edges.shuffle(&mut rng);
            let mut rows = std::collections::HashSet::new();
            let mut cols = std::collections::HashSet::new();
            let mut pairs = Vec::new();
            for (i, j) in edges {
                if !rows.contains(&i) && !cols.contains(&j) {
                    rows.insert(i);
                    cols.insert(j);
                    pairs.push((i, j));
                }
            }
            let m = Matching { pairs };
            prop_assert!(m.is_valid_for(&g));
            let t = matching_to_twins(&g, &m).unwrap();
            prop_assert_eq!(verify_twins(&t).unwrap(), None);
            prop_assert_eq!(t.len(), m.len());
        }
    }
}
