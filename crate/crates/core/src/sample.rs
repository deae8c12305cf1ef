//! Poisson-process sampling on the unit square and the point-set view of a
//! permutation.
//!
//! A set of plane points with distinct x and distinct y coordinates induces a
//! permutation: sort by x, read off y-ranks. Coordinate collisions have
//! probability zero under the continuous model; they are still handled, by
//! resampling the offending coordinate until the set is in general position.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::oracle::{exact_twins, OracleBudget};
use crate::perm::Permutation;

/// Points in general position: all x distinct, all y distinct.
#[derive(Clone, Debug)]
pub struct PlanePointSet {
    points: Vec<(f64, f64)>,
}

impl PlanePointSet {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, y) in &points {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidSpec {
                    reason: "point coordinates must be finite".into(),
                });
            }
        }
        if has_duplicate(points.iter().map(|p| p.0)) || has_duplicate(points.iter().map(|p| p.1)) {
            return Err(Error::InvalidSpec {
                reason: "point set is not in general position".into(),
            });
        }
        Ok(PlanePointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

fn has_duplicate(coords: impl Iterator<Item = f64>) -> bool {
    let mut sorted: Vec<f64> = coords.collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted.windows(2).any(|w| w[0] == w[1])
}

const RESAMPLE_SWEEP_LIMIT: u32 = 64;

fn resample_until_distinct<R: Rng>(
    coords: &mut [f64],
    rng: &mut R,
    axis: &str,
) -> Result<()> {
    for _ in 0..RESAMPLE_SWEEP_LIMIT {
        let mut order: Vec<usize> = (0..coords.len()).collect();
        order.sort_by(|&a, &b| coords[a].total_cmp(&coords[b]));
        let mut clashed = false;
        for w in order.windows(2) {
            if coords[w[0]] == coords[w[1]] {
                coords[w[1]] = rng.gen();
                clashed = true;
            }
        }
        if !clashed {
            return Ok(());
        }
    }
    Err(Error::InvalidSpec {
        reason: format!("{axis} tie resolution did not converge"),
    })
}

/// Poisson(lambda) many uniform points on the unit square, forced into
/// general position.
pub fn sample_poisson_points(lambda: f64, seed: u64) -> Result<PlanePointSet> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidSpec {
            reason: format!("poisson intensity must be positive, got {lambda}"),
        });
    }
    if lambda > 5e7 {
        return Err(Error::InvalidSpec {
            reason: format!("poisson intensity {lambda} exceeds the supported range"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = Poisson::new(lambda)
        .map_err(|e| Error::InvalidSpec {
            reason: format!("poisson intensity rejected: {e}"),
        })?
        .sample(&mut rng) as usize;
    let mut xs: Vec<f64> = (0..count).map(|_| rng.gen()).collect();
    let mut ys: Vec<f64> = (0..count).map(|_| rng.gen()).collect();
    resample_until_distinct(&mut xs, &mut rng, "x")?;
    resample_until_distinct(&mut ys, &mut rng, "y")?;
    PlanePointSet::new(xs.into_iter().zip(ys).collect())
}

/// The permutation a point set induces: position by x-order, value by y-rank.
pub fn permutation_of_points(points: &PlanePointSet) -> Permutation {
    let n = points.len();
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by(|&a, &b| points.points[a].0.total_cmp(&points.points[b].0));
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_by(|&a, &b| points.points[a].1.total_cmp(&points.points[b].1));
    let mut y_rank = vec![0u32; n];
    for (rank, &idx) in by_y.iter().enumerate() {
        y_rank[idx] = rank as u32 + 1;
    }
    let values: Vec<u32> = by_x.into_iter().map(|idx| y_rank[idx]).collect();
    Permutation::from_parts_unchecked(values, n as u32)
}

/// Samples a Poisson point set and reads it as a permutation. The length is
/// itself random: Poisson(lambda).
pub fn sample_poisson_permutation(lambda: f64, seed: u64) -> Result<Permutation> {
    Ok(permutation_of_points(&sample_poisson_points(lambda, seed)?))
}

/// Checks that the longest twin length never decreases along the x-order
/// prefixes of a point set. Adding a point can only extend the host, so a
/// drop would falsify the search; this is a referee for the exact oracle on
/// nested hosts.
pub fn prefix_monotonicity_check(points: &PlanePointSet, budget: &OracleBudget) -> Result<bool> {
    if points.len() > budget.max_length_single {
        return Err(Error::ExactSearchCapExceeded {
            len: points.len(),
            cap: budget.max_length_single,
        });
    }
    let mut by_x: Vec<(f64, f64)> = points.points.clone();
    by_x.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut prev = 0usize;
    for k in 1..=by_x.len() {
        let prefix = &by_x[..k];
        let mut by_y: Vec<usize> = (0..k).collect();
        by_y.sort_by(|&a, &b| prefix[a].1.total_cmp(&prefix[b].1));
        let mut values = vec![0u32; k];
        for (rank, &idx) in by_y.iter().enumerate() {
            values[idx] = rank as u32 + 1;
        }
        let p = Permutation::from_parts_unchecked(values, k as u32);
        let out = exact_twins(&p, budget)?;
        if !out.optimal {
            return Err(Error::BudgetExhausted {
                limit: budget.node_limit,
                visited: out.nodes,
            });
        }
        if out.pair.len() < prev {
            return Ok(false);
        }
        prev = out.pair.len();
    }
    Ok(true)
}
