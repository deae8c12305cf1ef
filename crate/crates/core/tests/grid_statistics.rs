//! Distributional checks on the grid construction over uniform hosts. All
//! seeds are fixed, so the observed counts are reproducible exactly.

use permtwins_core::gen;
use permtwins_core::grid;

const N: u32 = 100_000;
const SEEDS: u64 = 20;

/// Occupied two-point cells are common enough: the empirical edge density
/// clears half of (1/9) n^(-2/3) for every seed. The true density sits near
/// n^(-2/3) / 2, so the factor-of-two slack leaves a wide moat.
#[test]
fn edge_density_at_scale() {
    let floor = (1.0 / 9.0) * f64::from(N).powf(-2.0 / 3.0) * 0.5;
    for seed in 0..SEEDS {
        let p = gen::uniform(N, gen::mix(&[401, seed]));
        let g = grid::build_grid(&p);
        let cells = (g.r as f64) * (g.r as f64);
        let density = g.edge_count() as f64 / cells;
        assert!(
            density >= floor,
            "seed {seed}: density {density:.3e} under floor {floor:.3e}"
        );
    }
}

/// The halving greedy keeps at least a seventh of the observed edges as
/// matches in at least 90 percent of runs (here: every fixed seed).
#[test]
fn greedy_beats_a_seventh_of_the_edges() {
    let mut hits = 0;
    for seed in 0..SEEDS {
        let p = gen::uniform(N, gen::mix(&[577, seed]));
        let g = grid::build_grid(&p);
        let greedy = grid::greedy_matching(&g);
        assert!(greedy.is_valid_for(&g));
        if greedy.len() as f64 >= g.edge_count() as f64 / 7.0 {
            hits += 1;
        }
    }
    assert!(
        hits * 10 >= SEEDS * 9,
        "greedy met the edge fraction in only {hits}/{SEEDS} runs"
    );
}

/// The maximum matcher never loses to greedy, and both translate into valid
/// twins at this scale.
#[test]
fn matchers_are_consistent_at_scale() {
    let p = gen::uniform(N, gen::mix(&[713, 0]));
    let g = grid::build_grid(&p);
    let greedy = grid::greedy_matching(&g);
    let maximum = grid::max_matching(&g);
    assert!(maximum.len() >= greedy.len());
    let twins = grid::matching_to_twins(&g, &maximum).unwrap();
    assert_eq!(twins.len(), maximum.len());
    assert_eq!(permtwins_core::verify_twins(&twins).unwrap(), None);
    assert!(twins.len() as u64 >= grid::guarantee_threshold(N));
}
