//! End-to-end runs at the sizes the guarantees are stated for. Slower than
//! the unit suites, still well under a minute together.

use permtwins_core::close_twins;
use permtwins_core::gen;
use permtwins_core::grid;
use permtwins_core::perm::Permutation;
use permtwins_core::verify_twins;

fn check_windowed(p: &Permutation, label: &str) {
    let n = p.len() as u32;
    let pair = close_twins::guaranteed_twins(p).unwrap();
    assert_eq!(verify_twins(&pair).unwrap(), None, "{label}");
    let floor = close_twins::guaranteed_length(n);
    assert!(
        pair.len() as u64 >= floor,
        "{label}: length {} under guarantee {floor}",
        pair.len()
    );
}

#[test]
fn windowed_construction_at_three_hundred_thousand() {
    for seed in 0..3u64 {
        let p = gen::uniform(300_000, gen::mix(&[91, seed]));
        check_windowed(&p, &format!("uniform seed {seed}"));
    }
    check_windowed(&Permutation::identity(300_000), "identity");
    check_windowed(&Permutation::identity(300_000).reversed(), "reverse");
    check_windowed(
        &gen::block_adversarial(300_000, 548).unwrap(),
        "block-adversarial",
    );
}

#[test]
fn windowed_construction_at_one_million() {
    let p = gen::uniform(1_000_000, gen::mix(&[92, 0]));
    check_windowed(&p, "uniform");
    // The windowed rounds alone clear their provable floor: every completed
    // round contributes exactly trim_target aligned entries.
    let params = close_twins::Params::for_ground_bound(1_000_000);
    let pair = close_twins::close_twins(&p).unwrap();
    assert!(
        pair.len() as u64 >= params.provable_rounds(1_000_000) * params.trim_target,
        "windowed length {}",
        pair.len()
    );
}

#[test]
fn grid_construction_at_one_million() {
    for seed in 0..2u64 {
        let p = gen::uniform(1_000_000, gen::mix(&[93, seed]));
        let pair = grid::grid_twins(&p, grid::Matcher::Maximum).unwrap();
        assert_eq!(verify_twins(&pair).unwrap(), None);
        assert!(
            pair.len() as u64 >= grid::guarantee_threshold(1_000_000),
            "seed {seed}: {} under threshold",
            pair.len()
        );
    }
}
