use liftlattice::census::{brute_force_census, classify_c4, explicit_census, voltage_census};
use liftlattice::certify::{construct, SearchOptions};
use liftlattice::entropy::{central_counts, d6_closed_form, LatticeSummary};
use liftlattice::graph::{build_root_unit_graph, validate, LabeledGraph};
use liftlattice::voltage::{build_base_graph, derived_torus, full_unit_graph, glue_full_unit_graphs};
use proptest::prelude::*;

fn certified(d: u32, seed: u64) -> (liftlattice::voltage::BaseGraph, liftlattice::voltage::VoltageAssignment) {
    let run = construct(d, SearchOptions::greedy(40, seed)).unwrap();
    assert!(run.verification.passed());
    run.certificate.assignment().unwrap()
}

#[test]
fn certified_tori_have_no_hexagons_or_stray_squares() {
    for (d, n) in [(5u32, 2u32), (5, 3), (6, 2)] {
        let (base, volt) = certified(d, 11);
        let torus = derived_torus(&base, &volt, n).unwrap();
        assert!(validate(&torus, Some(d as usize)).passed());
        let explicit = explicit_census(&torus);
        let per_cube = voltage_census(&base, &volt);
        let cubes = (n as u128).pow(3);
        assert_eq!(explicit.c6, 0, "d = {d}, n = {n}");
        assert_eq!(explicit.c4_total, per_cube.c4_total * cubes);
        assert_eq!(explicit.theta222, per_cube.theta222 * cubes);
        let (central, stray) = classify_c4(&torus).unwrap();
        assert_eq!(stray, 0);
        let copies = (1u64 << volt.level_bit_count()) * (n as u64).pow(3);
        assert_eq!(central, copies * central_counts(d as u64).0);
        let summary = LatticeSummary::from_census(&explicit, None);
        assert_eq!(summary.d6, d6_closed_form(d));
    }
}

#[test]
fn glued_certified_cubes_equal_the_derived_torus() {
    let (base, volt) = certified(5, 4);
    let volt = volt.truncated(3);
    let fug = full_unit_graph(&build_root_unit_graph(5).unwrap(), &volt).unwrap();
    for n in [2u32, 3] {
        assert_eq!(glue_full_unit_graphs(&fug, n).unwrap(), derived_torus(&base, &volt, n).unwrap());
    }
}

#[test]
fn every_degree_certifies_below_the_stage_cap() {
    for d in 5..=12u32 {
        let run = construct(d, SearchOptions::greedy(40, 0)).unwrap();
        assert!(run.verification.passed(), "d = {d}");
        let summary = LatticeSummary::from_census(&run.verification.census, None);
        assert_eq!(summary.d6, d6_closed_form(d));
    }
}

fn random_graph(n: usize, mask: &[bool]) -> LabeledGraph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let edges: Vec<(usize, usize)> = pairs.into_iter().zip(mask).filter(|(_, &keep)| keep).map(|(p, _)| p).collect();
    LabeledGraph::plain(n, &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_census_matches_subset_enumeration(n in 2usize..=10, mask in prop::collection::vec(any::<bool>(), 45)) {
        let g = random_graph(n, &mask);
        let fast = explicit_census(&g);
        let slow = brute_force_census(&g).unwrap();
        prop_assert_eq!((fast.c4_total, fast.c6, fast.theta222), (slow.c4_total, slow.c6, slow.theta222));
    }

    #[test]
    fn voltage_census_matches_explicit_torus(d in 5u32..=6, s in 0u32..=3, seed in any::<u64>(), n in 2u32..=3) {
        use rand::{Rng, SeedableRng};
        let (base, volt) = build_base_graph(d).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let bits = (0..base.edge_count())
            .map(|e| if base.is_central_edge(e) { 0 } else { rng.gen::<u64>() & ((1 << s) - 1) })
            .collect();
        let volt = volt.with_level_bits(&base, s, bits).unwrap();
        let torus = derived_torus(&base, &volt, n).unwrap();
        let explicit = explicit_census(&torus);
        let per_cube = voltage_census(&base, &volt);
        let cubes = (n as u128).pow(3);
        prop_assert_eq!(explicit.c4_total, per_cube.c4_total * cubes);
        prop_assert_eq!(explicit.c6, per_cube.c6 * cubes);
        prop_assert_eq!(explicit.theta222, per_cube.theta222 * cubes);
        prop_assert!(validate(&torus, Some(d as usize)).passed());
    }
}
