//! Acceptance suite. Run with
//! `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use liftlattice::census::{brute_force_census, explicit_census, voltage_census};
use liftlattice::certify::{construct, verify_certificate, LiftCertificate, SearchOptions};
use liftlattice::embed::{default_resolution, find_good_try, is_good_try, lattice_properties};
use liftlattice::entropy::{central_counts, d6_closed_form, min_degree_for_kappa, LatticeSummary};
use liftlattice::graph::{build_root_unit_graph, validate, LabeledGraph};
use liftlattice::rational::{integer, ratio};
use liftlattice::voltage::{
    build_base_graph, derived_torus, full_unit_graph, voltage_group_generated, BaseGraph, VoltageAssignment,
};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_S: u32 = 40;
const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn complete_bipartite_2(d: usize) -> LabeledGraph {
    let edges: Vec<(usize, usize)> = (0..d).flat_map(|i| [(0, 2 + i), (1, 2 + i)]).collect();
    LabeledGraph::plain(d + 2, &edges).unwrap()
}

fn random_bits(base: &BaseGraph, s: u32, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..base.edge_count())
        .map(|e| if base.is_central_edge(e) { 0 } else { rng.gen::<u64>() & ((1u64 << s) - 1) })
        .collect()
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut ok = true;
    for d in 5..=9u64 {
        let report = brute_force_census(&complete_bipartite_2(d as usize)).unwrap();
        let (c4, theta) = central_counts(d);
        ok &= report.c4_total == c4 as u128 && report.theta222 == theta as u128 && report.c6 == 0;
    }
    let elapsed = started.elapsed();
    outcome(ok && elapsed < Duration::from_secs(1), format!("K2,d for d = 5..9 in {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = rng.gen_range(4..=12usize);
        let p = rng.gen_range(0.2..0.8);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
        let g = LabeledGraph::plain(n, &edges).unwrap();
        let fast = explicit_census(&g);
        let slow = brute_force_census(&g).unwrap();
        if (fast.c4_total, fast.c6, fast.theta222) != (slow.c4_total, slow.c6, slow.theta222) {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(30),
        format!("100 random graphs, {mismatches} mismatches, {elapsed:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut ok = true;
    for d in [5u32, 6] {
        let (base, volt) = build_base_graph(d).unwrap();
        for s in 1..=3u32 {
            for _ in 0..10 {
                let volt = volt.with_level_bits(&base, s, random_bits(&base, s, &mut rng)).unwrap();
                let per_cube = voltage_census(&base, &volt);
                for n in [2u32, 3] {
                    let torus = explicit_census(&derived_torus(&base, &volt, n).unwrap());
                    let cubes = (n as u128).pow(3);
                    ok &= torus.c4_total == per_cube.c4_total * cubes
                        && torus.c6 == per_cube.c6 * cubes
                        && torus.theta222 == per_cube.theta222 * cubes;
                    checked += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    outcome(ok && elapsed < Duration::from_secs(120), format!("{checked} torus comparisons in {elapsed:.2?}"))
}

struct Certified {
    certificate: LiftCertificate,
    base: BaseGraph,
    volt: VoltageAssignment,
    summary: LatticeSummary,
    elapsed: Duration,
    reverified: bool,
}

fn certify(d: u32) -> Certified {
    let started = Instant::now();
    let run = construct(d, SearchOptions::greedy(MAX_S, SEED)).expect("search within the stage budget");
    let elapsed = started.elapsed();
    // Fresh re-check from the serialized certificate, through the pairing enumeration.
    let certificate = LiftCertificate::from_json(&run.certificate.to_json().unwrap()).unwrap();
    let (base, volt) = certificate.assignment().unwrap();
    let verification = verify_certificate(&base, &volt);
    let reverified = run.verification.passed() && verification.passed() && certificate.flags.all();
    let summary = LatticeSummary::from_census(&verification.census, None);
    Certified { certificate, base, volt, summary, elapsed, reverified }
}

fn criterion_4(lattices: &BTreeMap<u32, Certified>) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for d in [5u32, 10] {
        let c = &lattices[&d];
        ok &= c.reverified && c.certificate.s <= MAX_S && c.elapsed < Duration::from_secs(300);
        detail.push(format!("d = {d}: s = {} in {:.2?}", c.certificate.s, c.elapsed));
    }
    outcome(ok, detail.join(", "))
}

fn criterion_5(lattices: &BTreeMap<u32, Certified>) -> Outcome {
    let ten = &lattices[&10].summary;
    let mut ok = lattices[&10].reverified
        && ten.ratio == Some(ratio(8, 3))
        && ten.ratio.as_ref().unwrap() > &ratio(5, 2)
        && ten.d6 == ratio(-3, 4_000_000)
        && ten.d6.is_negative();
    for d in 5..=9u32 {
        let c = &lattices[&d];
        ok &= c.reverified && c.summary.d6.is_positive() && c.summary.d6 == d6_closed_form(d);
    }
    outcome(ok, format!("d = 10: ratio {}, d6 = {}", fmt(&ten.ratio), ten.d6))
}

fn fmt(r: &Option<BigRational>) -> String {
    r.as_ref().map(|r| r.to_string()).unwrap_or_else(|| "-".into())
}

fn criterion_6(lattices: &BTreeMap<u32, Certified>) -> Outcome {
    let targets = [(ratio(9, 10), 5u32), (integer(1), 6), (ratio(5, 2), 10), (integer(10), 33)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (kappa, expected) in targets {
        let d = min_degree_for_kappa(&kappa) as u32;
        let c = &lattices[&d];
        let budget = if d == 33 { Duration::from_secs(900) } else { Duration::from_secs(300) };
        let within = c.elapsed < budget;
        let meets = c.summary.ratio.as_ref().is_some_and(|r| r > &kappa) && c.summary.c6_bar.is_zero();
        ok &= d == expected && c.reverified && meets && within;
        detail.push(format!(
            "kappa {kappa} -> d = {d} (ratio {}, {:.1?}{})",
            fmt(&c.summary.ratio),
            c.elapsed,
            if within { "" } else { ", over budget" }
        ));
    }
    outcome(ok, detail.join("; "))
}

fn criterion_7(lattices: &BTreeMap<u32, Certified>) -> Outcome {
    let started = Instant::now();
    let c = &lattices[&5];
    let s = c.certificate.s.min(4);
    let fug = full_unit_graph(&build_root_unit_graph(5).unwrap(), &c.volt.truncated(s)).unwrap();
    let good = match find_good_try(&fug, SEED, 1000, &default_resolution()) {
        Ok(good) => good,
        Err(e) => return outcome(false, format!("no good try: {e}")),
    };
    let exact = is_good_try(&good.placement, &fug);
    let props = lattice_properties(&good.placement, &fug);
    let elapsed = started.elapsed();
    outcome(
        exact && props.all() && elapsed < Duration::from_secs(120),
        format!("s = {s}, good try after {} attempt(s), {elapsed:.2?}", good.attempts),
    )
}

fn criterion_8(lattices: &BTreeMap<u32, Certified>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tori = 0;
    let mut ok = true;
    for d in [5u32, 6, 7] {
        let (base, volt) = build_base_graph(d).unwrap();
        for s in 0..=3u32 {
            let volt = volt.with_level_bits(&base, s, random_bits(&base, s, &mut rng)).unwrap();
            for n in [2u32, 3] {
                let torus = derived_torus(&base, &volt, n).unwrap();
                let report = validate(&torus, Some(d as usize));
                ok &= report.passed() && report.simple && report.bipartite && report.regular == Some(true);
                tori += 1;
            }
        }
    }
    let c = &lattices[&5];
    for n in [2u32, 3] {
        let torus = derived_torus(&c.base, &c.volt, n).unwrap();
        ok &= validate(&torus, Some(5)).passed();
        tori += 1;
    }
    let generated = lattices.values().all(|c| voltage_group_generated(&c.base, &c.volt));
    outcome(ok && generated, format!("{tori} tori valid, {} certified lattices generated", lattices.len()))
}

#[test]
fn acceptance_criteria() {
    let mut results = vec![("1 central-count formulas", criterion_1())];
    results.push(("2 census oracle equivalence", criterion_2()));
    results.push(("3 voltage-census soundness", criterion_3()));

    let lattices: BTreeMap<u32, Certified> = [5u32, 6, 7, 8, 9, 10, 33].into_iter().map(|d| (d, certify(d))).collect();
    results.push(("4 certification", criterion_4(&lattices)));
    results.push(("5 counterexample reproduction", criterion_5(&lattices)));
    results.push(("6 kappa targeting", criterion_6(&lattices)));
    results.push(("7 embedding", criterion_7(&lattices)));
    results.push(("8 structural invariants", criterion_8(&lattices)));

    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
