//! Short cycles of the base graph and their voltages.
//!
//! Two independent enumerations are provided. [`for_each_cycle_from`] walks
//! every simple cycle once, rooted at its smallest vertex with the second
//! vertex smaller than the last. [`antipodal_tally`] never materializes a
//! cycle: it splits each one at its smallest vertex and the vertex opposite
//! to it, and counts compatible pairs of half-paths. The certificate checker
//! uses the second so that a bug in one traversal cannot hide in the other.

use rayon::prelude::*;

use crate::voltage::{BaseGraph, VoltageAssignment};

/// Net displacement and level bits of a closed walk.
pub type Voltage = ([i32; 3], u64);

/// Visits every simple cycle of length `len` whose smallest vertex is
/// `start`, once per cycle. The callback receives the vertex sequence and
/// the edge ids, `edges[i]` joining `vertices[i]` and `vertices[i + 1]`
/// (cyclically).
pub fn for_each_cycle_from<F>(base: &BaseGraph, start: usize, len: usize, visit: &mut F)
where
    F: FnMut(&[u16], &[u16]),
{
    assert!((3..=8).contains(&len), "cycle length {len} out of range");
    let mut vertices = [0u16; 8];
    let mut edges = [0u16; 8];
    vertices[0] = start as u16;
    extend(base, len, 1, &mut vertices, &mut edges, visit);
}

fn extend<F>(base: &BaseGraph, len: usize, depth: usize, vertices: &mut [u16; 8], edges: &mut [u16; 8], visit: &mut F)
where
    F: FnMut(&[u16], &[u16]),
{
    let start = vertices[0] as usize;
    let prev = vertices[depth - 1] as usize;
    for &w in base.neighbors(prev) {
        let w = w as usize;
        if w <= start || vertices[1..depth].contains(&(w as u16)) {
            continue;
        }
        let e = base.edge_between(prev, w).expect("adjacent") as u16;
        vertices[depth] = w as u16;
        edges[depth - 1] = e;
        if depth + 1 == len {
            if w <= vertices[1] as usize {
                continue;
            }
            if let Some(closing) = base.edge_between(w, start) {
                edges[depth] = closing as u16;
                visit(&vertices[..len], &edges[..len]);
            }
        } else {
            extend(base, len, depth + 1, vertices, edges, visit);
        }
    }
}

/// Folds over all simple cycles of length `len`, in parallel over the
/// starting vertex. The result does not depend on the schedule as long as
/// `reduce` is associative and commutative.
pub fn fold_cycles<T, I, F, R>(base: &BaseGraph, len: usize, identity: I, fold: F, reduce: R) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &[u16], &[u16]) + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    (0..base.vertex_count())
        .into_par_iter()
        .map(|start| {
            let mut acc = identity();
            for_each_cycle_from(base, start, len, &mut |v: &[u16], e: &[u16]| fold(&mut acc, v, e));
            acc
        })
        .reduce(&identity, &reduce)
}

/// Voltage of the cycle traversed in the order of `vertices`.
pub fn cycle_voltage(base: &BaseGraph, volt: &VoltageAssignment, vertices: &[u16], edges: &[u16]) -> Voltage {
    let mut disp = [0i32; 3];
    let mut bits = 0u64;
    for (&v, &e) in vertices.iter().zip(edges) {
        let t = volt.displacement(base, e as usize, v as usize);
        for k in 0..3 {
            disp[k] += t[k];
        }
        bits ^= volt.level_bits()[e as usize];
    }
    (disp, bits)
}

/// Counts for one cycle length from the pairing enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LengthTally {
    /// Simple cycles, central or not.
    pub cycles: u64,
    /// Central cycles (4-cycles on `t`, `b` and two `c_i`).
    pub central: u64,
    /// Non-central cycles with zero net displacement.
    pub zero_displacement: u64,
    /// Non-central cycles with zero net displacement and zero level bits.
    pub zero_voltage: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairingTally {
    pub four: LengthTally,
    pub six: LengthTally,
}

#[derive(Clone, Copy)]
struct HalfPath {
    first: u16,
    second: u16,
    disp: [i32; 3],
    bits: u64,
    central: bool,
}

fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Sum of `C(run, 2)` over runs of equal keys in a sorted sequence.
fn pairs_in_runs<K: PartialEq>(keys: impl Iterator<Item = K>) -> u64 {
    let mut total = 0;
    let mut run = 0u64;
    let mut last: Option<K> = None;
    for k in keys {
        if last.as_ref() == Some(&k) {
            run += 1;
        } else {
            total += choose2(run);
            run = 1;
            last = Some(k);
        }
    }
    total + choose2(run)
}

/// Pairs of half-paths that close into a simple cycle: distinct at every
/// interior position. For 2-paths the interiors differ automatically.
fn disjoint_pairs(group: &mut [HalfPath], six: bool) -> u64 {
    let mut pairs = choose2(group.len() as u64);
    if six {
        group.sort_unstable_by_key(|p| p.first);
        pairs -= pairs_in_runs(group.iter().map(|p| p.first));
        group.sort_unstable_by_key(|p| p.second);
        pairs -= pairs_in_runs(group.iter().map(|p| p.second));
    }
    pairs
}

fn tally_endpoint(paths: &mut [HalfPath], six: bool, out: &mut LengthTally) {
    let mut central_paths: Vec<HalfPath> = paths.iter().filter(|p| p.central).copied().collect();
    let central_pairs = disjoint_pairs(&mut central_paths, six);
    out.cycles += disjoint_pairs(paths, six);
    out.central += central_pairs;

    paths.sort_unstable_by_key(|p| (p.disp, p.bits));
    let mut zero_disp = 0;
    let mut zero_volt = 0;
    let mut i = 0;
    while i < paths.len() {
        let mut j = i;
        while j < paths.len() && paths[j].disp == paths[i].disp {
            j += 1;
        }
        zero_disp += disjoint_pairs(&mut paths[i..j].to_vec(), six);
        let mut k = i;
        while k < j {
            let mut m = k;
            while m < j && paths[m].bits == paths[k].bits {
                m += 1;
            }
            zero_volt += disjoint_pairs(&mut paths[k..m].to_vec(), six);
            k = m;
        }
        i = j;
    }
    // central paths have zero voltage, so every central pair was counted above
    out.zero_displacement += zero_disp - central_pairs;
    out.zero_voltage += zero_volt - central_pairs;
}

/// Counts 4- and 6-cycles by pairing half-paths between the smallest vertex
/// of a cycle and its antipode.
pub fn antipodal_tally(base: &BaseGraph, volt: &VoltageAssignment) -> PairingTally {
    (0..base.vertex_count()).into_par_iter().map(|u| tally_from(base, volt, u)).reduce(
        PairingTally::default,
        |mut a, b| {
            for (x, y) in [(&mut a.four, b.four), (&mut a.six, b.six)] {
                x.cycles += y.cycles;
                x.central += y.central;
                x.zero_displacement += y.zero_displacement;
                x.zero_voltage += y.zero_voltage;
            }
            a
        },
    )
}

fn step(base: &BaseGraph, volt: &VoltageAssignment, from: usize, to: usize) -> (usize, [i32; 3], u64, bool) {
    let e = base.edge_between(from, to).expect("adjacent");
    (e, volt.displacement(base, e, from), volt.level_bits()[e], base.is_central_edge(e))
}

fn add(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn tally_from(base: &BaseGraph, volt: &VoltageAssignment, u: usize) -> PairingTally {
    let n = base.vertex_count();
    let mut two: Vec<Vec<HalfPath>> = vec![Vec::new(); n];
    let mut three: Vec<Vec<HalfPath>> = vec![Vec::new(); n];
    for &a in base.neighbors(u) {
        let a = a as usize;
        if a <= u {
            continue;
        }
        let (_, t1, b1, c1) = step(base, volt, u, a);
        for &b in base.neighbors(a) {
            let b = b as usize;
            if b <= u {
                continue;
            }
            let (_, t2, b2, c2) = step(base, volt, a, b);
            let (d2, bits2) = (add(t1, t2), b1 ^ b2);
            two[b].push(HalfPath { first: a as u16, second: 0, disp: d2, bits: bits2, central: c1 && c2 });
            for &v in base.neighbors(b) {
                let v = v as usize;
                if v <= u || v == a {
                    continue;
                }
                let (_, t3, b3, c3) = step(base, volt, b, v);
                three[v].push(HalfPath {
                    first: a as u16,
                    second: b as u16,
                    disp: add(d2, t3),
                    bits: bits2 ^ b3,
                    central: c1 && c2 && c3,
                });
            }
        }
    }
    let mut tally = PairingTally::default();
    for paths in &mut two {
        tally_endpoint(paths, false, &mut tally.four);
    }
    for paths in &mut three {
        tally_endpoint(paths, true, &mut tally.six);
    }
    tally
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voltage::build_base_graph;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn base_is_complete_bipartite_cycle_counts() {
        // the base graph is K_{d,d}
        for d in [5u32, 6, 7] {
            let (base, volt) = build_base_graph(d).unwrap();
            let d = d as u64;
            let c4 = fold_cycles(&base, 4, || 0u64, |acc, _, _| *acc += 1, |a, b| a + b);
            let c6 = fold_cycles(&base, 6, || 0u64, |acc, _, _| *acc += 1, |a, b| a + b);
            assert_eq!(c4, binomial(d, 2).pow(2));
            assert_eq!(c6, 6 * binomial(d, 3).pow(2));
            let tally = antipodal_tally(&base, &volt);
            assert_eq!(tally.four.cycles, c4);
            assert_eq!(tally.six.cycles, c6);
            assert_eq!(tally.four.central, binomial(d, 2));
            assert_eq!(tally.six.central, 0);
        }
    }

    #[test]
    fn cycles_are_simple_and_closed() {
        let (base, _) = build_base_graph(6).unwrap();
        for len in [4, 6] {
            for start in 0..base.vertex_count() {
                for_each_cycle_from(&base, start, len, &mut |v: &[u16], e: &[u16]| {
                    let mut sorted = v.to_vec();
                    sorted.sort_unstable();
                    sorted.dedup();
                    assert_eq!(sorted.len(), len);
                    assert_eq!(*sorted.first().unwrap() as usize, start);
                    for i in 0..len {
                        let (a, b) = (v[i] as usize, v[(i + 1) % len] as usize);
                        assert_eq!(base.edge_between(a, b), Some(e[i] as usize));
                    }
                });
            }
        }
    }

    #[test]
    fn routes_agree_on_zero_voltage_counts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for d in [5, 6, 8] {
            let (base, volt) = build_base_graph(d).unwrap();
            for s in [0u32, 1, 2, 4] {
                let bits = (0..base.edge_count())
                    .map(|e| if base.is_central_edge(e) { 0 } else { rng.gen::<u64>() & ((1 << s) - 1) })
                    .collect();
                let volt = volt.with_level_bits(&base, s, bits).unwrap();
                let tally = antipodal_tally(&base, &volt);
                for (len, expect) in [(4, tally.four), (6, tally.six)] {
                    let (zd, zv) = fold_cycles(
                        &base,
                        len,
                        || (0u64, 0u64),
                        |acc, v, e| {
                            let central = e.iter().all(|&e| base.is_central_edge(e as usize));
                            let (disp, bits) = cycle_voltage(&base, &volt, v, e);
                            if !central && disp == [0; 3] {
                                acc.0 += 1;
                                acc.1 += (bits == 0) as u64;
                            }
                        },
                        |a, b| (a.0 + b.0, a.1 + b.1),
                    );
                    assert_eq!((zd, zv), (expect.zero_displacement, expect.zero_voltage), "d={d} s={s} len={len}");
                }
            }
        }
    }

    #[test]
    fn displaced_cycle_has_nonzero_voltage() {
        // (c1, vx, c2, t): vx -> c1 gains +e_x, so the cycle nets -e_x
        let (base, volt) = build_base_graph(5).unwrap();
        let ids: Vec<u16> =
            [crate::graph::Role::C(1), crate::graph::Role::Vx, crate::graph::Role::C(2), crate::graph::Role::T]
                .iter()
                .map(|&r| base.vertex(r).unwrap() as u16)
                .collect();
        let edges: Vec<u16> =
            (0..4).map(|i| base.edge_between(ids[i] as usize, ids[(i + 1) % 4] as usize).unwrap() as u16).collect();
        assert_eq!(cycle_voltage(&base, &volt, &ids, &edges).0, [-1, 0, 0]);
    }
}
