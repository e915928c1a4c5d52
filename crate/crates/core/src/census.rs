//! Exact counts of 4-cycles, 6-cycles and `theta_{2,2,2}` (copies of K_{2,3}).
//!
//! Explicit graphs are counted directly. The infinite lattice is counted per
//! fundamental cube from the base graph: a base cycle lifts to closed cycles
//! exactly when its voltage is trivial, and then it lifts once for each of
//! the `2^s` levels of a cube.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{cycle_voltage, fold_cycles};
use crate::error::{Error, Result};
use crate::graph::{central_subgraph, LabeledGraph};
use crate::rational;
use crate::voltage::{BaseGraph, VoltageAssignment};

/// Vertex limit for [`brute_force_census`].
pub const BRUTE_FORCE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusScope {
    /// Counts over a finite explicit graph, averaged over its vertices.
    ExplicitGraph,
    /// Counts per fundamental cube of the infinite lattice, averaged over
    /// the `2^s * 2d` lattice vertices of one cube.
    PerCube,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub scope: CensusScope,
    pub d: u32,
    pub s: u32,
    /// Denominator of the per-vertex averages.
    pub vertices: u128,
    pub c4_total: u128,
    pub c4_central: u128,
    pub c4_stray: u128,
    pub c6: u128,
    pub theta222: u128,
    pub per_vertex: PerVertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerVertex {
    #[serde(with = "rational::as_string")]
    pub c4_bar: BigRational,
    #[serde(with = "rational::as_string")]
    pub c6_bar: BigRational,
    #[serde(with = "rational::as_string")]
    pub theta_bar: BigRational,
}

impl CensusReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        scope: CensusScope,
        d: u32,
        s: u32,
        vertices: u128,
        c4_central: u128,
        c4_stray: u128,
        c6: u128,
        theta222: u128,
    ) -> Self {
        let avg = |count: u128| {
            if vertices == 0 {
                rational::integer(0)
            } else {
                rational::ratio(BigInt::from(count), BigInt::from(vertices))
            }
        };
        let c4_total = c4_central + c4_stray;
        CensusReport {
            scope,
            d,
            s,
            vertices,
            c4_total,
            c4_central,
            c4_stray,
            c6,
            theta222,
            per_vertex: PerVertex { c4_bar: avg(c4_total), c6_bar: avg(c6), theta_bar: avg(theta222) },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: CensusReport = serde_json::from_str(text)?;
        let check = CensusReport::new(
            report.scope,
            report.d,
            report.s,
            report.vertices,
            report.c4_central,
            report.c4_stray,
            report.c6,
            report.theta222,
        );
        if check != report {
            return Err(Error::InvalidArgument("census report is internally inconsistent".into()));
        }
        Ok(report)
    }
}

fn choose(n: u64, k: u64) -> u64 {
    if n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `(sum C(codeg, 2), sum C(codeg, 3))` over unordered vertex pairs.
fn codegree_sums(g: &LabeledGraph) -> (u64, u64) {
    let n = g.vertex_count();
    (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::new()),
            |(count, touched), u| {
                for &w in g.neighbors(u) {
                    for &v in g.neighbors(w as usize) {
                        let v = v as usize;
                        if v > u {
                            if count[v] == 0 {
                                touched.push(v);
                            }
                            count[v] += 1;
                        }
                    }
                }
                let mut sums = (0u64, 0u64);
                for v in touched.drain(..) {
                    let c = std::mem::take(&mut count[v]) as u64;
                    sums.0 += choose(c, 2);
                    sums.1 += choose(c, 3);
                }
                sums
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Number of 4-cycles: every 4-cycle has two diagonals, each a vertex pair
/// with two common neighbors on the cycle.
pub fn count_c4(g: &LabeledGraph) -> u64 {
    codegree_sums(g).0 / 2
}

/// Number of subgraphs isomorphic to K_{2,3}: a hub pair and three of its
/// common neighbors.
pub fn count_theta222(g: &LabeledGraph) -> u64 {
    codegree_sums(g).1
}

/// Number of 6-cycles, each found once from its smallest vertex with the
/// second vertex smaller than the last.
pub fn count_c6(g: &LabeledGraph) -> u64 {
    fn walk(g: &LabeledGraph, path: &mut [usize; 6], depth: usize) -> u64 {
        let start = path[0];
        let mut found = 0;
        for &w in g.neighbors(path[depth - 1]) {
            let w = w as usize;
            if w <= start || path[1..depth].contains(&w) {
                continue;
            }
            if depth == 5 {
                if w > path[1] && g.has_edge(w, start) {
                    found += 1;
                }
            } else {
                path[depth] = w;
                found += walk(g, path, depth + 1);
            }
        }
        found
    }
    (0..g.vertex_count())
        .into_par_iter()
        .map(|v| {
            let mut path = [v, 0, 0, 0, 0, 0];
            walk(g, &mut path, 1)
        })
        .sum()
}

/// 4-cycles inside a single copy of the root central subgraph versus all
/// others.
pub fn classify_c4(g: &LabeledGraph) -> Result<(u64, u64)> {
    let central: u64 = central_subgraph(g)?.iter().map(count_c4).sum();
    Ok((central, count_c4(g) - central))
}

/// Explicit census with exact per-vertex averages. Central/stray split is
/// only available for graphs carrying construction roles; plain graphs
/// report every 4-cycle as stray.
pub fn explicit_census(g: &LabeledGraph) -> CensusReport {
    let (pairs2, pairs3) = codegree_sums(g);
    let total = pairs2 / 2;
    let central = classify_c4(g).map(|(c, _)| c).unwrap_or(0);
    CensusReport::new(
        CensusScope::ExplicitGraph,
        g.degree_parameter(),
        g.level_bits(),
        g.vertex_count() as u128,
        central as u128,
        (total - central) as u128,
        count_c6(g) as u128,
        pairs3 as u128,
    )
}

/// Census by exhaustive subset enumeration, independent of the counters
/// above: every 4-, 5- and 6-vertex subset is tested against each labeled
/// copy of C_4, K_{2,3} and C_6 it could host.
pub fn brute_force_census(g: &LabeledGraph) -> Result<CensusReport> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { vertices: n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut adj = [0u32; BRUTE_FORCE_LIMIT];
    for &(u, v) in g.edges() {
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let edge = |a: usize, b: usize| adj[a] >> b & 1 == 1;
    let closed = |cycle: &[usize]| (0..cycle.len()).all(|i| edge(cycle[i], cycle[(i + 1) % cycle.len()]));
    let same_copy = |vs: &[usize]| {
        let first = g.label(vs[0]);
        vs.iter().all(|&v| {
            let l = g.label(v);
            l.role.is_central() && l.level == first.level && l.cell == first.cell
        })
    };

    let (mut c4_central, mut c4_stray, mut theta, mut c6) = (0u128, 0u128, 0u128, 0u128);
    for_each_subset(n, 4, |s| {
        let [a, b, c, d] = [s[0], s[1], s[2], s[3]];
        for order in [[a, b, c, d], [a, b, d, c], [a, c, b, d]] {
            if closed(&order) {
                if same_copy(&order) {
                    c4_central += 1;
                } else {
                    c4_stray += 1;
                }
            }
        }
    });
    for_each_subset(n, 5, |s| {
        for i in 0..5 {
            for j in i + 1..5 {
                let middles = (0..5).filter(|&k| k != i && k != j);
                if middles.into_iter().all(|k| edge(s[i], s[k]) && edge(s[j], s[k])) {
                    theta += 1;
                }
            }
        }
    });
    for_each_subset(n, 6, |s| {
        // cycles through s[0]; each undirected cycle appears for exactly one
        // orientation with perm[0] < perm[4]
        let mut rest = [s[1], s[2], s[3], s[4], s[5]];
        permutations(&mut rest, 0, &mut |perm| {
            if perm[0] < perm[4] && closed(&[s[0], perm[0], perm[1], perm[2], perm[3], perm[4]]) {
                c6 += 1;
            }
        });
    });
    Ok(CensusReport::new(
        CensusScope::ExplicitGraph,
        g.degree_parameter(),
        g.level_bits(),
        n as u128,
        c4_central,
        c4_stray,
        c6,
        theta,
    ))
}

fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, next: usize, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if chosen.len() == k {
            visit(chosen);
            return;
        }
        for v in next..n {
            chosen.push(v);
            rec(n, k, v + 1, chosen, visit);
            chosen.pop();
        }
    }
    rec(n, k, 0, &mut Vec::with_capacity(k), &mut visit);
}

fn permutations(items: &mut [usize; 5], fixed: usize, visit: &mut dyn FnMut(&[usize; 5])) {
    if fixed == items.len() {
        visit(items);
        return;
    }
    for i in fixed..items.len() {
        items.swap(fixed, i);
        permutations(items, fixed + 1, visit);
        items.swap(fixed, i);
    }
}

/// Per-cube census of the infinite lattice defined by `base` and `volt`.
pub fn voltage_census(base: &BaseGraph, volt: &VoltageAssignment) -> CensusReport {
    let (central, stray) = fold_cycles(
        base,
        4,
        || (0u64, 0u64),
        |acc, v, e| {
            if cycle_voltage(base, volt, v, e) == ([0; 3], 0) {
                if e.iter().all(|&e| base.is_central_edge(e as usize)) {
                    acc.0 += 1;
                } else {
                    acc.1 += 1;
                }
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let c6 = fold_cycles(
        base,
        6,
        || 0u64,
        |acc, v, e| *acc += (cycle_voltage(base, volt, v, e) == ([0; 3], 0)) as u64,
        |a, b| a + b,
    );
    let (_, theta) = hub_pair_sums(base, volt);
    let levels = 1u128 << volt.level_bit_count();
    CensusReport::new(
        CensusScope::PerCube,
        base.degree(),
        volt.level_bit_count(),
        levels * base.vertex_count() as u128,
        levels * central as u128,
        levels * stray as u128,
        levels * c6 as u128,
        levels * theta as u128,
    )
}

/// For every unordered hub pair of the base, groups the 2-paths between the
/// hubs by voltage; returns `(sum C(g, 2), sum C(g, 3))` over the groups.
/// Paths in one group lift to paths with common endpoints, so the first sum
/// is twice the number of zero-voltage 4-cycles and the second counts
/// K_{2,3} per level.
pub fn hub_pair_sums(base: &BaseGraph, volt: &VoltageAssignment) -> (u64, u64) {
    let n = base.vertex_count();
    (0..n)
        .into_par_iter()
        .map(|u| {
            let mut by_target: HashMap<(usize, [i32; 3], u64), u64> = HashMap::new();
            for &w in base.neighbors(u) {
                let w = w as usize;
                let e1 = base.edge_between(u, w).unwrap();
                let t1 = volt.displacement(base, e1, u);
                for &v in base.neighbors(w) {
                    let v = v as usize;
                    if v <= u {
                        continue;
                    }
                    let e2 = base.edge_between(w, v).unwrap();
                    let t2 = volt.displacement(base, e2, w);
                    let key = (
                        v,
                        [t1[0] + t2[0], t1[1] + t2[1], t1[2] + t2[2]],
                        volt.level_bits()[e1] ^ volt.level_bits()[e2],
                    );
                    *by_target.entry(key).or_insert(0) += 1;
                }
            }
            by_target.values().fold((0, 0), |acc, &g| (acc.0 + choose(g, 2), acc.1 + choose(g, 3)))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_root_unit_graph, Label, Role};

    fn complete_bipartite(a: usize, b: usize) -> LabeledGraph {
        let edges: Vec<_> = (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j))).collect();
        LabeledGraph::plain(a + b, &edges).unwrap()
    }

    fn cycle(n: usize) -> LabeledGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        LabeledGraph::plain(n, &edges).unwrap()
    }

    #[test]
    fn small_graph_counts() {
        assert_eq!(count_c4(&cycle(4)), 1);
        assert_eq!(count_c4(&complete_bipartite(2, 3)), 3);
        assert_eq!(count_c4(&complete_bipartite(2, 6)), 15);
        assert_eq!(count_theta222(&complete_bipartite(2, 3)), 1);
        assert_eq!(count_theta222(&cycle(6)), 0);
        assert_eq!(count_theta222(&complete_bipartite(2, 10)), 120);
        assert_eq!(count_c6(&complete_bipartite(3, 3)), 6);
        assert_eq!(count_c6(&cycle(6)), 1);
        for d in 2..12 {
            assert_eq!(count_c6(&complete_bipartite(2, d)), 0);
        }
        let path = LabeledGraph::plain(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(count_c6(&path), 0);
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_census(&complete_bipartite(2, 5)).unwrap();
        assert_eq!((r.c4_total, r.theta222, r.c6), (10, 10, 0));
        let empty = brute_force_census(&LabeledGraph::plain(6, &[]).unwrap()).unwrap();
        assert_eq!((empty.c4_total, empty.theta222, empty.c6), (0, 0, 0));
        let k33 = brute_force_census(&complete_bipartite(3, 3)).unwrap();
        assert_eq!((k33.c4_total, k33.c6), (9, 6));
        let big = LabeledGraph::plain(17, &[]).unwrap();
        assert!(matches!(brute_force_census(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn root_unit_graph_classification() {
        let g = build_root_unit_graph(5).unwrap();
        let (central, stray) = classify_c4(&g).unwrap();
        assert_eq!(central, 10);
        assert_eq!(central + stray, count_c4(&g));
        assert!(stray > 0);
        let brute = brute_force_census(&g).unwrap();
        assert_eq!((brute.c4_central, brute.c4_stray), (10, stray as u128));

        let core = &central_subgraph(&g).unwrap()[0];
        assert_eq!(classify_c4(core).unwrap(), (10, 0));
        assert_eq!(count_theta222(core), 10);
    }

    #[test]
    fn classify_requires_roles() {
        assert!(classify_c4(&cycle(4)).is_err());
        let mut only_cs =
            LabeledGraph::new(5, 0, vec![Label::root(Role::C(1)), Label::root(Role::C(2))], vec![]).unwrap();
        assert!(classify_c4(&only_cs).is_err());
        only_cs = build_root_unit_graph(5).unwrap();
        assert!(classify_c4(&only_cs).is_ok());
    }

    #[test]
    fn report_json_round_trip_and_consistency() {
        let r = explicit_census(&build_root_unit_graph(6).unwrap());
        let text = r.to_json().unwrap();
        assert!(text.contains("\"c4_bar\""));
        assert_eq!(CensusReport::from_json(&text).unwrap(), r);
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["c6"] = serde_json::json!(r.c6 as u64 + 1);
        assert!(CensusReport::from_json(&value.to_string()).is_err());
    }
}
