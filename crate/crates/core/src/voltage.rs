//! The base graph of the lattice and its voltages.
//!
//! The base graph is the root unit graph with `lx ~ rx`, `ly ~ ry` and
//! `lz ~ rz` merged into connector vertices `vx`, `vy`, `vz`; it has `2d`
//! vertices and `d^2` edges and is `d`-regular. Every edge carries a voltage
//! in `Z^3 x GF(2)^s`: an integer displacement between unit cells and `s`
//! level bits, bit `i` telling whether the edge is crossed at lift `i`.
//! The derived graph over the full group is the infinite lattice; quotients
//! of the displacement part by `(Z/n)^3` give finite tori.

use crate::error::{Error, Result};
use crate::graph::{build_root_unit_graph, Label, LabeledGraph, Role, MAX_LEVEL_BITS, MIN_DEGREE};

/// Largest supported degree: base edge ids must fit in a `u16`.
pub const MAX_DEGREE: u32 = 255;

const NO_EDGE: u16 = u16::MAX;

#[derive(Clone, Debug)]
pub struct BaseGraph {
    d: u32,
    graph: LabeledGraph,
    edge_at: Vec<u16>,
    central: Vec<bool>,
}

impl BaseGraph {
    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn role(&self, v: usize) -> Role {
        self.graph.label(v).role
    }

    pub fn vertex(&self, role: Role) -> Option<usize> {
        self.graph.find(&Label::root(role))
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        self.graph.neighbors(v)
    }

    /// Endpoints `(u, v)` with `u < v`; `u` is always the black `c` vertex.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.graph.edges()[e];
        (u as usize, v as usize)
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        match self.edge_at[u * self.vertex_count() + v] {
            NO_EDGE => None,
            e => Some(e as usize),
        }
    }

    /// Edges `(t, c_i)` and `(b, c_i)`; their level bits are always zero.
    pub fn is_central_edge(&self, e: usize) -> bool {
        self.central[e]
    }

    pub fn non_central_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edge_count()).filter(|&e| !self.central[e])
    }

    /// Canonical edge order as role-name pairs.
    pub fn edge_names(&self) -> Vec<[String; 2]> {
        (0..self.edge_count())
            .map(|e| {
                let (u, v) = self.endpoints(e);
                [self.role(u).to_string(), self.role(v).to_string()]
            })
            .collect()
    }
}

/// Voltages on the base edges. Displacements are stored for the
/// orientation `low id -> high id` (from the `c` endpoint); reversing an
/// edge negates its displacement. Level bits do not depend on orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoltageAssignment {
    s: u32,
    displacement: Vec<[i32; 3]>,
    level_bits: Vec<u64>,
}

impl VoltageAssignment {
    pub fn level_bit_count(&self) -> u32 {
        self.s
    }

    pub fn level_bits(&self) -> &[u64] {
        &self.level_bits
    }

    pub fn displacements(&self) -> &[[i32; 3]] {
        &self.displacement
    }

    /// Displacement gained walking from `from` to `to` along edge `e`.
    pub fn displacement(&self, base: &BaseGraph, e: usize, from: usize) -> [i32; 3] {
        let t = self.displacement[e];
        if base.endpoints(e).0 == from {
            t
        } else {
            [-t[0], -t[1], -t[2]]
        }
    }

    /// Replaces the level bits; `bits[e]` holds the `s` stage bits of edge `e`.
    pub fn with_level_bits(&self, base: &BaseGraph, s: u32, bits: Vec<u64>) -> Result<Self> {
        if s > MAX_LEVEL_BITS {
            return Err(Error::InvalidArgument(format!("s = {s} exceeds {MAX_LEVEL_BITS}")));
        }
        if bits.len() != base.edge_count() {
            return Err(Error::InvalidArgument(format!(
                "{} level-bit entries for {} base edges",
                bits.len(),
                base.edge_count()
            )));
        }
        for (e, &b) in bits.iter().enumerate() {
            if s < MAX_LEVEL_BITS && b >> s != 0 {
                return Err(Error::InvalidArgument(format!("edge {e} has bits beyond stage {s}")));
            }
            if base.is_central_edge(e) && b != 0 {
                let (u, v) = base.endpoints(e);
                return Err(Error::CentralEdgeCrossed { u, v });
            }
        }
        Ok(VoltageAssignment { s, displacement: self.displacement.clone(), level_bits: bits })
    }

    /// Keeps only the first `s` stages.
    pub fn truncated(&self, s: u32) -> Self {
        let s = s.min(self.s);
        let mask = if s == 64 { u64::MAX } else { (1u64 << s) - 1 };
        VoltageAssignment {
            s,
            displacement: self.displacement.clone(),
            level_bits: self.level_bits.iter().map(|b| b & mask).collect(),
        }
    }
}

/// Base graph of degree `d` with zero level bits (`s = 0`).
pub fn build_base_graph(d: u32) -> Result<(BaseGraph, VoltageAssignment)> {
    if d < MIN_DEGREE {
        return Err(Error::DegreeTooSmall { d });
    }
    if d > MAX_DEGREE {
        return Err(Error::DegreeTooLarge { d, max: MAX_DEGREE });
    }
    let root = build_root_unit_graph(d)?;
    let mut labels: Vec<Label> = root.labels().iter().map(|l| Label::root(l.role.base_role())).collect();
    labels.sort_unstable();
    labels.dedup();
    let find = |role: Role| labels.binary_search(&Label::root(role)).expect("base role");
    let edges = root
        .edges()
        .iter()
        .map(|&(u, v)| (find(root.label(u as usize).role.base_role()), find(root.label(v as usize).role.base_role())))
        .collect();
    let graph = LabeledGraph::new(d, 0, labels, edges)?;

    let n = graph.vertex_count();
    let mut edge_at = vec![NO_EDGE; n * n];
    let mut central = Vec::with_capacity(graph.edge_count());
    let mut displacement = Vec::with_capacity(graph.edge_count());
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        let (u, v) = (u as usize, v as usize);
        edge_at[u * n + v] = e as u16;
        edge_at[v * n + u] = e as u16;
        let (ru, rv) = (graph.label(u).role, graph.label(v).role);
        central.push(ru.is_central() && rv.is_central());
        // crossing from a connector to c_1 enters the next cube along that axis
        let mut t = [0; 3];
        if ru == Role::C(1) {
            if let Some(axis) = rv.connector_axis() {
                t[axis.index()] = -1;
            }
        }
        displacement.push(t);
    }
    let volt = VoltageAssignment { s: 0, displacement, level_bits: vec![0; graph.edge_count()] };
    Ok((BaseGraph { d, graph, edge_at, central }, volt))
}

fn check_assignment(base: &BaseGraph, volt: &VoltageAssignment) -> Result<()> {
    if volt.displacement.len() != base.edge_count() || volt.level_bits.len() != base.edge_count() {
        return Err(Error::InvalidArgument("voltage assignment does not match base graph".into()));
    }
    Ok(())
}

/// Explicit quotient of the lattice by `n Z^3`: vertex set
/// `base x (Z/n)^3 x GF(2)^s`, with edge `(u, v)` of displacement `t` and
/// bits `beta` joining `(u, z, l)` to `(v, z + t mod n, l xor beta)`.
pub fn derived_torus(base: &BaseGraph, volt: &VoltageAssignment, n: u32) -> Result<LabeledGraph> {
    check_assignment(base, volt)?;
    if n < 2 {
        return Err(Error::TorusTooSmall { n });
    }
    let s = volt.s;
    let levels = 1u64
        .checked_shl(s)
        .filter(|_| s < 40)
        .ok_or_else(|| Error::InvalidArgument(format!("explicit torus with s = {s} is too large")))?;
    let nn = n as u64;
    let cells = nn * nn * nn;
    let total = base.vertex_count() as u64 * levels * cells;
    if total > u32::MAX as u64 / 2 {
        return Err(Error::InvalidArgument(format!("explicit torus would have {total} vertices")));
    }
    let cell_of = |c: u64| [(c / (nn * nn)) as i32, (c / nn % nn) as i32, (c % nn) as i32];
    let cell_index = |z: [i32; 3]| {
        let w = |x: i32| x.rem_euclid(n as i32) as u64;
        (w(z[0]) * nn + w(z[1])) * nn + w(z[2])
    };
    let id = |u: usize, level: u64, cell: u64| ((u as u64 * levels + level) * cells + cell) as u32;

    let mut labels = Vec::with_capacity(total as usize);
    for u in 0..base.vertex_count() {
        for level in 0..levels {
            for c in 0..cells {
                labels.push(Label::new(base.role(u), level, cell_of(c)));
            }
        }
    }
    let mut edges = Vec::with_capacity((base.edge_count() as u64 * levels * cells) as usize);
    for e in 0..base.edge_count() {
        let (u, v) = base.endpoints(e);
        let t = volt.displacement[e];
        let beta = volt.level_bits[e];
        for level in 0..levels {
            for c in 0..cells {
                let z = cell_of(c);
                let target = cell_index([z[0] + t[0], z[1] + t[1], z[2] + t[2]]);
                edges.push((id(u, level, c), id(v, level ^ beta, target)));
            }
        }
    }
    LabeledGraph::from_canonical(base.degree(), s, labels, edges)
}

/// The root unit graph after `s` fiber-uniform 2-lifts: stage `i` crosses
/// exactly the edges whose base edge has bit `i` set. The `lx`/`ly`/`lz`
/// edges take the bits of the base edge they are identified with.
pub fn full_unit_graph(root: &LabeledGraph, volt: &VoltageAssignment) -> Result<LabeledGraph> {
    let d = root.degree_parameter();
    if root.level_bits() != 0 || *root != build_root_unit_graph(d)? {
        return Err(Error::MalformedGraph("expected a root unit graph".into()));
    }
    let (base, _) = build_base_graph(d)?;
    check_assignment(&base, volt)?;
    let s = volt.s;
    if s >= 32 {
        return Err(Error::InvalidArgument(format!("explicit full unit graph with s = {s} is too large")));
    }
    let levels = 1u64 << s;
    let base_of = |v: usize| base.vertex(root.label(v).role.base_role()).expect("base role");

    let mut labels = Vec::with_capacity(root.vertex_count() * levels as usize);
    for l in root.labels() {
        for level in 0..levels {
            labels.push(Label::new(l.role, level, [0; 3]));
        }
    }
    let id = |v: usize, level: u64| (v as u64 * levels + level) as u32;
    let mut edges = Vec::with_capacity(root.edge_count() * levels as usize);
    for &(u, v) in root.edges() {
        let (u, v) = (u as usize, v as usize);
        let e = base.edge_between(base_of(u), base_of(v)).expect("root edge has a base edge");
        let beta = volt.level_bits[e];
        for level in 0..levels {
            edges.push((id(u, level), id(v, level ^ beta)));
        }
    }
    LabeledGraph::from_canonical(d, s, labels, edges)
}

/// Glues copies of a full unit graph into an `n x n x n` torus: `rx` of the
/// cube at `z` is identified with `lx` of the cube at `z + e_x`, level by
/// level. Vertices are labeled with base roles, like [`derived_torus`].
pub fn glue_full_unit_graphs(fug: &LabeledGraph, n: u32) -> Result<LabeledGraph> {
    if n < 2 {
        return Err(Error::TorusTooSmall { n });
    }
    let n = n as i32;
    let wrap = |z: [i32; 3]| [z[0].rem_euclid(n), z[1].rem_euclid(n), z[2].rem_euclid(n)];
    let lattice_label = |l: Label, cell: [i32; 3]| match l.role.left_axis() {
        Some(axis) => {
            let u = axis.unit();
            Label::new(Role::connector(axis), l.level, wrap([cell[0] - u[0], cell[1] - u[1], cell[2] - u[2]]))
        }
        None => Label::new(l.role.base_role(), l.level, cell),
    };
    let mut cells = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                cells.push([x, y, z]);
            }
        }
    }
    let mut labels: Vec<Label> = cells
        .iter()
        .flat_map(|&c| fug.labels().iter().filter(|l| l.role.left_axis().is_none()).map(move |&l| lattice_label(l, c)))
        .collect();
    labels.sort_unstable();
    let index = |l: Label| labels.binary_search(&l).expect("glued vertex");
    let mut edges = Vec::with_capacity(fug.edge_count() * cells.len());
    for &c in &cells {
        for &(u, v) in fug.edges() {
            edges.push((
                index(lattice_label(fug.label(u as usize), c)) as u32,
                index(lattice_label(fug.label(v as usize), c)) as u32,
            ));
        }
    }
    LabeledGraph::from_canonical(fug.degree_parameter(), fug.level_bits(), labels, edges)
}

/// Whether the net voltages of closed walks generate all of
/// `Z^3 x GF(2)^s`, i.e. whether the derived infinite lattice is connected.
///
/// Generators are the fundamental cycles of a BFS spanning tree. The check
/// is joint: integer elimination on the displacement columns (bit parts
/// reduced mod 2 along the way) must leave unit pivots, and the bit parts of
/// the remaining rows must span `GF(2)^s`.
pub fn voltage_group_generated(base: &BaseGraph, volt: &VoltageAssignment) -> bool {
    if check_assignment(base, volt).is_err() {
        return false;
    }
    let n = base.vertex_count();
    let mut potential: Vec<Option<([i64; 3], u64)>> = vec![None; n];
    let mut tree_edge = vec![false; base.edge_count()];
    potential[0] = Some(([0; 3], 0));
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let (pu, bu) = potential[u].unwrap();
        for &w in base.neighbors(u) {
            let w = w as usize;
            if potential[w].is_none() {
                let e = base.edge_between(u, w).unwrap();
                let t = volt.displacement(base, e, u);
                potential[w] =
                    Some(([pu[0] + t[0] as i64, pu[1] + t[1] as i64, pu[2] + t[2] as i64], bu ^ volt.level_bits[e]));
                tree_edge[e] = true;
                queue.push_back(w);
            }
        }
    }
    if potential.iter().any(|p| p.is_none()) {
        return false;
    }
    let mut rows: Vec<([i64; 3], u64)> = (0..base.edge_count())
        .filter(|&e| !tree_edge[e])
        .map(|e| {
            let (u, v) = base.endpoints(e);
            let (pu, bu) = potential[u].unwrap();
            let (pv, bv) = potential[v].unwrap();
            let t = volt.displacement(base, e, u);
            (
                [pu[0] + t[0] as i64 - pv[0], pu[1] + t[1] as i64 - pv[1], pu[2] + t[2] as i64 - pv[2]],
                bu ^ volt.level_bits[e] ^ bv,
            )
        })
        .collect();

    for col in 0..3 {
        loop {
            let pivot = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.0[col] != 0)
                .min_by_key(|(_, r)| r.0[col].abs())
                .map(|(i, _)| i);
            let Some(p) = pivot else { return false };
            let (pr, pb) = rows[p];
            let mut reduced_all = true;
            for (i, row) in rows.iter_mut().enumerate() {
                if i == p || row.0[col] == 0 {
                    continue;
                }
                let q = row.0[col] / pr[col];
                for (x, y) in row.0.iter_mut().zip(pr) {
                    *x -= q * y;
                }
                if q % 2 != 0 {
                    row.1 ^= pb;
                }
                if row.0[col] != 0 {
                    reduced_all = false;
                }
            }
            if reduced_all {
                if pr[col].abs() != 1 {
                    return false;
                }
                rows.swap_remove(p);
                break;
            }
        }
    }
    gf2_rank(rows.iter().map(|r| r.1)) == volt.s as usize
}

pub(crate) fn gf2_rank(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut v in vectors {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}
