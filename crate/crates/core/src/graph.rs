//! Explicit finite labeled graphs.
//!
//! Every vertex carries a [`Label`]: its role in the root unit graph, the
//! level bits accumulated by 2-lifts, and the unit cell it lives in. Vertex
//! ids are dense and follow the canonical label order (role, index, level,
//! cell), so two constructions of the same labeled graph compare equal
//! field by field.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest degree for which the root unit graph exists.
pub const MIN_DEGREE: u32 = 5;

/// Longest level supported; levels are packed into a `u64`.
pub const MAX_LEVEL_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn unit(self) -> [i32; 3] {
        let mut v = [0; 3];
        v[self.index()] = 1;
        v
    }
}

/// Role of a vertex. The derived order is the canonical vertex order.
///
/// `Vx`/`Vy`/`Vz` are the connector vertices of the base graph and of the
/// assembled lattice, where `rx` of one cube is identified with `lx` of the
/// next. `Plain` marks vertices of graphs that are not part of the
/// construction (test inputs, imported graphs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    C(u32),
    T,
    B,
    Lx,
    Ly,
    Lz,
    Rx,
    Ry,
    Rz,
    F(u32),
    Vx,
    Vy,
    Vz,
    Plain(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Black,
    White,
}

impl Role {
    pub fn left(axis: Axis) -> Role {
        [Role::Lx, Role::Ly, Role::Lz][axis.index()]
    }

    pub fn right(axis: Axis) -> Role {
        [Role::Rx, Role::Ry, Role::Rz][axis.index()]
    }

    pub fn connector(axis: Axis) -> Role {
        [Role::Vx, Role::Vy, Role::Vz][axis.index()]
    }

    /// `None` for plain vertices, which carry no prescribed color.
    pub fn color(self) -> Option<Color> {
        match self {
            Role::C(_) => Some(Color::Black),
            Role::Plain(_) => None,
            _ => Some(Color::White),
        }
    }

    /// Roles of the root central subgraph: `t`, `b` and the `c_i`.
    pub fn is_central(self) -> bool {
        matches!(self, Role::C(_) | Role::T | Role::B)
    }

    pub fn left_axis(self) -> Option<Axis> {
        match self {
            Role::Lx => Some(Axis::X),
            Role::Ly => Some(Axis::Y),
            Role::Lz => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn right_axis(self) -> Option<Axis> {
        match self {
            Role::Rx => Some(Axis::X),
            Role::Ry => Some(Axis::Y),
            Role::Rz => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn connector_axis(self) -> Option<Axis> {
        match self {
            Role::Vx => Some(Axis::X),
            Role::Vy => Some(Axis::Y),
            Role::Vz => Some(Axis::Z),
            _ => None,
        }
    }

    /// Role in the base graph: `lx` and `rx` both become `vx`.
    pub fn base_role(self) -> Role {
        if let Some(axis) = self.left_axis().or(self.right_axis()) {
            Role::connector(axis)
        } else {
            self
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::C(i) => write!(f, "c{i}"),
            Role::T => f.write_str("t"),
            Role::B => f.write_str("b"),
            Role::Lx => f.write_str("lx"),
            Role::Ly => f.write_str("ly"),
            Role::Lz => f.write_str("lz"),
            Role::Rx => f.write_str("rx"),
            Role::Ry => f.write_str("ry"),
            Role::Rz => f.write_str("rz"),
            Role::F(j) => write!(f, "f{j}"),
            Role::Vx => f.write_str("vx"),
            Role::Vy => f.write_str("vy"),
            Role::Vz => f.write_str("vz"),
            Role::Plain(i) => write!(f, "v{i}"),
        }
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedGraph(format!("unknown role {s:?}"));
        let indexed = |rest: &str| rest.parse::<u32>().map_err(|_| bad());
        Ok(match s {
            "t" => Role::T,
            "b" => Role::B,
            "lx" => Role::Lx,
            "ly" => Role::Ly,
            "lz" => Role::Lz,
            "rx" => Role::Rx,
            "ry" => Role::Ry,
            "rz" => Role::Rz,
            "vx" => Role::Vx,
            "vy" => Role::Vy,
            "vz" => Role::Vz,
            _ => match s.split_at(1.min(s.len())) {
                ("c", rest) => Role::C(indexed(rest)?),
                ("f", rest) => Role::F(indexed(rest)?),
                ("v", rest) => Role::Plain(indexed(rest)?),
                _ => return Err(bad()),
            },
        })
    }
}

/// Per-vertex label. Bit `i` of `level` records the copy chosen at lift `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub role: Role,
    pub level: u64,
    pub cell: [i32; 3],
}

impl Label {
    pub fn new(role: Role, level: u64, cell: [i32; 3]) -> Self {
        Label { role, level, cell }
    }

    pub fn root(role: Role) -> Self {
        Label::new(role, 0, [0; 3])
    }
}

pub fn format_level(level: u64, s: u32) -> String {
    (0..s).map(|i| if level >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_level(text: &str) -> Result<u64> {
    if text.len() > MAX_LEVEL_BITS as usize {
        return Err(Error::MalformedGraph(format!("level {text:?} is longer than 64 bits")));
    }
    text.chars().enumerate().try_fold(0u64, |acc, (i, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        _ => Err(Error::MalformedGraph(format!("level {text:?} is not a bit string"))),
    })
}

/// Immutable simple graph with canonically ordered, labeled vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    d: u32,
    s: u32,
    labels: Vec<Label>,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
}

impl LabeledGraph {
    /// Builds a graph from labels in any order and edges given as indices
    /// into `labels`. Vertices are renumbered into canonical order.
    pub fn new(d: u32, s: u32, labels: Vec<Label>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if s > MAX_LEVEL_BITS {
            return Err(Error::MalformedGraph(format!("{s} level bits exceed 64")));
        }
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_unstable_by_key(|&i| labels[i]);
        let mut new_id = vec![0u32; labels.len()];
        for (rank, &old) in order.iter().enumerate() {
            new_id[old] = rank as u32;
        }
        let sorted: Vec<Label> = order.iter().map(|&i| labels[i]).collect();
        let mut remapped = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= labels.len() || v >= labels.len() {
                return Err(Error::MalformedGraph(format!("edge ({u}, {v}) out of range")));
            }
            remapped.push((new_id[u], new_id[v]));
        }
        Self::from_canonical(d, s, sorted, remapped)
    }

    /// Builds a graph whose labels are already in canonical order.
    pub(crate) fn from_canonical(d: u32, s: u32, labels: Vec<Label>, edges: Vec<(u32, u32)>) -> Result<Self> {
        if let Some(w) = labels.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::MalformedGraph(format!(
                "labels are not unique: {} at level {} cell {:?}",
                w[1].role, w[1].level, w[1].cell
            )));
        }
        if s < MAX_LEVEL_BITS {
            if let Some(l) = labels.iter().find(|l| l.level >> s != 0) {
                return Err(Error::MalformedGraph(format!("level {} of {} does not fit in {s} bits", l.level, l.role)));
            }
        }
        let n = labels.len();
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::MalformedGraph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::MalformedGraph(format!("self-loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MalformedGraph(format!("duplicate edge {:?}", w[0])));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(LabeledGraph { d, s, labels, edges: normalized, adjacency })
    }

    /// Graph with `Plain` roles, for inputs that are not part of the construction.
    pub fn plain(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..vertex_count).map(|i| Label::root(Role::Plain(i as u32))).collect();
        Self::new(0, 0, labels, edges.to_vec())
    }

    pub fn degree_parameter(&self) -> u32 {
        self.d
    }

    pub fn level_bits(&self) -> u32 {
        self.s
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn find(&self, label: &Label) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v) as u32, u.max(v) as u32);
        self.edges.binary_search(&key).ok()
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            d: self.d,
            s: self.s,
            vertices: self
                .labels
                .iter()
                .enumerate()
                .map(|(id, l)| VertexJson {
                    id,
                    role: l.role.to_string(),
                    level: format_level(l.level, self.s),
                    cell: l.cell,
                })
                .collect(),
            edges: self.edges.iter().map(|&(u, v)| [u as usize, v as usize]).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: GraphJson = serde_json::from_str(text)?;
        Self::from_json_value(parsed)
    }

    pub fn from_json_value(parsed: GraphJson) -> Result<Self> {
        let n = parsed.vertices.len();
        let mut labels = vec![None; n];
        for v in &parsed.vertices {
            if v.id >= n || labels[v.id].is_some() {
                return Err(Error::MalformedGraph(format!("vertex id {} is invalid or repeated", v.id)));
            }
            if v.level.len() != parsed.s as usize {
                return Err(Error::MalformedGraph(format!(
                    "level {:?} of vertex {} does not have length s = {}",
                    v.level, v.id, parsed.s
                )));
            }
            labels[v.id] = Some(Label::new(v.role.parse()?, parse_level(&v.level)?, v.cell));
        }
        let labels: Vec<Label> = labels.into_iter().map(|l| l.expect("ids cover 0..n")).collect();
        let edges = parsed.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(parsed.d, parsed.s, labels, edges)
    }

    /// Graphviz export; black vertices are filled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph lattice {\n  node [shape=circle, fontsize=9];\n");
        for (id, l) in self.labels.iter().enumerate() {
            let name =
                if self.s == 0 { l.role.to_string() } else { format!("{}@{}", l.role, format_level(l.level, self.s)) };
            let style = if l.role.color() == Some(Color::Black) {
                ", style=filled, fillcolor=black, fontcolor=white"
            } else {
                ""
            };
            out.push_str(&format!("  {id} [label=\"{name}\"{style}];\n"));
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub role: String,
    pub level: String,
    pub cell: [i32; 3],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub d: u32,
    pub s: u32,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
}

/// The root unit graph: `2d + 3` vertices and `d^2` edges.
pub fn build_root_unit_graph(d: u32) -> Result<LabeledGraph> {
    if d < MIN_DEGREE {
        return Err(Error::DegreeTooSmall { d });
    }
    let mut labels = Vec::new();
    let mut index = BTreeMap::new();
    let mut add = |role: Role| {
        index.insert(role, labels.len());
        labels.push(Label::root(role));
    };
    for i in 1..=d {
        add(Role::C(i));
    }
    for role in [Role::T, Role::B, Role::Lx, Role::Ly, Role::Lz, Role::Rx, Role::Ry, Role::Rz] {
        add(role);
    }
    for j in 1..=d - 5 {
        add(Role::F(j));
    }
    let mut edges = Vec::new();
    let mut link = |a: Role, b: Role| edges.push((index[&a], index[&b]));
    for i in 1..=d {
        link(Role::T, Role::C(i));
        link(Role::B, Role::C(i));
        for j in 1..=d - 5 {
            link(Role::C(i), Role::F(j));
        }
    }
    for axis in Axis::ALL {
        link(Role::left(axis), Role::C(1));
        for i in 2..=d {
            link(Role::right(axis), Role::C(i));
        }
    }
    LabeledGraph::new(d, 0, labels, edges)
}

/// The copies of the root central subgraph inside `g`, one per
/// (level, cell), in canonical order. A root unit graph yields one copy.
pub fn central_subgraph(g: &LabeledGraph) -> Result<Vec<LabeledGraph>> {
    let roles_present = |pred: fn(&Role) -> bool| g.labels.iter().any(|l| pred(&l.role));
    if !roles_present(|r| *r == Role::T)
        || !roles_present(|r| *r == Role::B)
        || !roles_present(|r| matches!(r, Role::C(_)))
    {
        return Err(Error::MalformedGraph("graph lacks the t, b and c roles".into()));
    }
    let mut groups: BTreeMap<(u64, [i32; 3]), Vec<usize>> = BTreeMap::new();
    for (v, l) in g.labels.iter().enumerate() {
        if l.role.is_central() {
            groups.entry((l.level, l.cell)).or_default().push(v);
        }
    }
    groups
        .values()
        .map(|members| {
            let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let labels = members.iter().map(|&v| g.labels[v]).collect();
            let edges = g
                .edges
                .iter()
                .filter_map(|&(u, v)| Some((*local.get(&(u as usize))?, *local.get(&(v as usize))?)))
                .collect();
            LabeledGraph::new(g.d, g.s, labels, edges)
        })
        .collect()
}

/// Parallel/crossed marking of every edge of a graph, indexed like `edges()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signing {
    crossed: Vec<bool>,
}

impl Signing {
    pub fn parallel(g: &LabeledGraph) -> Self {
        Signing { crossed: vec![false; g.edge_count()] }
    }

    pub fn from_crossed(crossed: Vec<bool>) -> Self {
        Signing { crossed }
    }

    pub fn from_fn(g: &LabeledGraph, mut crossed: impl FnMut(usize, usize) -> bool) -> Self {
        Signing { crossed: g.edges.iter().map(|&(u, v)| crossed(u as usize, v as usize)).collect() }
    }

    pub fn is_crossed(&self, edge: usize) -> bool {
        self.crossed[edge]
    }

    pub fn len(&self) -> usize {
        self.crossed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossed.is_empty()
    }
}

/// Double cover of `g`: every vertex gets a lower (new bit 0) and an upper
/// (new bit 1) copy. Parallel edges join equal copies, crossed edges join
/// opposite ones.
pub fn two_lift(g: &LabeledGraph, signing: &Signing) -> Result<LabeledGraph> {
    if signing.len() != g.edge_count() {
        return Err(Error::MalformedGraph(format!(
            "signing covers {} edges, graph has {}",
            signing.len(),
            g.edge_count()
        )));
    }
    if g.s >= MAX_LEVEL_BITS {
        return Err(Error::MalformedGraph("level bits exhausted".into()));
    }
    let bit = 1u64 << g.s;
    let n = g.vertex_count();
    let mut labels = Vec::with_capacity(2 * n);
    for l in &g.labels {
        labels.push(*l);
    }
    for l in &g.labels {
        labels.push(Label::new(l.role, l.level | bit, l.cell));
    }
    let mut edges = Vec::with_capacity(2 * g.edge_count());
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        let (u, v) = (u as usize, v as usize);
        if signing.crossed[e] {
            if g.labels[u].role.is_central() && g.labels[v].role.is_central() {
                return Err(Error::CentralEdgeCrossed { u, v });
            }
            edges.push((u, v + n));
            edges.push((u + n, v));
        } else {
            edges.push((u, v));
            edges.push((u + n, v + n));
        }
    }
    LabeledGraph::new(g.d, g.s + 1, labels, edges)
}

/// Structural checks on a graph; failures are reported, not raised.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub simple: bool,
    pub labels_unique: bool,
    pub bipartite: bool,
    /// `None` when the graph has plain vertices and no prescribed coloring.
    pub coloring_matches_roles: Option<bool>,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub regular: Option<bool>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.simple
            && self.labels_unique
            && self.bipartite
            && self.coloring_matches_roles != Some(false)
            && self.regular != Some(false)
    }
}

pub fn validate(g: &LabeledGraph, expect_regular: Option<usize>) -> ValidationReport {
    let simple = g.edges.iter().all(|&(u, v)| u < v) && g.edges.windows(2).all(|w| w[0] < w[1]);
    let labels_unique = g.labels.windows(2).all(|w| w[0] < w[1]);

    let n = g.vertex_count();
    let mut side: Vec<Option<bool>> = vec![None; n];
    let mut bipartite = true;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if side[start].is_some() {
            continue;
        }
        side[start] = Some(false);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let su = side[u].unwrap();
            for &w in &g.adjacency[u] {
                match side[w as usize] {
                    None => {
                        side[w as usize] = Some(!su);
                        queue.push_back(w as usize);
                    }
                    Some(sw) if sw == su => bipartite = false,
                    _ => {}
                }
            }
        }
    }

    let coloring_matches_roles = if g.labels.iter().any(|l| l.role.color().is_none()) {
        None
    } else {
        Some(g.edges.iter().all(|&(u, v)| g.labels[u as usize].role.color() != g.labels[v as usize].role.color()))
    };

    let mut degree_histogram = BTreeMap::new();
    for v in 0..n {
        *degree_histogram.entry(g.degree(v)).or_insert(0) += 1;
    }
    let regular = expect_regular.map(|k| degree_histogram.keys().all(|&deg| deg == k));

    ValidationReport {
        vertex_count: n,
        edge_count: g.edge_count(),
        simple,
        labels_unique,
        bipartite,
        coloring_matches_roles,
        degree_histogram,
        regular,
    }
}
