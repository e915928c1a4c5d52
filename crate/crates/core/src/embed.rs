//! Straight-line placement of a full unit graph in the unit cube.
//!
//! Vertices are split into five role sets, each sampled on a rational grid
//! inside its own open box. The left connectors are not sampled: each sits
//! one unit below the right connector it is glued to. A try is good when
//! the edge segments of the 3x3x3 block of translated cubes meet only at
//! shared vertices.
//!
//! Coordinates are stored as integers over a common denominator `q`, with
//! `q <= 2^32`, so every predicate fits in `i128` and is exact.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Axis, GraphJson, Label, LabeledGraph, Role, MIN_DEGREE};
use crate::rational::{self, ratio};

/// Default grid step exponent: points are multiples of `2^-20`.
pub const DEFAULT_RESOLUTION_LOG2: u32 = 20;
/// Largest supported common denominator.
pub const MAX_DENOMINATOR: u64 = 1 << 32;
/// Segment count above which pairs are prefiltered by spatial buckets.
pub const BUCKET_THRESHOLD: usize = 10_000;

pub fn default_resolution() -> BigRational {
    ratio(1, 1u64 << DEFAULT_RESOLUTION_LOG2)
}

/// `[S1, S2, S3, S4, S5]`: `{rx}`, `{ry}`, `{rz}`, `{lx, ly, lz}` and every
/// remaining root role.
pub fn partition_roles(d: u32) -> Result<[Vec<Role>; 5]> {
    if d < MIN_DEGREE {
        return Err(Error::DegreeTooSmall { d });
    }
    let mut rest = vec![Role::T, Role::B];
    rest.extend((1..=d).map(Role::C));
    rest.extend((1..=d - 5).map(Role::F));
    Ok([vec![Role::Rx], vec![Role::Ry], vec![Role::Rz], vec![Role::Lx, Role::Ly, Role::Lz], rest])
}

type Thirds = [(i64, i64); 3];

/// Open box of a sampled role, in thirds of a unit per axis.
fn role_box(role: Role) -> Option<Thirds> {
    const MID: (i64, i64) = (1, 2);
    const HIGH: (i64, i64) = (2, 3);
    match role {
        Role::Lx | Role::Ly | Role::Lz | Role::Vx | Role::Vy | Role::Vz | Role::Plain(_) => None,
        _ => Some(match role.right_axis() {
            Some(Axis::X) => [HIGH, MID, MID],
            Some(Axis::Y) => [MID, HIGH, MID],
            Some(Axis::Z) => [MID, MID, HIGH],
            None => [MID, MID, MID],
        }),
    }
}

/// Multipliers `k` with `lo/3 < k * step / q < hi/3`.
fn grid_range(q: u64, step: u64, (lo, hi): (i64, i64)) -> Option<(i64, i64)> {
    let (q, step) = (q as i128, step as i128);
    let first = (lo as i128 * q).div_euclid(3 * step) + 1;
    let last = (hi as i128 * q - 1).div_euclid(3 * step);
    (first <= last).then_some((first as i64, last as i64))
}

/// A placement of every vertex, as integer numerators over `denom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Try {
    denom: u64,
    step: u64,
    coords: Vec<[i64; 3]>,
}

impl Try {
    /// Wraps explicit rational points; all must share a denominator `<= 2^32`.
    pub fn from_points(points: &[[BigRational; 3]]) -> Result<Self> {
        let mut denom = BigInt::one();
        for c in points.iter().flatten() {
            denom = denom.lcm(c.denom());
        }
        let q = denom
            .to_u64()
            .filter(|&q| q <= MAX_DENOMINATOR)
            .ok_or_else(|| Error::GridTooFine(format!("common denominator {denom} exceeds 2^32")))?;
        let scale = |c: &BigRational| -> Result<i64> {
            (c * BigInt::from(q))
                .to_integer()
                .to_i64()
                .filter(|v| v.unsigned_abs() <= 4 * MAX_DENOMINATOR)
                .ok_or_else(|| Error::InvalidArgument(format!("coordinate {c} is out of range")))
        };
        let coords = points.iter().map(|p| Ok([scale(&p[0])?, scale(&p[1])?, scale(&p[2])?])).collect::<Result<_>>()?;
        Ok(Try { denom: q, step: 1, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn resolution(&self) -> BigRational {
        ratio(self.step, self.denom)
    }

    pub fn denominator(&self) -> u64 {
        self.denom
    }

    pub fn point(&self, v: usize) -> [BigRational; 3] {
        self.coords[v].map(|c| ratio(c, self.denom))
    }

    pub fn points(&self) -> Vec<[BigRational; 3]> {
        (0..self.len()).map(|v| self.point(v)).collect()
    }

    /// The same try moved by an integer vector.
    pub fn translated(&self, by: [i32; 3]) -> Self {
        let q = self.denom as i64;
        let coords = self.coords.iter().map(|p| [0, 1, 2].map(|i| p[i] + by[i] as i64 * q)).collect();
        Try { coords, ..self.clone() }
    }
}

/// The right connector a left connector is glued to, with the cell offset.
fn twin(fug: &LabeledGraph, v: usize) -> Option<(usize, Axis)> {
    let label = fug.label(v);
    let axis = label.role.left_axis()?;
    let partner = fug.find(&Label::new(Role::right(axis), label.level, label.cell))?;
    Some((partner, axis))
}

pub fn sample_try(fug: &LabeledGraph, seed: u64, resolution: &BigRational) -> Result<Try> {
    sample_try_stream(fug, seed, 0, resolution)
}

/// Samples a try from stream `stream` of the seeded generator.
pub fn sample_try_stream(fug: &LabeledGraph, seed: u64, stream: u64, resolution: &BigRational) -> Result<Try> {
    if !resolution.is_positive() {
        return Err(Error::InvalidArgument(format!("grid resolution must be positive, got {resolution}")));
    }
    let q = resolution
        .denom()
        .to_u64()
        .filter(|&q| q <= MAX_DENOMINATOR)
        .ok_or_else(|| Error::GridTooFine(format!("resolution {resolution} needs a denominator above 2^32")))?;
    let step = resolution.numer().to_u64().unwrap_or(u64::MAX);

    // Box in thirds -> (grid multiplier ranges, points to place).
    let mut boxes: BTreeMap<Thirds, (Thirds, usize)> = BTreeMap::new();
    for label in fug.labels() {
        if twin_role(label.role) {
            continue;
        }
        let thirds = role_box(label.role)
            .ok_or_else(|| Error::MalformedGraph(format!("role {} has no placement box", label.role)))?;
        let entry = boxes.entry(thirds).or_insert(([(0, 0); 3], 0));
        for (axis, &interval) in thirds.iter().enumerate() {
            entry.0[axis] = grid_range(q, step, interval).ok_or_else(|| {
                Error::GridTooCoarse(format!("no grid point of step {resolution} inside the open box"))
            })?;
        }
        entry.1 += 1;
    }
    for (ranges, needed) in boxes.values() {
        let capacity: u128 = ranges.iter().map(|(a, b)| (b - a + 1) as u128).product();
        if capacity < *needed as u128 {
            return Err(Error::GridTooCoarse(format!(
                "{needed} distinct points requested from a box with {capacity} grid points"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut coords = vec![[0i64; 3]; fug.vertex_count()];
    let mut used = HashSet::new();
    for (v, label) in fug.labels().iter().enumerate() {
        if twin_role(label.role) {
            continue;
        }
        let thirds = role_box(label.role).expect("checked above");
        let ranges = boxes[&thirds].0;
        loop {
            let k = ranges.map(|(a, b)| rng.gen_range(a..=b));
            if used.insert(k) {
                coords[v] = k.map(|k| k * step as i64);
                break;
            }
        }
    }
    for v in 0..fug.vertex_count() {
        if twin_role(fug.label(v).role) {
            let (partner, axis) = twin(fug, v)
                .ok_or_else(|| Error::MalformedGraph(format!("vertex {v} has no matching right connector")))?;
            let mut p = coords[partner];
            p[axis.index()] -= q as i64;
            coords[v] = p;
        }
    }
    Ok(Try { denom: q, step, coords })
}

fn twin_role(role: Role) -> bool {
    role.left_axis().is_some()
}

/// Lattice vertex: a canonical vertex of the cube plus the cube it lives in.
type Key = (u32, [i32; 3]);

#[derive(Clone, Copy, Debug)]
struct Segment {
    ends: [Key; 2],
    at: [[i64; 3]; 2],
}

const OFFSETS: [i32; 3] = [-1, 0, 1];

fn block_cells() -> impl Iterator<Item = [i32; 3]> {
    OFFSETS.into_iter().flat_map(|x| OFFSETS.into_iter().flat_map(move |y| OFFSETS.into_iter().map(move |z| [x, y, z])))
}

fn block_segments(t: &Try, fug: &LabeledGraph) -> Vec<Segment> {
    let q = t.denom as i64;
    let keys: Vec<(u32, [i32; 3])> = (0..fug.vertex_count())
        .map(|v| match twin(fug, v) {
            Some((partner, axis)) => {
                let mut shift = [0; 3];
                shift[axis.index()] = -1;
                (partner as u32, shift)
            }
            None => (v as u32, [0; 3]),
        })
        .collect();
    let mut segments = Vec::with_capacity(27 * fug.edge_count());
    for cell in block_cells() {
        let place = |v: u32| -> (Key, [i64; 3]) {
            let (id, shift) = keys[v as usize];
            let key = (id, [0, 1, 2].map(|i| cell[i] + shift[i]));
            let p = t.coords[v as usize];
            (key, [0, 1, 2].map(|i| p[i] + cell[i] as i64 * q))
        };
        for &(u, v) in fug.edges() {
            let (ku, pu) = place(u);
            let (kv, pv) = place(v);
            segments.push(Segment { ends: [ku, kv], at: [pu, pv] });
        }
    }
    segments
}

fn sub(a: [i64; 3], b: [i64; 3]) -> [i128; 3] {
    [0, 1, 2].map(|i| a[i] as i128 - b[i] as i128)
}

fn cross(a: [i128; 3], b: [i128; 3]) -> [i128; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [i128; 3], b: [i128; 3]) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn orient2(a: [i128; 2], b: [i128; 2], c: [i128; 2]) -> i128 {
    ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).signum()
}

fn within(a: [i128; 2], b: [i128; 2], p: [i128; 2]) -> bool {
    (0..2).all(|i| a[i].min(b[i]) <= p[i] && p[i] <= a[i].max(b[i]))
}

fn closed_segments_meet_2d(a0: [i128; 2], a1: [i128; 2], b0: [i128; 2], b1: [i128; 2]) -> bool {
    let d1 = orient2(b0, b1, a0);
    let d2 = orient2(b0, b1, a1);
    let d3 = orient2(a0, a1, b0);
    let d4 = orient2(a0, a1, b1);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && within(b0, b1, a0))
        || (d2 == 0 && within(b0, b1, a1))
        || (d3 == 0 && within(a0, a1, b0))
        || (d4 == 0 && within(a0, a1, b1))
}

/// Whether two closed segments without a common endpoint intersect.
fn closed_segments_meet(a: [[i64; 3]; 2], b: [[i64; 3]; 2]) -> bool {
    let u = sub(a[1], a[0]);
    let v0 = sub(b[0], a[0]);
    let v1 = sub(b[1], a[0]);
    if dot(cross(u, v0), v1) != 0 {
        return false;
    }
    let n0 = cross(u, v0);
    let normal = if n0 != [0; 3] { n0 } else { cross(u, v1) };
    let origin = [0i128; 3];
    let (b0, b1) = (v0, v1);
    if normal == [0; 3] {
        let axis = (0..3).max_by_key(|&i| u[i].abs()).unwrap();
        let (lo_a, hi_a) = (origin[axis].min(u[axis]), origin[axis].max(u[axis]));
        let (lo_b, hi_b) = (b0[axis].min(b1[axis]), b0[axis].max(b1[axis]));
        return lo_a.max(lo_b) <= hi_a.min(hi_b);
    }
    let drop = (0..3).max_by_key(|&i| normal[i].abs()).unwrap();
    let keep = match drop {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let flat = |p: [i128; 3]| [p[keep[0]], p[keep[1]]];
    closed_segments_meet_2d(flat(origin), flat(u), flat(b0), flat(b1))
}

/// Whether two distinct edges' segments meet anywhere other than a shared vertex.
fn conflict(a: &Segment, b: &Segment) -> bool {
    for i in 0..2 {
        for j in 0..2 {
            if a.ends[i] == b.ends[j] {
                if a.ends[1 - i] == b.ends[1 - j] {
                    return false;
                }
                let s = a.at[i];
                let u = sub(a.at[1 - i], s);
                let v = sub(b.at[1 - j], s);
                return cross(u, v) == [0; 3] && dot(u, v) > 0;
            }
        }
    }
    closed_segments_meet(a.at, b.at)
}

fn any_conflict(segments: &[Segment], denom: u64) -> bool {
    if segments.len() <= BUCKET_THRESHOLD {
        return (0..segments.len())
            .into_par_iter()
            .any(|i| segments[i + 1..].iter().any(|b| conflict(&segments[i], b)));
    }
    let cell = (denom as i64 / 3).max(1);
    let bucket = |x: i64| x.div_euclid(cell);
    let bounds: Vec<([i64; 3], [i64; 3])> = segments
        .iter()
        .map(|s| {
            let lo = [0, 1, 2].map(|i| bucket(s.at[0][i].min(s.at[1][i])));
            let hi = [0, 1, 2].map(|i| bucket(s.at[0][i].max(s.at[1][i])));
            (lo, hi)
        })
        .collect();
    let mut buckets: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
    for (idx, (lo, hi)) in bounds.iter().enumerate() {
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    buckets.entry([x, y, z]).or_default().push(idx as u32);
                }
            }
        }
    }
    buckets.par_iter().any(|(here, members)| {
        members.iter().enumerate().any(|(n, &i)| {
            members[n + 1..].iter().any(|&j| {
                let (a, b) = (&bounds[i as usize], &bounds[j as usize]);
                // Test each pair once, in the lowest bucket both boxes share.
                let first = [0, 1, 2].map(|k| a.0[k].max(b.0[k]));
                first == *here && conflict(&segments[i as usize], &segments[j as usize])
            })
        })
    })
}

pub fn is_good_try(t: &Try, fug: &LabeledGraph) -> bool {
    assert_eq!(t.len(), fug.vertex_count(), "try does not cover the graph");
    !any_conflict(&block_segments(t, fug), t.denom)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodTry {
    pub placement: Try,
    pub seed: u64,
    /// Attempts used, counting the good one.
    pub attempts: u64,
}

/// First good try among streams `0, 1, 2, ...` of the seeded generator.
pub fn find_good_try(fug: &LabeledGraph, seed: u64, max_attempts: u64, resolution: &BigRational) -> Result<GoodTry> {
    if max_attempts == 0 {
        return Err(Error::InvalidArgument("max attempts must be at least 1".into()));
    }
    for stream in 0..max_attempts {
        let placement = sample_try_stream(fug, seed, stream, resolution)?;
        if is_good_try(&placement, fug) {
            return Ok(GoodTry { placement, seed, attempts: stream + 1 });
        }
    }
    Err(Error::AttemptsExhausted { attempts: max_attempts })
}

/// The four structural properties of a periodic straight-line embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeProperties {
    pub vertices_inside_cubes: bool,
    pub edges_straight: bool,
    pub edges_between_neighbor_cubes: bool,
    pub translation_invariant: bool,
}

impl LatticeProperties {
    pub fn all(&self) -> bool {
        self.vertices_inside_cubes
            && self.edges_straight
            && self.edges_between_neighbor_cubes
            && self.translation_invariant
    }
}

pub fn lattice_properties(t: &Try, fug: &LabeledGraph) -> LatticeProperties {
    let q = t.denom as i64;
    let cube = |p: [i64; 3]| p.map(|c| c.div_euclid(q));
    let vertices_inside_cubes = t.coords.iter().all(|p| p.iter().all(|c| c.rem_euclid(q) != 0));
    let edges_straight = fug.edges().iter().all(|&(u, v)| t.coords[u as usize] != t.coords[v as usize]);
    let edges_between_neighbor_cubes = fug.edges().iter().all(|&(u, v)| {
        let (a, b) = (cube(t.coords[u as usize]), cube(t.coords[v as usize]));
        (0..3).map(|i| (a[i] - b[i]).abs()).sum::<i64>() <= 1
    });
    let mut seen: HashMap<Key, [i64; 3]> = HashMap::new();
    let translation_invariant = block_segments(t, fug)
        .iter()
        .flat_map(|s| s.ends.into_iter().zip(s.at))
        .all(|(key, at)| *seen.entry(key).or_insert(at) == at);
    LatticeProperties { vertices_inside_cubes, edges_straight, edges_between_neighbor_cubes, translation_invariant }
}

/// A full unit graph together with a chosen placement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub graph: LabeledGraph,
    pub placement: Try,
    pub seed: u64,
    pub attempts: u64,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    d: u32,
    s: u32,
    seed: u64,
    attempts: u64,
    #[serde(with = "rational::as_string")]
    resolution: BigRational,
    points: BTreeMap<u32, [String; 3]>,
    graph: GraphJson,
}

impl Embedding {
    pub fn new(graph: LabeledGraph, good: GoodTry) -> Self {
        Embedding { graph, placement: good.placement, seed: good.seed, attempts: good.attempts }
    }

    pub fn to_json(&self) -> Result<String> {
        let points = (0..self.graph.vertex_count())
            .map(|v| (v as u32, self.placement.point(v).map(|c| rational::format(&c))))
            .collect();
        let json = EmbeddingJson {
            d: self.graph.degree_parameter(),
            s: self.graph.level_bits(),
            seed: self.seed,
            attempts: self.attempts,
            resolution: self.placement.resolution(),
            points,
            graph: self.graph.to_json_value(),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: EmbeddingJson = serde_json::from_str(text)?;
        let graph = LabeledGraph::from_json_value(json.graph)?;
        if graph.degree_parameter() != json.d || graph.level_bits() != json.s {
            return Err(Error::MalformedGraph("embedding header does not match its graph".into()));
        }
        if json.points.len() != graph.vertex_count() || json.points.keys().copied().ne(0..graph.vertex_count() as u32) {
            return Err(Error::MalformedGraph("embedding must place every vertex exactly once".into()));
        }
        let points = json
            .points
            .values()
            .map(|p| Ok([rational::parse(&p[0])?, rational::parse(&p[1])?, rational::parse(&p[2])?]))
            .collect::<Result<Vec<_>>>()?;
        let mut placement = Try::from_points(&points)?;
        let step = json.resolution * BigInt::from(placement.denom);
        if let Some(step) = step.is_integer().then(|| step.to_integer().to_u64()).flatten() {
            placement.step = step;
        }
        Ok(Embedding { graph, placement, seed: json.seed, attempts: json.attempts })
    }

    /// Wavefront OBJ line set with floating-point vertices.
    pub fn to_obj(&self) -> String {
        let q = self.placement.denom as f64;
        let mut out = String::from("# straight-line full unit graph\n");
        for p in &self.placement.coords {
            out.push_str(&format!("v {} {} {}\n", p[0] as f64 / q, p[1] as f64 / q, p[2] as f64 / q));
        }
        for &(u, v) in self.graph.edges() {
            out.push_str(&format!("l {} {}\n", u + 1, v + 1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_root_unit_graph;
    use crate::rational::integer;
    use crate::voltage::{build_base_graph, full_unit_graph};
    use proptest::prelude::{prop_assert_eq, proptest, ProptestConfig};

    fn fug(d: u32, s: u32, seed: u64) -> LabeledGraph {
        let root = build_root_unit_graph(d).unwrap();
        let (base, volt) = build_base_graph(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = (0..base.edge_count())
            .map(|e| if base.is_central_edge(e) { 0 } else { rng.gen::<u64>() & ((1 << s) - 1) })
            .collect();
        full_unit_graph(&root, &volt.with_level_bits(&base, s, bits).unwrap()).unwrap()
    }

    fn pts(raw: &[[(i64, i64); 3]]) -> Try {
        let points: Vec<[BigRational; 3]> = raw.iter().map(|p| p.map(|(a, b)| ratio(a, b))).collect();
        Try::from_points(&points).unwrap()
    }

    #[test]
    fn partition_examples() {
        for (d, rest) in [(5, 7), (10, 17)] {
            let sets = partition_roles(d).unwrap();
            assert_eq!(sets[4].len(), rest);
            let mut all: Vec<Role> = sets.concat();
            let count = all.len();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), count);
            let root = build_root_unit_graph(d).unwrap();
            let mut roles: Vec<Role> = root.labels().iter().map(|l| l.role).collect();
            roles.sort();
            assert_eq!(all, roles);
        }
        assert!(partition_roles(4).is_err());
    }

    #[test]
    fn sampled_points_lie_in_boxes() {
        let g = fug(5, 0, 0);
        let t = sample_try(&g, 11, &ratio(1, 1024)).unwrap();
        assert_eq!(t.len(), 13);
        for v in 0..g.vertex_count() {
            let role = g.label(v).role;
            let p = t.point(v);
            for (i, c) in p.iter().enumerate() {
                let (lo, hi) = if role.right_axis().map(Axis::index) == Some(i) {
                    (ratio(2, 3), integer(1))
                } else if role.left_axis().map(Axis::index) == Some(i) {
                    (ratio(-1, 3), integer(0))
                } else {
                    (ratio(1, 3), ratio(2, 3))
                };
                assert!(&lo < c && c < &hi, "{role} axis {i}: {c}");
            }
        }
        let distinct: HashSet<_> = t.coords.iter().collect();
        assert_eq!(distinct.len(), t.len());
    }

    #[test]
    fn left_connectors_are_translated_right_connectors() {
        let g = fug(6, 2, 3);
        let t = sample_try(&g, 5, &default_resolution()).unwrap();
        for v in 0..g.vertex_count() {
            if let Some((partner, axis)) = twin(&g, v) {
                let mut p = t.point(partner);
                p[axis.index()] -= integer(1);
                assert_eq!(t.point(v), p);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = fug(5, 2, 1);
        let r = default_resolution();
        assert_eq!(sample_try(&g, 9, &r).unwrap(), sample_try(&g, 9, &r).unwrap());
        assert_ne!(sample_try(&g, 9, &r).unwrap(), sample_try(&g, 10, &r).unwrap());
    }

    #[test]
    fn coarse_and_fine_grids_are_rejected() {
        let g = fug(5, 0, 0);
        assert!(matches!(sample_try(&g, 0, &integer(1)), Err(Error::GridTooCoarse(_))));
        // Step 1/6 leaves a single interior point per axis, too few for seven roles.
        assert!(matches!(sample_try(&g, 0, &ratio(1, 6)), Err(Error::GridTooCoarse(_))));
        assert!(matches!(sample_try(&g, 0, &ratio(1, 1u64 << 40)), Err(Error::GridTooFine(_))));
        assert!(sample_try(&g, 0, &integer(0)).is_err());
    }

    #[test]
    fn shared_endpoint_segments() {
        let g = LabeledGraph::plain(3, &[(0, 1), (0, 2)]).unwrap();
        let bent = pts(&[[(1, 2), (1, 2), (1, 2)], [(3, 4), (1, 2), (1, 2)], [(1, 2), (3, 4), (1, 2)]]);
        assert!(is_good_try(&bent, &g));
        let opposite = pts(&[[(1, 2), (1, 2), (1, 2)], [(3, 4), (1, 2), (1, 2)], [(1, 4), (1, 2), (1, 2)]]);
        assert!(is_good_try(&opposite, &g));
        let overlapping = pts(&[[(1, 2), (1, 2), (1, 2)], [(3, 4), (1, 2), (1, 2)], [(5, 8), (1, 2), (1, 2)]]);
        assert!(!is_good_try(&overlapping, &g));
    }

    #[test]
    fn crossing_and_touching_segments() {
        let g = LabeledGraph::plain(4, &[(0, 1), (2, 3)]).unwrap();
        let crossing = pts(&[
            [(1, 4), (1, 2), (1, 2)],
            [(3, 4), (1, 2), (1, 2)],
            [(1, 2), (1, 4), (1, 2)],
            [(1, 2), (3, 4), (1, 2)],
        ]);
        assert!(!is_good_try(&crossing, &g));
        let skew = pts(&[
            [(1, 4), (1, 2), (1, 2)],
            [(3, 4), (1, 2), (1, 2)],
            [(1, 2), (1, 4), (5, 8)],
            [(1, 2), (3, 4), (5, 8)],
        ]);
        assert!(is_good_try(&skew, &g));
        let t_junction = pts(&[
            [(1, 4), (1, 2), (1, 2)],
            [(3, 4), (1, 2), (1, 2)],
            [(1, 2), (1, 2), (1, 2)],
            [(1, 2), (3, 4), (1, 2)],
        ]);
        assert!(!is_good_try(&t_junction, &g));
        let collinear_apart = pts(&[
            [(1, 8), (1, 2), (1, 2)],
            [(3, 8), (1, 2), (1, 2)],
            [(5, 8), (1, 2), (1, 2)],
            [(7, 8), (1, 2), (1, 2)],
        ]);
        assert!(is_good_try(&collinear_apart, &g));
        let collinear_overlap = pts(&[
            [(1, 8), (1, 2), (1, 2)],
            [(5, 8), (1, 2), (1, 2)],
            [(3, 8), (1, 2), (1, 2)],
            [(7, 8), (1, 2), (1, 2)],
        ]);
        assert!(!is_good_try(&collinear_overlap, &g));
    }

    #[test]
    fn long_segments_meet_their_translates() {
        let g = LabeledGraph::plain(2, &[(0, 1)]).unwrap();
        let long = pts(&[[(1, 4), (1, 2), (1, 2)], [(3, 2), (1, 2), (1, 2)]]);
        assert!(!is_good_try(&long, &g));
        let diagonal = pts(&[[(1, 4), (1, 4), (1, 2)], [(3, 2), (3, 4), (1, 2)]]);
        assert!(is_good_try(&diagonal, &g));
    }

    #[test]
    fn sampled_d5_s2_try_is_good() {
        let g = fug(5, 2, 7);
        let t = sample_try(&g, 1, &default_resolution()).unwrap();
        assert!(is_good_try(&t, &g));
        assert!(lattice_properties(&t, &g).all());
    }

    #[test]
    fn bucketed_and_direct_checks_agree() {
        let g = fug(5, 4, 2);
        let t = sample_try(&g, 4, &default_resolution()).unwrap();
        let segments = block_segments(&t, &g);
        assert!(segments.len() > BUCKET_THRESHOLD);
        assert!(!any_conflict(&segments, t.denom));
        let mut bad = segments.clone();
        bad[0].at[1] = bad[1].at[1];
        bad[0].ends[1] = (u32::MAX, [0; 3]);
        assert!(any_conflict(&bad, t.denom));
        let direct = |s: &[Segment]| (0..s.len()).any(|i| s[i + 1..].iter().any(|b| conflict(&s[i], b)));
        assert!(direct(&bad[..4000]) == any_conflict(&bad[..4000], t.denom));
    }

    #[test]
    fn find_good_try_examples() {
        let g = fug(5, 3, 5);
        let good = find_good_try(&g, 3, 1000, &default_resolution()).unwrap();
        assert!(good.attempts >= 1 && good.attempts <= 1000);
        assert!(is_good_try(&good.placement, &g));
        assert!(find_good_try(&g, 3, 0, &default_resolution()).is_err());
        // A grid with three points per axis cannot avoid collinear triples.
        let coarse = find_good_try(&fug(5, 2, 5), 3, 20, &ratio(1, 12));
        assert!(matches!(coarse, Err(Error::AttemptsExhausted { attempts: 20 }) | Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn embedding_json_round_trip() {
        let g = fug(5, 1, 8);
        let good = find_good_try(&g, 2, 10, &default_resolution()).unwrap();
        let emb = Embedding::new(g, good);
        let back = Embedding::from_json(&emb.to_json().unwrap()).unwrap();
        assert_eq!(back.placement.points(), emb.placement.points());
        assert_eq!(back.placement.resolution(), emb.placement.resolution());
        assert_eq!(back.graph, emb.graph);
        assert!(is_good_try(&back.placement, &back.graph));
        let obj = emb.to_obj();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), emb.graph.vertex_count());
        assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), emb.graph.edge_count());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn verdict_is_translation_invariant(seed in 0u64..1000, x in -3i32..3, y in -3i32..3, z in -3i32..3) {
            let g = fug(5, 1, seed);
            let t = sample_try(&g, seed, &ratio(1, 24)).unwrap();
            prop_assert_eq!(is_good_try(&t, &g), is_good_try(&t.translated([x, y, z]), &g));
        }
    }
}
