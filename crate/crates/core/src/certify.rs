//! Choosing level bits so that the lattice has no 6-cycles and no 4-cycles
//! outside the central copies.
//!
//! A base cycle lifts to a closed cycle of the same length only if its net
//! displacement is zero and, at every stage, it crosses an even number of
//! times. The constraint cycles are the zero-displacement 4- and 6-cycles of
//! the base other than the central 4-cycles; a set of stage vectors
//! certifies the lattice when every constraint cycle has odd overlap with at
//! least one stage.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::census::{voltage_census, CensusReport};
use crate::cycles::{antipodal_tally, cycle_voltage, fold_cycles, PairingTally};
use crate::entropy::central_counts;
use crate::error::{Error, Result};
use crate::graph::{format_level, MAX_LEVEL_BITS};
use crate::voltage::{build_base_graph, voltage_group_generated, BaseGraph, VoltageAssignment};

/// Default number of random candidates per greedy stage.
pub const DEFAULT_POOL: usize = 64;

/// Uncovered constraints are held in memory once at most this many remain;
/// above it every stage re-enumerates the base cycles.
const MATERIALIZE_LIMIT: u64 = 1 << 22;

/// A constraint cycle: its length, vertex sequence and edge ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstraintCycle {
    pub length: u8,
    pub vertices: [u16; 6],
    pub edges: [u16; 6],
}

impl ConstraintCycle {
    pub fn vertices(&self) -> &[u16] {
        &self.vertices[..self.length as usize]
    }

    pub fn edges(&self) -> &[u16] {
        &self.edges[..self.length as usize]
    }

    /// GF(2) incidence vector over the base edges.
    pub fn incidence(&self, edge_count: usize) -> Vec<bool> {
        let mut v = vec![false; edge_count];
        for &e in self.edges() {
            v[e as usize] = true;
        }
        v
    }

    fn xor(&self, words: &[u64]) -> u64 {
        self.edges().iter().fold(0, |acc, &e| acc ^ words[e as usize])
    }
}

/// The zero-displacement non-central 4- and 6-cycles of a base graph.
///
/// The set is enumerated on demand rather than stored: for large `d` it has
/// hundreds of millions of members.
pub struct ConstraintSet<'a> {
    base: &'a BaseGraph,
    members: Members,
    fours: u64,
    sixes: u64,
}

enum Members {
    /// Every zero-displacement non-central cycle under these displacements.
    Enumerated(VoltageAssignment),
    Listed(Vec<ConstraintCycle>),
}

fn is_constraint(base: &BaseGraph, volt: &VoltageAssignment, vertices: &[u16], edges: &[u16]) -> bool {
    !edges.iter().all(|&e| base.is_central_edge(e as usize)) && cycle_voltage(base, volt, vertices, edges).0 == [0; 3]
}

impl<'a> ConstraintSet<'a> {
    pub fn base(&self) -> &BaseGraph {
        self.base
    }

    pub fn len(&self) -> u64 {
        self.fours + self.sixes
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count_by_length(&self) -> (u64, u64) {
        (self.fours, self.sixes)
    }

    /// An explicit list of cycles, for callers that select constraints
    /// themselves.
    pub fn from_cycles(base: &'a BaseGraph, cycles: Vec<ConstraintCycle>) -> Self {
        let fours = cycles.iter().filter(|c| c.length == 4).count() as u64;
        let sixes = cycles.len() as u64 - fours;
        ConstraintSet { base, members: Members::Listed(cycles), fours, sixes }
    }

    /// Parallel fold over all members, 4-cycles first.
    pub fn fold<T, I, F, R>(&self, identity: I, fold: F, reduce: R) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(&mut T, &[u16], &[u16]) + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        let base = self.base;
        match &self.members {
            Members::Enumerated(volt) => {
                let filtered = |acc: &mut T, v: &[u16], e: &[u16]| {
                    if is_constraint(base, volt, v, e) {
                        fold(acc, v, e);
                    }
                };
                let four = fold_cycles(base, 4, &identity, filtered, &reduce);
                let six = fold_cycles(base, 6, &identity, filtered, &reduce);
                reduce(four, six)
            }
            Members::Listed(list) => {
                let mut acc = identity();
                for c in list {
                    fold(&mut acc, c.vertices(), c.edges());
                }
                acc
            }
        }
    }

    /// All members in canonical order: by length, then smallest vertex, then
    /// traversal order.
    pub fn materialize(&self) -> Vec<ConstraintCycle> {
        self.collect_where(|_| true)
    }

    fn collect_where(&self, keep: impl Fn(&[u16]) -> bool + Sync + Send) -> Vec<ConstraintCycle> {
        let volt = match &self.members {
            Members::Listed(list) => return list.iter().filter(|c| keep(c.edges())).copied().collect(),
            Members::Enumerated(volt) => volt,
        };
        let mut out = Vec::new();
        for len in [4usize, 6] {
            out.extend(fold_cycles(
                self.base,
                len,
                Vec::new,
                |acc: &mut Vec<ConstraintCycle>, v, e| {
                    if is_constraint(self.base, volt, v, e) && keep(e) {
                        let mut c = ConstraintCycle { length: len as u8, vertices: [0; 6], edges: [0; 6] };
                        c.vertices[..len].copy_from_slice(v);
                        c.edges[..len].copy_from_slice(e);
                        acc.push(c);
                    }
                },
                |mut a, b| {
                    a.extend(b);
                    a
                },
            ));
        }
        out
    }
}

/// Enumerates the constraint cycles. Only displacements are used; level
/// bits of `volt` are ignored.
pub fn constraint_cycles<'a>(base: &'a BaseGraph, volt: &VoltageAssignment) -> ConstraintSet<'a> {
    let volt = volt.truncated(0);
    let count = |len| {
        fold_cycles(base, len, || 0u64, |acc, v, e| *acc += is_constraint(base, &volt, v, e) as u64, |a, b| a + b)
    };
    let (fours, sixes) = (count(4), count(6));
    ConstraintSet { base, members: Members::Enumerated(volt), fours, sixes }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Each stage takes the best of a pool of random candidates.
    Greedy,
    /// Each stage takes one uniformly random vector.
    Random,
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Policy::Greedy),
            "random" => Ok(Policy::Random),
            _ => Err(Error::InvalidArgument(format!("unknown policy {s:?}"))),
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Policy::Greedy => "greedy",
            Policy::Random => "random",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub policy: Policy,
    pub max_s: u32,
    pub seed: u64,
    /// Candidates per greedy stage, at most 64.
    pub pool: usize,
}

impl SearchOptions {
    pub fn greedy(max_s: u32, seed: u64) -> Self {
        SearchOptions { policy: Policy::Greedy, max_s, seed, pool: DEFAULT_POOL }
    }
}

/// Stage vectors found by the search, packed per base edge (bit `i` of
/// `bits[e]` is stage `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signings {
    pub s: u32,
    pub bits: Vec<u64>,
    /// Constraints newly covered at each stage.
    pub covered_per_stage: Vec<u64>,
}

/// Counts, for each of up to 64 candidates, how many added words have that
/// candidate's bit set. Bit-sliced: plane `p` holds bit `p` of all 64
/// counters at once.
#[derive(Clone)]
struct SlicedCounter {
    planes: [u64; 40],
}

impl SlicedCounter {
    fn new() -> Self {
        SlicedCounter { planes: [0; 40] }
    }

    fn add(&mut self, word: u64) {
        let mut carry = word;
        for plane in &mut self.planes {
            if carry == 0 {
                break;
            }
            let next = *plane & carry;
            *plane ^= carry;
            carry = next;
        }
    }

    fn counts(&self) -> [u64; 64] {
        let mut out = [0u64; 64];
        for (p, plane) in self.planes.iter().enumerate() {
            for (j, slot) in out.iter_mut().enumerate() {
                *slot += (plane >> j & 1) << p;
            }
        }
        out
    }
}

fn merge_counts(mut a: [u64; 64], b: [u64; 64]) -> [u64; 64] {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Searches for stage vectors covering every constraint cycle.
pub fn search_signings(constraints: &ConstraintSet<'_>, opts: SearchOptions) -> Result<Signings> {
    if opts.max_s == 0 || opts.max_s > MAX_LEVEL_BITS {
        return Err(Error::InvalidArgument(format!("max_s must be in 1..=64, got {}", opts.max_s)));
    }
    let pool = match opts.policy {
        Policy::Greedy => opts.pool,
        Policy::Random => 1,
    };
    if pool == 0 || pool > 64 {
        return Err(Error::InvalidArgument(format!("candidate pool must be in 1..=64, got {pool}")));
    }
    let base = constraints.base;
    let free_edges: Vec<usize> = base.non_central_edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut chosen = vec![0u64; base.edge_count()];
    let mut uncovered = constraints.len();
    let mut held: Option<Vec<ConstraintCycle>> = None;
    let mut covered_per_stage = Vec::new();

    for stage in 0..opts.max_s {
        if uncovered == 0 {
            break;
        }
        if held.is_none() && uncovered <= MATERIALIZE_LIMIT {
            let current = chosen.clone();
            held = Some(constraints.collect_where(move |e| e.iter().fold(0, |a, &e| a ^ current[e as usize]) == 0));
        }

        let mut candidates = vec![0u64; base.edge_count()];
        for j in 0..pool {
            for &e in &free_edges {
                if rng.gen::<bool>() {
                    candidates[e] |= 1 << j;
                }
            }
        }

        let counts = match &held {
            Some(list) => {
                let mut counter = SlicedCounter::new();
                for c in list {
                    counter.add(c.xor(&candidates));
                }
                counter.counts()
            }
            None => constraints
                .fold(
                    SlicedCounter::new,
                    |acc, _, e| {
                        let mut done = 0;
                        let mut word = 0;
                        for &e in e {
                            done ^= chosen[e as usize];
                            word ^= candidates[e as usize];
                        }
                        if done == 0 {
                            acc.add(word);
                        }
                    },
                    |a, b| SlicedCounter::from_counts(merge_counts(a.counts(), b.counts())),
                )
                .counts(),
        };

        let best = (0..pool).fold(0, |best, j| if counts[j] > counts[best] { j } else { best });
        for &e in &free_edges {
            chosen[e] |= (candidates[e] >> best & 1) << stage;
        }
        uncovered -= counts[best];
        covered_per_stage.push(counts[best]);
        if let Some(list) = &mut held {
            list.retain(|c| c.xor(&candidates) >> best & 1 == 0);
            debug_assert_eq!(list.len() as u64, uncovered);
        }
    }
    if uncovered > 0 {
        return Err(Error::BudgetExhausted { max_s: opts.max_s, uncovered });
    }
    Ok(Signings { s: covered_per_stage.len() as u32, bits: chosen, covered_per_stage })
}

impl SlicedCounter {
    fn from_counts(counts: [u64; 64]) -> Self {
        let mut planes = [0u64; 40];
        for (j, &c) in counts.iter().enumerate() {
            for (p, plane) in planes.iter_mut().enumerate() {
                *plane |= (c >> p & 1) << j;
            }
        }
        SlicedCounter { planes }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFlags {
    pub no_zero_voltage_hexes: bool,
    pub no_zero_voltage_stray4s: bool,
    pub voltage_group_generated: bool,
}

impl CertificateFlags {
    pub fn all(&self) -> bool {
        self.no_zero_voltage_hexes && self.no_zero_voltage_stray4s && self.voltage_group_generated
    }
}

/// Result of checking an assignment from scratch.
#[derive(Clone, Debug)]
pub struct Verification {
    pub flags: CertificateFlags,
    /// Counts from the pairing enumeration, independent of the search.
    pub tally: PairingTally,
    pub census: CensusReport,
    /// Per-cube `(C_4, theta)` of the central copies alone.
    pub expected_central: (u128, u128),
    pub elapsed: std::time::Duration,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.flags.all()
    }

    pub fn constraint_count(&self) -> u64 {
        self.tally.four.zero_displacement + self.tally.six.zero_displacement
    }

    pub fn transcript(&self) -> String {
        let mut out = String::new();
        let t = &self.tally;
        let c = &self.census;
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        let _ = writeln!(out, "lattice d = {}, s = {}", c.d, c.s);
        let _ = writeln!(
            out,
            "constraint cycles (pairing enumeration): {} four, {} six",
            t.four.zero_displacement, t.six.zero_displacement
        );
        let _ = writeln!(out, "  uncovered: {} four, {} six", t.four.zero_voltage, t.six.zero_voltage);
        let _ = writeln!(out, "per-cube census ({} vertices per cube):", c.vertices);
        let _ = writeln!(out, "  C4 total   {} (central {}, stray {})", c.c4_total, c.c4_central, c.c4_stray);
        let _ = writeln!(out, "  C6         {}", c.c6);
        let _ = writeln!(out, "  theta222   {}", c.theta222);
        let _ = writeln!(
            out,
            "  expected from central copies: C4 {}, theta222 {}",
            self.expected_central.0, self.expected_central.1
        );
        let _ = writeln!(out, "flags:");
        let _ = writeln!(out, "  no zero-voltage 6-cycles       {}", mark(self.flags.no_zero_voltage_hexes));
        let _ = writeln!(out, "  no zero-voltage stray 4-cycles {}", mark(self.flags.no_zero_voltage_stray4s));
        let _ = writeln!(out, "  voltage group generated        {}", mark(self.flags.voltage_group_generated));
        let _ = writeln!(out, "verification time: {:.2?}", self.elapsed);
        out
    }
}

/// Checks an assignment independently of how it was found.
pub fn verify_certificate(base: &BaseGraph, volt: &VoltageAssignment) -> Verification {
    let started = std::time::Instant::now();
    let tally = antipodal_tally(base, volt);
    let census = voltage_census(base, volt);
    let levels = 1u128 << volt.level_bit_count();
    let (c4, theta) = central_counts(base.degree() as u64);
    let expected_central = (levels * c4 as u128, levels * theta as u128);
    let flags = CertificateFlags {
        no_zero_voltage_hexes: tally.six.zero_voltage == 0 && census.c6 == 0,
        no_zero_voltage_stray4s: tally.four.zero_voltage == 0
            && census.c4_stray == 0
            && census.c4_central == expected_central.0
            && census.theta222 == expected_central.1,
        voltage_group_generated: voltage_group_generated(base, volt),
    };
    Verification { flags, tally, census, expected_central, elapsed: started.elapsed() }
}

/// A lift sequence for degree `d` with its verification record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCertificate {
    pub d: u32,
    pub s: u32,
    /// Stage bits packed per base edge in canonical edge order.
    pub bits: Vec<u64>,
    pub flags: CertificateFlags,
    pub constraint_count: u64,
    pub seed: u64,
    pub policy: Policy,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    d: u32,
    s: u32,
    level_bits: Vec<String>,
    edge_order: Vec<[String; 2]>,
    flags: CertificateFlags,
    constraint_count: u64,
    seed: u64,
    policy: Policy,
}

impl LiftCertificate {
    pub fn assignment(&self) -> Result<(BaseGraph, VoltageAssignment)> {
        let (base, volt) = build_base_graph(self.d)?;
        let volt = volt.with_level_bits(&base, self.s, self.bits.clone())?;
        Ok((base, volt))
    }

    pub fn to_json(&self) -> Result<String> {
        let (base, _) = build_base_graph(self.d)?;
        let level_bits = (0..self.s)
            .map(|stage| self.bits.iter().map(|b| if b >> stage & 1 == 1 { '1' } else { '0' }).collect())
            .collect();
        let json = CertificateJson {
            d: self.d,
            s: self.s,
            level_bits,
            edge_order: base.edge_names(),
            flags: self.flags,
            constraint_count: self.constraint_count,
            seed: self.seed,
            policy: self.policy,
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    /// Parses a certificate. The flags are read as recorded; callers that
    /// rely on them re-verify with [`verify_certificate`].
    pub fn from_json(text: &str) -> Result<Self> {
        let json: CertificateJson = serde_json::from_str(text)?;
        let (base, _) = build_base_graph(json.d)?;
        if json.edge_order != base.edge_names() {
            return Err(Error::InvalidCertificate("edge order differs from the canonical base edge order".into()));
        }
        if json.level_bits.len() != json.s as usize {
            return Err(Error::InvalidCertificate(format!(
                "{} stage vectors for s = {}",
                json.level_bits.len(),
                json.s
            )));
        }
        let mut bits = vec![0u64; base.edge_count()];
        for (stage, vector) in json.level_bits.iter().enumerate() {
            if vector.len() != base.edge_count() {
                return Err(Error::InvalidCertificate(format!(
                    "stage {stage} has {} bits for {} edges",
                    vector.len(),
                    base.edge_count()
                )));
            }
            for (e, ch) in vector.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => bits[e] |= 1 << stage,
                    _ => return Err(Error::InvalidCertificate(format!("stage {stage} is not a bit string"))),
                }
            }
        }
        for (e, &b) in bits.iter().enumerate() {
            if base.is_central_edge(e) && b != 0 {
                return Err(Error::InvalidCertificate(format!("central edge {:?} is crossed", base.edge_names()[e])));
            }
        }
        Ok(LiftCertificate {
            d: json.d,
            s: json.s,
            bits,
            flags: json.flags,
            constraint_count: json.constraint_count,
            seed: json.seed,
            policy: json.policy,
        })
    }

    /// Level of every base edge as a bit string, in canonical edge order.
    pub fn edge_levels(&self) -> Vec<String> {
        self.bits.iter().map(|&b| format_level(b, self.s)).collect()
    }
}

/// Outcome of a full construction run.
pub struct Construction {
    pub certificate: LiftCertificate,
    pub verification: Verification,
    pub signings: Signings,
    pub search_time: std::time::Duration,
}

/// Enumerates constraints, searches for stage vectors and verifies them.
pub fn construct(d: u32, opts: SearchOptions) -> Result<Construction> {
    let started = std::time::Instant::now();
    let (base, volt) = build_base_graph(d)?;
    let constraints = constraint_cycles(&base, &volt);
    let signings = search_signings(&constraints, opts)?;
    let search_time = started.elapsed();
    let volt = volt.with_level_bits(&base, signings.s, signings.bits.clone())?;
    let verification = verify_certificate(&base, &volt);
    let certificate = LiftCertificate {
        d,
        s: signings.s,
        bits: signings.bits.clone(),
        flags: verification.flags,
        constraint_count: constraints.len(),
        seed: opts.seed,
        policy: opts.policy,
    };
    Ok(Construction { certificate, verification, signings, search_time })
}
