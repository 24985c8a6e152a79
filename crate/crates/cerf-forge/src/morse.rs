//! Sliced functions on closed oriented surfaces: finite event lists describing
//! how level circles are born, merge, split, and die as the height sweeps
//! upward, plus the Reeb graph and the cut systems it induces.

use crate::linalg::det;
use crate::surface::{CutSystem, HomologyClass, SymplecticLattice};
use crate::{Error, Result, ValidationReport};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

pub type CircleId = String;

/// Exact height of an event; serialized as "n" or "n/d".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Height(pub Rational64);

impl Height {
    pub fn integer(n: i64) -> Self {
        Height(Rational64::from_integer(n))
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Height {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let mut parts = s.splitn(2, '/');
        let num_part = parts.next().unwrap_or("");
        let num: i64 = num_part
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in rational {:?}", s))?;
        match parts.next() {
            None => Ok(Height(Rational64::from_integer(num))),
            Some(den_part) => {
                let den: i64 = den_part
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad denominator in rational {:?}", s))?;
                if den == 0 {
                    return Err(format!("zero denominator in rational {:?}", s));
                }
                Ok(Height(Rational64::new(num, den)))
            }
        }
    }
}

impl Serialize for Height {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Height {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Height::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// One critical event of a sliced function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorseEvent {
    /// Index-0 point: a new level circle appears.
    Birth { circle: CircleId },
    /// Index-2 point: a level circle disappears.
    Death { circle: CircleId },
    /// Saddle joining two distinct circles into one.
    Merge { inputs: [CircleId; 2], output: CircleId },
    /// Saddle splitting one circle into two.
    Split { input: CircleId, outputs: [CircleId; 2] },
}

impl MorseEvent {
    pub fn is_saddle(&self) -> bool {
        matches!(self, MorseEvent::Merge { .. } | MorseEvent::Split { .. })
    }

    /// Circles alive just below the event that it consumes.
    pub fn inputs(&self) -> Vec<&CircleId> {
        match self {
            MorseEvent::Birth { .. } => vec![],
            MorseEvent::Death { circle } => vec![circle],
            MorseEvent::Merge { inputs, .. } => inputs.iter().collect(),
            MorseEvent::Split { input, .. } => vec![input],
        }
    }

    /// Circles the event creates.
    pub fn outputs(&self) -> Vec<&CircleId> {
        match self {
            MorseEvent::Birth { circle } => vec![circle],
            MorseEvent::Death { .. } => vec![],
            MorseEvent::Merge { output, .. } => vec![output],
            MorseEvent::Split { outputs, .. } => outputs.iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedEvent {
    pub height: Height,
    pub event: MorseEvent,
}

/// A function on a closed oriented surface presented as its ordered list of
/// critical events at strictly increasing heights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlicedMorseFunction {
    pub events: Vec<TimedEvent>,
}

/// Validation outcome; `genus` is present exactly when every check passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionReport {
    pub genus: Option<usize>,
    pub report: ValidationReport,
}

impl SlicedMorseFunction {
    pub fn new(events: Vec<TimedEvent>) -> Self {
        SlicedMorseFunction { events }
    }

    /// The standard genus-g function: one birth, then a split and a merge per
    /// handle, then one death. Event indices 2h+1, 2h+2 hold handle h's
    /// split and merge.
    pub fn standard(genus: usize) -> Self {
        let mut events = Vec::with_capacity(2 * genus + 2);
        let mut h = 0i64;
        let mut push = |ev: MorseEvent, h: &mut i64| {
            events.push(TimedEvent { height: Height::integer(*h), event: ev });
            *h += 1;
        };
        push(MorseEvent::Birth { circle: "c0".into() }, &mut h);
        for handle in 0..genus {
            push(
                MorseEvent::Split {
                    input: format!("c{}", handle),
                    outputs: [format!("h{}l", handle), format!("h{}r", handle)],
                },
                &mut h,
            );
            push(
                MorseEvent::Merge {
                    inputs: [format!("h{}l", handle), format!("h{}r", handle)],
                    output: format!("c{}", handle + 1),
                },
                &mut h,
            );
        }
        push(MorseEvent::Death { circle: format!("c{}", genus) }, &mut h);
        SlicedMorseFunction { events }
    }

    /// Full structural validation. Connectivity and genus are only reported
    /// when the combinatorial checks pass.
    pub fn validate(&self) -> FunctionReport {
        let mut report = ValidationReport::new();
        if self.events.is_empty() {
            report.push("NO_EVENTS", "a function on a closed surface has at least two events");
            return FunctionReport { genus: None, report };
        }

        for w in self.events.windows(2) {
            if w[0].height == w[1].height {
                report.push(
                    "DUPLICATE_HEIGHT",
                    format!("two events share height {}", w[0].height),
                );
            } else if w[0].height > w[1].height {
                report.push(
                    "NONMONOTONE_HEIGHT",
                    format!("height {} is followed by {}", w[0].height, w[1].height),
                );
            }
        }

        let mut created: BTreeMap<&str, usize> = BTreeMap::new();
        let mut live: BTreeSet<&str> = BTreeSet::new();
        for (idx, te) in self.events.iter().enumerate() {
            let ins = te.event.inputs();
            if ins.len() == 2 && ins[0] == ins[1] {
                report.push("SELF_MERGE", format!("event {} merges a circle with itself", idx));
                continue;
            }
            let outs = te.event.outputs();
            if outs.len() == 2 && outs[0] == outs[1] {
                report.push("SELF_SPLIT", format!("event {} splits into one circle twice", idx));
                continue;
            }
            let mut ok = true;
            for c in &ins {
                if !live.remove(c.as_str()) {
                    report.push(
                        "CIRCLE_NOT_LIVE",
                        format!("event {} consumes circle {:?} which is not alive", idx, c),
                    );
                    ok = false;
                }
            }
            for c in &outs {
                if created.contains_key(c.as_str()) {
                    report.push(
                        "CIRCLE_REUSED",
                        format!("event {} re-creates circle id {:?}", idx, c),
                    );
                    ok = false;
                } else if ok {
                    created.insert(c.as_str(), idx);
                    live.insert(c.as_str());
                }
            }
        }
        if !live.is_empty() {
            let names: Vec<&str> = live.iter().copied().collect();
            report.push(
                "CIRCLES_LIVE_AT_END",
                format!("circles {:?} never disappear", names),
            );
        }

        if !report.valid() {
            return FunctionReport { genus: None, report };
        }

        // Connectivity of the Reeb graph: union events through circles.
        let n = self.events.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        let mut consumed_at: BTreeMap<&str, usize> = BTreeMap::new();
        for (idx, te) in self.events.iter().enumerate() {
            for c in te.event.inputs() {
                consumed_at.insert(c.as_str(), idx);
            }
        }
        for (c, &birth_idx) in &created {
            let death_idx = consumed_at[c];
            let ra = find(&mut parent, birth_idx);
            let rb = find(&mut parent, death_idx);
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let root = find(&mut parent, 0);
        let connected = (0..n).all(|v| find(&mut parent, v) == root);
        if !connected {
            report.push("DISCONNECTED", "the events describe a disconnected surface");
            return FunctionReport { genus: None, report };
        }

        let (mut births, mut deaths, mut merges, mut splits) = (0i64, 0i64, 0i64, 0i64);
        for te in &self.events {
            match te.event {
                MorseEvent::Birth { .. } => births += 1,
                MorseEvent::Death { .. } => deaths += 1,
                MorseEvent::Merge { .. } => merges += 1,
                MorseEvent::Split { .. } => splits += 1,
            }
        }
        let chi = births + deaths - merges - splits;
        let two_g = 2 - chi;
        if two_g < 0 || two_g % 2 != 0 {
            report.push(
                "GENUS_INVALID",
                format!("Euler characteristic {} is not that of a closed orientable surface", chi),
            );
            return FunctionReport { genus: None, report };
        }
        let genus = (two_g / 2) as usize;
        // Cross-check against the cycle rank of the Reeb graph.
        let edge_count = created.len() as i64;
        debug_assert_eq!(genus as i64, edge_count - n as i64 + 1);
        FunctionReport { genus: Some(genus), report }
    }

    /// Genus of a valid function; errors with the first failure otherwise.
    pub fn genus(&self) -> Result<usize> {
        let fr = self.validate();
        fr.genus.ok_or(Error::InvalidFunction { detail: fr.report.summary() })
    }

    pub fn saddle_count(&self) -> usize {
        self.events.iter().filter(|te| te.event.is_saddle()).count()
    }

    /// Deterministic pseudo-random valid function with at most `max_events`
    /// events. Used for randomized consistency checks.
    pub fn random_valid(seed: u64, max_events: usize) -> SlicedMorseFunction {
        assert!(max_events >= 2);
        let mut rng = SplitMix64::new(seed);
        let target = 2 + rng.below(max_events - 1);
        let mut events: Vec<MorseEvent> = Vec::new();
        // components of the partial surface, each listing its live circles
        let mut comps: Vec<Vec<String>> = Vec::new();
        let mut next_id = 0usize;
        let fresh = |next_id: &mut usize| {
            let s = format!("c{}", *next_id);
            *next_id += 1;
            s
        };

        let c = fresh(&mut next_id);
        events.push(MorseEvent::Birth { circle: c.clone() });
        comps.push(vec![c]);

        loop {
            let live: usize = comps.iter().map(|c| c.len()).sum();
            let closure_cost = live; // live-1 merges plus one death
            let remaining = target.saturating_sub(events.len());
            if remaining <= closure_cost {
                break;
            }
            let room_to_grow = remaining >= closure_cost + 2;
            let mut actions: Vec<u8> = Vec::new();
            if room_to_grow {
                actions.push(0); // birth
                if live >= 1 {
                    actions.extend_from_slice(&[1, 1, 1]); // split
                }
            }
            if live >= 2 {
                actions.extend_from_slice(&[2, 2]); // merge
            }
            if comps.iter().any(|c| c.len() >= 2) {
                actions.push(3); // death
            }
            if actions.is_empty() {
                break;
            }
            match actions[rng.below(actions.len())] {
                0 => {
                    let c = fresh(&mut next_id);
                    events.push(MorseEvent::Birth { circle: c.clone() });
                    comps.push(vec![c]);
                }
                1 => {
                    let (ci, si) = rng.pick_circle(&comps);
                    let input = comps[ci].swap_remove(si);
                    let o1 = fresh(&mut next_id);
                    let o2 = fresh(&mut next_id);
                    events.push(MorseEvent::Split { input, outputs: [o1.clone(), o2.clone()] });
                    comps[ci].push(o1);
                    comps[ci].push(o2);
                }
                2 => {
                    let (ci, si) = rng.pick_circle(&comps);
                    let first = comps[ci].swap_remove(si);
                    let (cj, sj) = rng.pick_circle(&comps);
                    let second = comps[cj].swap_remove(sj);
                    let out = fresh(&mut next_id);
                    events.push(MorseEvent::Merge { inputs: [first, second], output: out.clone() });
                    if ci != cj {
                        // components fuse; keep the lower index
                        let (lo, hi) = if ci < cj { (ci, cj) } else { (cj, ci) };
                        let moved = comps.remove(hi);
                        comps[lo].extend(moved);
                        comps[lo].push(out);
                    } else {
                        comps[ci].push(out);
                    }
                }
                _ => {
                    let big: Vec<usize> =
                        (0..comps.len()).filter(|&i| comps[i].len() >= 2).collect();
                    let ci = big[rng.below(big.len())];
                    let si = rng.below(comps[ci].len());
                    let circle = comps[ci].swap_remove(si);
                    events.push(MorseEvent::Death { circle });
                }
            }
        }

        // Closure: fuse everything to one circle, then kill it. Cross-component
        // merges run first so the end result is connected.
        loop {
            let live: usize = comps.iter().map(|c| c.len()).sum();
            if live <= 1 {
                break;
            }
            let (ci, cj) = if comps.len() >= 2 {
                (0usize, 1usize)
            } else {
                (0usize, 0usize)
            };
            let first = comps[ci].pop().expect("component is nonempty");
            let second = if ci == cj {
                comps[cj].pop().expect("same-component merge needs two circles")
            } else {
                comps[cj].pop().expect("component is nonempty")
            };
            let out = fresh(&mut next_id);
            events.push(MorseEvent::Merge { inputs: [first, second], output: out.clone() });
            if ci != cj && comps[cj].is_empty() {
                comps.remove(cj);
            }
            comps[0].push(out);
            if comps.len() >= 2 && comps[1].is_empty() {
                comps.remove(1);
            }
        }
        let last = comps[0].pop().expect("one live circle remains");
        events.push(MorseEvent::Death { circle: last });

        SlicedMorseFunction::new(
            events
                .into_iter()
                .enumerate()
                .map(|(i, event)| TimedEvent { height: Height::integer(i as i64), event })
                .collect(),
        )
    }
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    fn pick_circle(&mut self, comps: &[Vec<String>]) -> (usize, usize) {
        let total: usize = comps.iter().map(|c| c.len()).sum();
        let mut k = self.below(total);
        for (ci, comp) in comps.iter().enumerate() {
            if k < comp.len() {
                return (ci, k);
            }
            k -= comp.len();
        }
        unreachable!("index within total");
    }
}

/// One edge of the Reeb graph: a level circle with the events bounding it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebEdge {
    pub circle: CircleId,
    pub created: usize,
    pub consumed: usize,
}

/// A fundamental cycle: one chord plus its tree path, each edge signed by
/// whether the cycle traverses it upward (+1) or downward (-1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebCycle {
    pub chord: usize,
    pub signed_edges: Vec<(usize, i64)>,
}

impl ReebCycle {
    pub fn coefficient(&self, edge: usize) -> i64 {
        self.signed_edges
            .iter()
            .find(|(e, _)| *e == edge)
            .map(|(_, s)| *s)
            .unwrap_or(0)
    }
}

/// The Reeb graph of a valid sliced function. Vertices are event indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebGraph {
    pub vertex_count: usize,
    pub edges: Vec<ReebEdge>,
    pub tree_edges: Vec<usize>,
    pub chords: Vec<usize>,
    pub cycles: Vec<ReebCycle>,
    pub genus: usize,
}

impl ReebGraph {
    pub fn degree(&self, vertex: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.created == vertex || e.consumed == vertex)
            .count()
    }
}

/// Builds the Reeb graph; the function must be valid.
pub fn reeb_graph(f: &SlicedMorseFunction) -> Result<ReebGraph> {
    let fr = f.validate();
    let genus = fr
        .genus
        .ok_or_else(|| Error::InvalidFunction { detail: fr.report.summary() })?;

    let n = f.events.len();
    let mut consumed_at: BTreeMap<&str, usize> = BTreeMap::new();
    for (idx, te) in f.events.iter().enumerate() {
        for c in te.event.inputs() {
            consumed_at.insert(c.as_str(), idx);
        }
    }
    // Edges in creation order; each event lists its outputs in order.
    let mut edges: Vec<ReebEdge> = Vec::new();
    for (idx, te) in f.events.iter().enumerate() {
        for c in te.event.outputs() {
            edges.push(ReebEdge {
                circle: c.clone(),
                created: idx,
                consumed: consumed_at[c.as_str()],
            });
        }
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    let mut tree_edges = Vec::new();
    let mut chords = Vec::new();
    // adjacency over tree edges: (neighbor vertex, edge index, +1 if traversed upward)
    let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); n];
    for (ei, e) in edges.iter().enumerate() {
        let ra = find(&mut parent, e.created);
        let rb = find(&mut parent, e.consumed);
        if ra != rb {
            parent[ra] = rb;
            tree_edges.push(ei);
            adj[e.created].push((e.consumed, ei, 1));
            adj[e.consumed].push((e.created, ei, -1));
        } else {
            chords.push(ei);
        }
    }
    debug_assert_eq!(chords.len(), genus);

    let mut cycles = Vec::with_capacity(chords.len());
    for &ci in &chords {
        let chord = &edges[ci];
        // Cycle runs up the chord, then back through the tree from its top
        // to its bottom.
        let mut prev: Vec<Option<(usize, usize, i64)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[chord.consumed] = true;
        queue.push_back(chord.consumed);
        while let Some(v) = queue.pop_front() {
            if v == chord.created {
                break;
            }
            for &(w, ei, dir) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, ei, dir));
                    queue.push_back(w);
                }
            }
        }
        let mut signed_edges = vec![(ci, 1i64)];
        let mut cur = chord.created;
        while cur != chord.consumed {
            let (from, ei, dir) = prev[cur].expect("tree connects all vertices");
            // edge recorded as traversed from `from` to `cur`
            signed_edges.push((ei, dir));
            cur = from;
        }
        cycles.push(ReebCycle { chord: ci, signed_edges });
    }

    Ok(ReebGraph { vertex_count: n, edges, tree_edges, chords, cycles, genus })
}

/// Genus and boundary-circle count of the filled neighborhood of one critical
/// level component, computed from the local level-set graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalNeighborhood {
    pub genus: usize,
    pub boundary_circles: usize,
}

pub fn critical_neighborhood(f: &SlicedMorseFunction, event: usize) -> Result<CriticalNeighborhood> {
    let te = f
        .events
        .get(event)
        .ok_or(Error::IndexOutOfRange { index: event, len: f.events.len() })?;
    // The critical component is a point for an extremum and a wedge of two
    // circles for a saddle; nearby circles below and above bound it.
    let (vertices, loop_edges) = if te.event.is_saddle() { (1i64, 2i64) } else { (1i64, 0i64) };
    let chi = vertices - loop_edges;
    let boundary = (te.event.inputs().len() + te.event.outputs().len()) as i64;
    let two_genus = 2 - chi - boundary;
    debug_assert!(two_genus >= 0 && two_genus % 2 == 0);
    Ok(CriticalNeighborhood {
        genus: (two_genus / 2) as usize,
        boundary_circles: boundary as usize,
    })
}

/// One row of a basis map: read cycle `cycle` into handle slot `handle`,
/// optionally through a chosen level circle on that cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisAssignment {
    pub cycle: usize,
    pub handle: usize,
    pub circle: Option<CircleId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisMap(pub Vec<BasisAssignment>);

impl BasisMap {
    pub fn identity(genus: usize) -> Self {
        BasisMap((0..genus).map(|i| BasisAssignment { cycle: i, handle: i, circle: None }).collect())
    }
}

/// Reads a cut system off a valid sliced function: each chosen level circle
/// contributes the class of its Reeb-cycle incidence vector, written in the
/// a-classes of the assigned handles.
pub fn cut_system_from_morse(
    f: &SlicedMorseFunction,
    lattice: &SymplecticLattice,
    map: Option<&BasisMap>,
) -> Result<CutSystem> {
    let graph = reeb_graph(f)?;
    let g = graph.genus;
    if lattice.genus() != g {
        return Err(Error::GenusMismatch { expected: lattice.genus(), got: g });
    }
    let identity;
    let map = match map {
        Some(m) => m,
        None => {
            identity = BasisMap::identity(g);
            &identity
        }
    };
    if map.0.len() != g {
        return Err(Error::IncompleteBasisMap {
            detail: format!("{} assignments for genus {}", map.0.len(), g),
        });
    }
    let mut cycles_seen = vec![false; g];
    let mut handles_seen = vec![false; g];
    for a in &map.0 {
        if a.cycle >= g || a.handle >= g {
            return Err(Error::IncompleteBasisMap {
                detail: format!("assignment ({}, {}) out of range for genus {}", a.cycle, a.handle, g),
            });
        }
        if std::mem::replace(&mut cycles_seen[a.cycle], true) {
            return Err(Error::IncompleteBasisMap {
                detail: format!("cycle {} assigned twice", a.cycle),
            });
        }
        if std::mem::replace(&mut handles_seen[a.handle], true) {
            return Err(Error::IncompleteBasisMap {
                detail: format!("handle {} assigned twice", a.handle),
            });
        }
    }

    let mut handle_of_cycle = vec![0usize; g];
    for a in &map.0 {
        handle_of_cycle[a.cycle] = a.handle;
    }

    let mut curves = vec![HomologyClass::zero(lattice.rank()); g];
    let mut provenance = vec![None; g];
    for a in &map.0 {
        let edge_idx = match &a.circle {
            None => graph.cycles[a.cycle].chord,
            Some(id) => {
                let ei = graph
                    .edges
                    .iter()
                    .position(|e| &e.circle == id)
                    .ok_or_else(|| Error::InvalidSelection {
                        detail: format!("circle {:?} does not occur in the function", id),
                    })?;
                if graph.cycles[a.cycle].coefficient(ei) == 0 {
                    return Err(Error::InvalidSelection {
                        detail: format!("circle {:?} does not lie on cycle {}", id, a.cycle),
                    });
                }
                ei
            }
        };
        let mut class = HomologyClass::zero(lattice.rank());
        for (ci, cycle) in graph.cycles.iter().enumerate() {
            let s = cycle.coefficient(edge_idx);
            if s != 0 {
                class = class.scaled_add(s, &lattice.a(handle_of_cycle[ci]))?;
            }
        }
        curves[a.handle] = class;
        provenance[a.handle] = Some(graph.edges[edge_idx].circle.clone());
    }

    let cs = CutSystem { genus: g, curves, provenance };
    if g > 0 {
        let sel = crate::linalg::IntMat::from_rows(
            &cs.curves.iter().map(|c| c.0.clone()).collect::<Vec<_>>(),
        );
        // restrict to a-columns to test the selection determinant
        let mut sel_a = crate::linalg::IntMat::zeros(g, g);
        for i in 0..g {
            for h in 0..g {
                sel_a.set(i, h, sel.get(i, 2 * h));
            }
        }
        let d = det(&sel_a);
        if d != 1 && d != -1 {
            return Err(Error::InvalidSelection {
                detail: format!("selected circles have determinant {} over the cycle basis", d),
            });
        }
    }
    let report = crate::surface::validate_cut_system(lattice, &cs);
    debug_assert!(report.valid(), "selection determinant check guarantees validity");
    Ok(cs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> SlicedMorseFunction {
        SlicedMorseFunction::standard(1)
    }

    #[test]
    fn standard_functions_validate_with_expected_genus() {
        for g in 0..5 {
            let f = SlicedMorseFunction::standard(g);
            let fr = f.validate();
            assert!(fr.report.valid(), "genus {}: {}", g, fr.report.summary());
            assert_eq!(fr.genus, Some(g));
            assert_eq!(f.events.len(), 2 * g + 2);
        }
    }

    #[test]
    fn duplicate_height_is_reported() {
        let mut f = torus();
        f.events[2].height = f.events[1].height;
        let fr = f.validate();
        assert!(fr.report.failures.iter().any(|x| x.code == "DUPLICATE_HEIGHT"));
        assert_eq!(fr.genus, None);
    }

    #[test]
    fn dead_circle_cannot_split() {
        let f = SlicedMorseFunction::new(vec![
            TimedEvent { height: Height::integer(0), event: MorseEvent::Birth { circle: "x".into() } },
            TimedEvent { height: Height::integer(1), event: MorseEvent::Death { circle: "x".into() } },
            TimedEvent {
                height: Height::integer(2),
                event: MorseEvent::Split { input: "x".into(), outputs: ["y".into(), "z".into()] },
            },
        ]);
        let fr = f.validate();
        assert!(fr.report.failures.iter().any(|x| x.code == "CIRCLE_NOT_LIVE"));
    }

    #[test]
    fn two_spheres_are_disconnected() {
        let f = SlicedMorseFunction::new(vec![
            TimedEvent { height: Height::integer(0), event: MorseEvent::Birth { circle: "p".into() } },
            TimedEvent { height: Height::integer(1), event: MorseEvent::Death { circle: "p".into() } },
            TimedEvent { height: Height::integer(2), event: MorseEvent::Birth { circle: "q".into() } },
            TimedEvent { height: Height::integer(3), event: MorseEvent::Death { circle: "q".into() } },
        ]);
        let fr = f.validate();
        assert!(fr.report.failures.iter().any(|x| x.code == "DISCONNECTED"));
    }

    #[test]
    fn sphere_with_two_maxima_has_genus_zero() {
        let f = SlicedMorseFunction::new(vec![
            TimedEvent { height: Height::integer(0), event: MorseEvent::Birth { circle: "c".into() } },
            TimedEvent {
                height: Height::integer(1),
                event: MorseEvent::Split { input: "c".into(), outputs: ["u".into(), "v".into()] },
            },
            TimedEvent { height: Height::integer(2), event: MorseEvent::Death { circle: "u".into() } },
            TimedEvent { height: Height::integer(3), event: MorseEvent::Death { circle: "v".into() } },
        ]);
        assert_eq!(f.validate().genus, Some(0));
    }

    #[test]
    fn reeb_graph_of_torus_has_one_cycle() {
        let g = reeb_graph(&torus()).unwrap();
        assert_eq!(g.genus, 1);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(g.cycles.len(), 1);
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 3);
        // The cycle holds exactly the two parallel saddle circles.
        let cyc = &g.cycles[0];
        let on_cycle: Vec<&str> = g
            .edges
            .iter()
            .enumerate()
            .filter(|(ei, _)| cyc.coefficient(*ei) != 0)
            .map(|(_, e)| e.circle.as_str())
            .collect();
        assert_eq!(on_cycle, vec!["h0l", "h0r"]);
    }

    #[test]
    fn critical_neighborhoods_are_planar() {
        let f = torus();
        let birth = critical_neighborhood(&f, 0).unwrap();
        assert_eq!(birth, CriticalNeighborhood { genus: 0, boundary_circles: 1 });
        let saddle = critical_neighborhood(&f, 1).unwrap();
        assert_eq!(saddle, CriticalNeighborhood { genus: 0, boundary_circles: 3 });
    }

    #[test]
    fn torus_cut_system_is_a_curve() {
        let l = SymplecticLattice::new(1);
        let cs = cut_system_from_morse(&torus(), &l, None).unwrap();
        assert_eq!(cs.curves.len(), 1);
        assert!(cs.curves[0] == l.a(0) || cs.curves[0] == l.a(0).neg());
        assert!(cs.provenance[0].is_some());
    }

    #[test]
    fn alternate_circle_selection_spans_the_same_lattice() {
        let l = SymplecticLattice::new(1);
        let f = torus();
        let default = cut_system_from_morse(&f, &l, None).unwrap();
        let map = BasisMap(vec![BasisAssignment { cycle: 0, handle: 0, circle: Some("h0l".into()) }]);
        let other = cut_system_from_morse(&f, &l, Some(&map)).unwrap();
        let s1 = crate::surface::lagrangian_span(&l, &default).unwrap();
        let s2 = crate::surface::lagrangian_span(&l, &other).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn off_cycle_selection_is_rejected() {
        let l = SymplecticLattice::new(1);
        let map = BasisMap(vec![BasisAssignment { cycle: 0, handle: 0, circle: Some("c0".into()) }]);
        assert!(matches!(
            cut_system_from_morse(&torus(), &l, Some(&map)),
            Err(Error::InvalidSelection { .. })
        ));
    }

    #[test]
    fn heights_round_trip_through_strings() {
        for s in ["3", "-4", "1/2", "-7/3"] {
            let h: Height = s.parse().unwrap();
            assert_eq!(h.to_string(), s);
        }
        assert_eq!("2/4".parse::<Height>().unwrap().to_string(), "1/2");
        assert!("1/0".parse::<Height>().is_err());
        assert!("x".parse::<Height>().is_err());
    }

    #[test]
    fn random_functions_are_valid() {
        for seed in 0..200 {
            let f = SlicedMorseFunction::random_valid(seed, 30);
            let fr = f.validate();
            assert!(fr.report.valid(), "seed {}: {}", seed, fr.report.summary());
            assert!(f.events.len() <= 30);
        }
    }
}
