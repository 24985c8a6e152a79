//! Neighborhoods of critical levels holding several saddle points at once,
//! modeled as 4-valent ribbon graphs whose corners are colored by the side of
//! the level they touch. Includes the exhaustive censuses of 2- and 3-vertex
//! neighborhoods and the smoothing that removes one saddle.

use crate::{configured_threads, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const VALENCE: usize = 4;

/// Which side of the critical level a corner (or boundary circle) touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Side> {
        match c {
            '+' => Some(Side::Plus),
            '-' => Some(Side::Minus),
            _ => None,
        }
    }
}

#[inline]
fn vertex_of(h: usize) -> usize {
    h / VALENCE
}

#[inline]
fn rot_next(h: usize) -> usize {
    VALENCE * (h / VALENCE) + (h % VALENCE + 1) % VALENCE
}

/// Boundary walks of a matching: orbits of h -> rot_next(partner[h]).
fn boundary_orbits(partner: &[usize]) -> Vec<Vec<usize>> {
    let n = partner.len();
    let mut seen = vec![false; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            orbit.push(h);
            h = rot_next(partner[h]);
        }
        orbits.push(orbit);
    }
    orbits
}

/// A separating critical-level neighborhood: a connected 4-valent ribbon
/// graph with alternating corner colors whose boundary circles are each
/// entirely on one side. Construction validates every invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonNeighborhood {
    vertices: usize,
    partner: Vec<usize>,
    corners: Vec<Side>,
    boundary_sides: Vec<Side>,
    genus: usize,
}

impl RibbonNeighborhood {
    pub fn new(vertices: usize, partner: Vec<usize>, corners: Vec<Side>) -> Result<Self> {
        let n = VALENCE * vertices;
        if vertices == 0 {
            return Err(Error::InvalidRibbon {
                code: "RIBBON_BAD_SHAPE",
                detail: "a neighborhood holds at least one saddle".into(),
            });
        }
        if partner.len() != n || corners.len() != n {
            return Err(Error::InvalidRibbon {
                code: "RIBBON_BAD_SHAPE",
                detail: format!(
                    "expected {} strand ends and corners for {} saddles, got {} and {}",
                    n,
                    vertices,
                    partner.len(),
                    corners.len()
                ),
            });
        }
        for h in 0..n {
            let p = partner[h];
            if p >= n || p == h || partner[p] != h {
                return Err(Error::InvalidRibbon {
                    code: "RIBBON_BAD_MATCHING",
                    detail: format!("strand-end pairing is not a fixed-point-free involution at {}", h),
                });
            }
        }

        let mut comp: Vec<usize> = (0..vertices).collect();
        fn find(comp: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while comp[r] != r {
                r = comp[r];
            }
            let mut c = x;
            while comp[c] != r {
                let next = comp[c];
                comp[c] = r;
                c = next;
            }
            r
        }
        for h in 0..n {
            let (a, b) = (vertex_of(h), vertex_of(partner[h]));
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            if ra != rb {
                comp[ra] = rb;
            }
        }
        let root = find(&mut comp, 0);
        if (0..vertices).any(|v| find(&mut comp, v) != root) {
            return Err(Error::InvalidRibbon {
                code: "RIBBON_DISCONNECTED",
                detail: "the neighborhood graph is disconnected".into(),
            });
        }

        for v in 0..vertices {
            for s in 0..VALENCE {
                let a = VALENCE * v + s;
                let b = VALENCE * v + (s + 1) % VALENCE;
                if corners[a] == corners[b] {
                    return Err(Error::InvalidRibbon {
                        code: "RIBBON_CORNERS_NOT_ALTERNATING",
                        detail: format!("corners {} and {} of saddle {} share a side", s, (s + 1) % VALENCE, v),
                    });
                }
            }
        }

        let orbits = boundary_orbits(&partner);
        let mut boundary_sides = Vec::with_capacity(orbits.len());
        for orbit in &orbits {
            // Walking past partner[h] crosses the corner with that index.
            let side = corners[partner[orbit[0]]];
            for &h in orbit {
                if corners[partner[h]] != side {
                    return Err(Error::InvalidRibbon {
                        code: "RIBBON_BOUNDARY_BICOLORED",
                        detail: "a boundary circle touches both sides of the level".into(),
                    });
                }
            }
            boundary_sides.push(side);
        }

        // chi = V - E with E = 2V; closing each boundary circle with a disk
        // gives a closed orientable surface, so 2 + V - b is even and >= 0.
        let b = boundary_sides.len() as i64;
        let two_genus = 2 + vertices as i64 - b;
        debug_assert!(two_genus >= 0 && two_genus % 2 == 0);
        let genus = (two_genus / 2) as usize;

        debug_assert!(boundary_sides.contains(&Side::Plus) && boundary_sides.contains(&Side::Minus));

        Ok(RibbonNeighborhood { vertices, partner, corners, boundary_sides, genus })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn partner(&self) -> &[usize] {
        &self.partner
    }

    pub fn corners(&self) -> &[Side] {
        &self.corners
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary_circles(&self) -> usize {
        self.boundary_sides.len()
    }

    pub fn boundary_sides(&self) -> &[Side] {
        &self.boundary_sides
    }

    pub fn side_counts(&self) -> (usize, usize) {
        let plus = self.boundary_sides.iter().filter(|s| **s == Side::Plus).count();
        (plus, self.boundary_sides.len() - plus)
    }

    /// (genus, boundary circles); the pair tested by the census assertions.
    pub fn profile(&self) -> (usize, usize) {
        (self.genus, self.boundary_circles())
    }

    pub fn corner_string(&self) -> String {
        self.corners.iter().map(|s| s.as_char()).collect()
    }
}

fn encode(partner: &[usize], corners: &[Side]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * partner.len());
    out.extend(partner.iter().map(|&p| p as u8));
    out.extend(corners.iter().map(|&c| if c == Side::Plus { 0u8 } else { 1u8 }));
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for smaller in permutations(n - 1) {
        for pos in 0..n {
            let mut p = smaller.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Relabeling: vertex permutation, a rotation shift per vertex, an optional
/// global reflection, and an optional color swap. These generate equivalence
/// of neighborhoods (reflection reverses the horizontal direction, the color
/// swap flips which side of the level is up).
fn transformed(
    vertices: usize,
    partner: &[usize],
    corners: &[Side],
    perm: &[usize],
    shifts: &[usize],
    reflect: bool,
    swap: bool,
) -> (Vec<usize>, Vec<Side>) {
    let n = VALENCE * vertices;
    let half_image = |h: usize| -> usize {
        let (v, s) = (vertex_of(h), h % VALENCE);
        let pos = if reflect { (shifts[v] + VALENCE - s) % VALENCE } else { (shifts[v] + s) % VALENCE };
        VALENCE * perm[v] + pos
    };
    let corner_image = |h: usize| -> usize {
        let (v, s) = (vertex_of(h), h % VALENCE);
        let pos = if reflect { (shifts[v] + VALENCE - 1 - s) % VALENCE } else { (shifts[v] + s) % VALENCE };
        VALENCE * perm[v] + pos
    };
    let mut new_partner = vec![0usize; n];
    let mut new_corners = vec![Side::Plus; n];
    for h in 0..n {
        new_partner[half_image(h)] = half_image(partner[h]);
        let c = if swap { corners[h].flipped() } else { corners[h] };
        new_corners[corner_image(h)] = c;
    }
    (new_partner, new_corners)
}

/// Minimal encoding over the full equivalence group; equal keys mean
/// equivalent neighborhoods.
pub fn canonical_key(rn: &RibbonNeighborhood) -> Vec<u8> {
    let n_v = rn.vertices;
    let mut best: Option<Vec<u8>> = None;
    let perms = permutations(n_v);
    let shift_count = VALENCE.pow(n_v as u32);
    for perm in &perms {
        for shift_code in 0..shift_count {
            let mut shifts = vec![0usize; n_v];
            let mut code = shift_code;
            for s in shifts.iter_mut() {
                *s = code % VALENCE;
                code /= VALENCE;
            }
            for reflect in [false, true] {
                for swap in [false, true] {
                    let (p, c) = transformed(n_v, &rn.partner, &rn.corners, perm, &shifts, reflect, swap);
                    let enc = encode(&p, &c);
                    if best.as_ref().is_none_or(|b| enc < *b) {
                        best = Some(enc);
                    }
                }
            }
        }
    }
    best.expect("group is nonempty")
}

pub fn equivalent(a: &RibbonNeighborhood, b: &RibbonNeighborhood) -> bool {
    a.vertices == b.vertices && canonical_key(a) == canonical_key(b)
}

fn matchings(points: usize) -> Vec<Vec<usize>> {
    assert!(points.is_multiple_of(2));
    let mut out = Vec::new();
    let mut partner = vec![usize::MAX; points];
    fn rec(partner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let first = match partner.iter().position(|&p| p == usize::MAX) {
            None => {
                out.push(partner.clone());
                return;
            }
            Some(i) => i,
        };
        for j in (first + 1)..partner.len() {
            if partner[j] == usize::MAX {
                partner[first] = j;
                partner[j] = first;
                rec(partner, out);
                partner[first] = usize::MAX;
                partner[j] = usize::MAX;
            }
        }
    }
    rec(&mut partner, &mut out);
    out
}

fn is_connected(vertices: usize, partner: &[usize]) -> bool {
    let mut comp: Vec<usize> = (0..vertices).collect();
    fn find(comp: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while comp[r] != r {
            r = comp[r];
        }
        comp[x] = r;
        r
    }
    for h in 0..partner.len() {
        let ra = find(&mut comp, vertex_of(h));
        let rb = find(&mut comp, vertex_of(partner[h]));
        if ra != rb {
            comp[ra] = rb;
        }
    }
    let root = find(&mut comp, 0);
    (0..vertices).all(|v| find(&mut comp, v) == root)
}

/// All corner colorings compatible with a matching: colors alternate around
/// each vertex and are constant along each boundary walk.
fn colorings(vertices: usize, partner: &[usize]) -> Vec<Vec<Side>> {
    let n = VALENCE * vertices;
    // (neighbor, must_differ)
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for v in 0..vertices {
        for s in 0..VALENCE {
            let a = VALENCE * v + s;
            let b = VALENCE * v + (s + 1) % VALENCE;
            adj[a].push((b, true));
            adj[b].push((a, true));
        }
    }
    for orbit in boundary_orbits(partner) {
        let crossed: Vec<usize> = orbit.iter().map(|&h| partner[h]).collect();
        for w in crossed.windows(2) {
            adj[w[0]].push((w[1], false));
            adj[w[1]].push((w[0], false));
        }
    }

    // 2-color with parity propagation; free components get both choices.
    let mut parity: Vec<Option<bool>> = vec![None; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if parity[start].is_some() {
            continue;
        }
        parity[start] = Some(false);
        let mut stack = vec![start];
        let mut members = vec![start];
        while let Some(x) = stack.pop() {
            let px = parity[x].unwrap();
            for &(y, diff) in &adj[x] {
                let want = px ^ diff;
                match parity[y] {
                    None => {
                        parity[y] = Some(want);
                        stack.push(y);
                        members.push(y);
                    }
                    Some(py) => {
                        if py != want {
                            return Vec::new();
                        }
                    }
                }
            }
        }
        components.push(members);
    }

    let k = components.len();
    assert!(k <= 20, "free coloring components stay small");
    let mut out = Vec::new();
    for mask in 0..(1usize << k) {
        let mut corners = vec![Side::Plus; n];
        for (ci, members) in components.iter().enumerate() {
            let flip = (mask >> ci) & 1 == 1;
            for &m in members {
                let bit = parity[m].unwrap() ^ flip;
                corners[m] = if bit { Side::Minus } else { Side::Plus };
            }
        }
        out.push(corners);
    }
    out
}

/// Exhaustive census for a fixed saddle count, deduplicated by canonical key
/// and returned in key order.
fn census(vertices: usize) -> Vec<RibbonNeighborhood> {
    let all = matchings(VALENCE * vertices);
    let threads = configured_threads().max(1).min(all.len().max(1));
    let chunk = all.len().div_ceil(threads);
    let mut merged: BTreeMap<Vec<u8>, RibbonNeighborhood> = BTreeMap::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for part in all.chunks(chunk.max(1)) {
            handles.push(scope.spawn(move || {
                let mut local: BTreeMap<Vec<u8>, RibbonNeighborhood> = BTreeMap::new();
                for partner in part {
                    if !is_connected(vertices, partner) {
                        continue;
                    }
                    for corners in colorings(vertices, partner) {
                        let rn = RibbonNeighborhood::new(vertices, partner.clone(), corners)
                            .expect("constraint solving yields valid neighborhoods");
                        let key = canonical_key(&rn);
                        local.entry(key).or_insert(rn);
                    }
                }
                local
            }));
        }
        for h in handles {
            for (k, v) in h.join().expect("census worker panicked") {
                merged.entry(k).or_insert(v);
            }
        }
    });
    merged.into_values().collect()
}

/// Every neighborhood of a level holding exactly two saddles.
pub fn switch_census() -> Vec<RibbonNeighborhood> {
    static CACHE: std::sync::OnceLock<Vec<RibbonNeighborhood>> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| census(2)).clone()
}

/// Every neighborhood of a level holding exactly three saddles.
pub fn triple_census() -> Vec<RibbonNeighborhood> {
    static CACHE: std::sync::OnceLock<Vec<RibbonNeighborhood>> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| census(3)).clone()
}

/// Which side of the removed saddle the surviving level sits on.
/// `FromBelow` samples just under the saddle's height (the saddle is above),
/// so the level arcs run through the minus corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothing {
    FromBelow,
    FromAbove,
}

/// Result of deleting one saddle and rejoining its strands along one side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothedNeighborhood {
    pub vertices: usize,
    pub partner: Vec<usize>,
    pub corners: Vec<Side>,
    /// Closed strands split off entirely by the smoothing.
    pub free_circles: usize,
}

impl SmoothedNeighborhood {
    pub fn connected(&self) -> bool {
        if self.vertices == 0 {
            return true;
        }
        is_connected(self.vertices, &self.partner)
    }

    pub fn neighborhood(&self) -> Result<RibbonNeighborhood> {
        RibbonNeighborhood::new(self.vertices, self.partner.clone(), self.corners.clone())
    }
}

/// Removes saddle `z`, splicing its strand ends pairwise across the corners
/// on the chosen side.
pub fn smooth_vertex(rn: &RibbonNeighborhood, z: usize, dir: Smoothing) -> Result<SmoothedNeighborhood> {
    if z >= rn.vertices {
        return Err(Error::IndexOutOfRange { index: z, len: rn.vertices });
    }
    let arc_side = match dir {
        Smoothing::FromBelow => Side::Minus,
        Smoothing::FromAbove => Side::Plus,
    };
    // splice[s] pairs the strand ends flanking each arc-side corner of z
    let mut splice = [usize::MAX; VALENCE];
    for s in 0..VALENCE {
        if rn.corners[VALENCE * z + s] == arc_side {
            let t = (s + 1) % VALENCE;
            splice[s] = t;
            splice[t] = s;
        }
    }
    debug_assert!(splice.iter().all(|&s| s != usize::MAX));

    let old_n = VALENCE * rn.vertices;
    let new_vertices = rn.vertices - 1;
    let relabel = |h: usize| -> usize {
        let (v, s) = (vertex_of(h), h % VALENCE);
        debug_assert_ne!(v, z);
        let nv = if v < z { v } else { v - 1 };
        VALENCE * nv + s
    };

    let mut new_partner = vec![usize::MAX; VALENCE * new_vertices];
    let mut consumed_stub = [false; VALENCE];
    for h in 0..old_n {
        if vertex_of(h) == z {
            continue;
        }
        let mut t = rn.partner[h];
        while vertex_of(t) == z {
            let s = t % VALENCE;
            consumed_stub[s] = true;
            let spliced = VALENCE * z + splice[s];
            consumed_stub[splice[s]] = true;
            t = rn.partner[spliced];
        }
        new_partner[relabel(h)] = relabel(t);
    }

    // Stubs never reached from outside close up into free circles.
    let mut free_circles = 0;
    let mut seen = [false; VALENCE];
    for s0 in 0..VALENCE {
        if consumed_stub[s0] || seen[s0] {
            continue;
        }
        let mut s = s0;
        loop {
            seen[s] = true;
            seen[splice[s]] = true;
            let via = rn.partner[VALENCE * z + splice[s]];
            debug_assert_eq!(vertex_of(via), z, "unconsumed stubs chain within the saddle");
            s = via % VALENCE;
            if s == s0 {
                break;
            }
        }
        free_circles += 1;
    }

    let mut new_corners = vec![Side::Plus; VALENCE * new_vertices];
    for h in 0..old_n {
        if vertex_of(h) != z {
            new_corners[relabel(h)] = rn.corners[h];
        }
    }

    Ok(SmoothedNeighborhood { vertices: new_vertices, partner: new_partner, corners: new_corners, free_circles })
}

/// A convenience constructor for the unique two-saddle neighborhood of
/// positive genus: both saddles sit on one level circle with linked bands.
pub fn genus_one_switch() -> RibbonNeighborhood {
    use Side::{Minus, Plus};
    let partner = vec![4, 5, 6, 7, 0, 1, 2, 3];
    let corners = vec![Plus, Minus, Plus, Minus, Minus, Plus, Minus, Plus];
    RibbonNeighborhood::new(2, partner, corners).expect("fixed data is valid")
}
