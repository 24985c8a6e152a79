//! One-parameter families of sliced functions cut into elementary intervals:
//! each interval carries at most one event (a cancelling pair appearing or
//! disappearing, or two critical points switching heights), or one handle
//! slide annotation. Assembling a family replays its effect on cut systems
//! and produces four-manifold bookkeeping.

use crate::invariants::{heegaard_h1, AbelianGroupDescriptor};
use crate::linalg::{hermite_normal_form, left_kernel, solve_left, unimodular_completion, IntMat};
use crate::morse::{MorseEvent, SlicedMorseFunction};
use crate::ribbon::{genus_one_switch, RibbonNeighborhood};
use crate::surface::{
    intersection_pairing, lagrangian_span, slide, validate_cut_system, CutSystem, HomologyClass,
    SlideMove, SymplecticLattice,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalType {
    Type0,
    Type1,
}

impl fmt::Display for IntervalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalType::Type0 => write!(f, "type0"),
            IntervalType::Type1 => write!(f, "type1"),
        }
    }
}

/// The cut-system replacement a genus-one switch performs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryData {
    pub replaced: HomologyClass,
    pub new_class: HomologyClass,
}

/// Where the two switching critical points sit at the moment of collision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SwitchLocale {
    DifferentComponents,
    SameComponent {
        neighborhood: RibbonNeighborhood,
        surgery: Option<SurgeryData>,
    },
}

/// The event of an elementary interval, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event1 {
    /// A cancelling extremum pair appears at event slots `slot`, `slot + 1`
    /// of the end function.
    Birth { slot: usize },
    /// The cancelling pair at slots `slot`, `slot + 1` of the start function
    /// disappears.
    Death { slot: usize },
    /// The critical points at adjacent event indices swap heights.
    Switch { first: usize, second: usize, locale: SwitchLocale },
}

/// One elementary interval of a family. `slide` annotates an eventless
/// interval whose reference cut system changes by a single handle slide;
/// intervals with an event never carry a slide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryInterval {
    pub start: SlicedMorseFunction,
    pub end: SlicedMorseFunction,
    pub event: Option<Event1>,
    pub slide: Option<SlideMove>,
}

fn kind(e: &MorseEvent) -> u8 {
    match e {
        MorseEvent::Birth { .. } => 0,
        MorseEvent::Death { .. } => 1,
        MorseEvent::Merge { .. } => 2,
        MorseEvent::Split { .. } => 3,
    }
}

fn shared_circles(lower: &MorseEvent, upper: &MorseEvent) -> usize {
    lower
        .outputs()
        .iter()
        .filter(|c| upper.inputs().contains(c))
        .count()
}

impl ElementaryInterval {
    pub fn eventless(f: &SlicedMorseFunction) -> Self {
        ElementaryInterval { start: f.clone(), end: f.clone(), event: None, slide: None }
    }

    pub fn slide_segment(f: &SlicedMorseFunction, mv: SlideMove) -> Self {
        ElementaryInterval { start: f.clone(), end: f.clone(), event: None, slide: Some(mv) }
    }

    /// The same interval traversed backwards.
    pub fn reversed(&self) -> Self {
        ElementaryInterval {
            start: self.end.clone(),
            end: self.start.clone(),
            event: self.event.as_ref().map(|e| match e {
                Event1::Birth { slot } => Event1::Death { slot: *slot },
                Event1::Death { slot } => Event1::Birth { slot: *slot },
                Event1::Switch { first, second, locale } => Event1::Switch {
                    first: *first,
                    second: *second,
                    locale: match locale {
                        SwitchLocale::DifferentComponents => SwitchLocale::DifferentComponents,
                        SwitchLocale::SameComponent { neighborhood, surgery } => {
                            SwitchLocale::SameComponent {
                                neighborhood: neighborhood.clone(),
                                surgery: surgery.as_ref().map(|s| SurgeryData {
                                    replaced: s.new_class.clone(),
                                    new_class: s.replaced.clone(),
                                }),
                            }
                        }
                    },
                },
            }),
            slide: self.slide.map(|s| SlideMove { target: s.target, other: s.other, sign: -s.sign }),
        }
    }

    /// Structural validation; returns the common genus of the endpoint
    /// functions.
    pub fn validate(&self) -> Result<usize> {
        let g_start = self.start.genus().map_err(|e| Error::InvalidInterval {
            detail: format!("start function: {}", e),
        })?;
        let g_end = self.end.genus().map_err(|e| Error::InvalidInterval {
            detail: format!("end function: {}", e),
        })?;
        if g_start != g_end {
            return Err(Error::InvalidInterval {
                detail: format!("start has genus {}, end has genus {}", g_start, g_end),
            });
        }
        if self.event.is_some() && self.slide.is_some() {
            return Err(Error::InvalidInterval {
                detail: "an interval carries an event or a slide, never both".into(),
            });
        }
        let s_events: Vec<&MorseEvent> = self.start.events.iter().map(|t| &t.event).collect();
        let e_events: Vec<&MorseEvent> = self.end.events.iter().map(|t| &t.event).collect();
        match &self.event {
            None => {
                if s_events != e_events {
                    return Err(Error::InvalidInterval {
                        detail: "an eventless interval keeps the event list fixed".into(),
                    });
                }
                if let Some(mv) = self.slide {
                    if mv.target == mv.other || mv.target >= g_start || mv.other >= g_start {
                        return Err(Error::InvalidInterval {
                            detail: format!(
                                "slide ({}, {}) is not a pair of distinct handle slots below {}",
                                mv.target, mv.other, g_start
                            ),
                        });
                    }
                    if mv.sign != 1 && mv.sign != -1 {
                        return Err(Error::InvalidInterval {
                            detail: format!("slide sign must be +1 or -1, got {}", mv.sign),
                        });
                    }
                }
            }
            Some(Event1::Birth { slot }) => {
                let slot = *slot;
                if e_events.len() != s_events.len() + 2 {
                    return Err(Error::InvalidInterval {
                        detail: "a birth adds exactly two events".into(),
                    });
                }
                if slot + 1 >= e_events.len() {
                    return Err(Error::InvalidInterval {
                        detail: format!("birth slot {} out of range", slot),
                    });
                }
                let ok = match (e_events[slot], e_events[slot + 1]) {
                    (MorseEvent::Birth { circle: c1 }, MorseEvent::Death { circle: c2 }) => c1 == c2,
                    _ => false,
                };
                if !ok {
                    return Err(Error::InvalidInterval {
                        detail: "a birth inserts an adjacent cancelling extremum pair".into(),
                    });
                }
                let mut rest = e_events.clone();
                rest.drain(slot..slot + 2);
                if rest != s_events {
                    return Err(Error::InvalidInterval {
                        detail: "events away from the new pair must be unchanged".into(),
                    });
                }
            }
            Some(Event1::Death { slot }) => {
                let rev = self.reversed();
                let rev_err = ElementaryInterval {
                    event: Some(Event1::Birth { slot: *slot }),
                    ..rev
                }
                .validate();
                if let Err(e) = rev_err {
                    return Err(Error::InvalidInterval {
                        detail: format!("death (checked as reversed birth): {}", e),
                    });
                }
            }
            Some(Event1::Switch { first, second, locale }) => {
                let (first, second) = (*first, *second);
                if second != first + 1 {
                    return Err(Error::InvalidInterval {
                        detail: "a switch swaps two height-adjacent critical points".into(),
                    });
                }
                if s_events.len() != e_events.len() {
                    return Err(Error::InvalidInterval {
                        detail: "a switch preserves the number of events".into(),
                    });
                }
                if second >= s_events.len() {
                    return Err(Error::InvalidInterval {
                        detail: format!("switch indices ({}, {}) out of range", first, second),
                    });
                }
                for i in 0..s_events.len() {
                    if i != first && i != second && kind(s_events[i]) != kind(e_events[i]) {
                        return Err(Error::InvalidInterval {
                            detail: format!("event {} changes kind away from the switch", i),
                        });
                    }
                }
                let shared = shared_circles(s_events[first], s_events[second]);
                match locale {
                    SwitchLocale::DifferentComponents => {
                        if shared != 0 {
                            return Err(Error::InvalidInterval {
                                detail: "the switching points share a level circle, so they sit on one component".into(),
                            });
                        }
                        if kind(e_events[first]) != kind(s_events[second])
                            || kind(e_events[second]) != kind(s_events[first])
                        {
                            return Err(Error::InvalidInterval {
                                detail: "independent critical points carry their kinds across the switch".into(),
                            });
                        }
                    }
                    SwitchLocale::SameComponent { neighborhood, surgery } => {
                        if !s_events[first].is_saddle() || !s_events[second].is_saddle() {
                            return Err(Error::InvalidInterval {
                                detail: "only saddles can collide on one component".into(),
                            });
                        }
                        if !e_events[first].is_saddle() || !e_events[second].is_saddle() {
                            return Err(Error::InvalidInterval {
                                detail: "a same-component switch leaves two saddles behind".into(),
                            });
                        }
                        if shared == 0 {
                            return Err(Error::InvalidInterval {
                                detail: "the switching saddles share no level circle, so they sit on different components".into(),
                            });
                        }
                        if neighborhood.vertices() != 2 {
                            return Err(Error::InvalidInterval {
                                detail: "a switch neighborhood holds exactly two saddles".into(),
                            });
                        }
                        // b = (3 - shared) circles below + (3 - shared) above.
                        let expected_boundary = 6 - 2 * shared;
                        if neighborhood.boundary_circles() != expected_boundary {
                            return Err(Error::InvalidInterval {
                                detail: format!(
                                    "{} shared circles force {} boundary circles, neighborhood has {}",
                                    shared,
                                    expected_boundary,
                                    neighborhood.boundary_circles()
                                ),
                            });
                        }
                        let positive_genus = neighborhood.genus() == 1;
                        match (positive_genus, surgery) {
                            (true, None) => {
                                return Err(Error::InvalidInterval {
                                    detail: "a genus-one switch must state its cut-system surgery".into(),
                                });
                            }
                            (false, Some(_)) => {
                                return Err(Error::InvalidInterval {
                                    detail: "a planar switch performs no surgery".into(),
                                });
                            }
                            (true, Some(s)) => {
                                let rank = 2 * g_start;
                                if s.replaced.rank() != rank || s.new_class.rank() != rank {
                                    return Err(Error::DimensionMismatch {
                                        expected: rank,
                                        got: s.replaced.rank().max(s.new_class.rank()),
                                    });
                                }
                                let p = intersection_pairing(&s.replaced, &s.new_class)?;
                                if p != 1 && p != -1 {
                                    return Err(Error::PairingNotUnit { value: p });
                                }
                            }
                            (false, None) => {}
                        }
                    }
                }
            }
        }
        Ok(g_start)
    }
}

/// Type of a validated interval: type 1 when a genus-one switch happens,
/// type 0 otherwise.
pub fn classify_interval(iv: &ElementaryInterval) -> Result<IntervalType> {
    iv.validate()?;
    Ok(interval_type_of(iv))
}

/// Type of an interval assumed to be valid already.
pub fn interval_type_of(iv: &ElementaryInterval) -> IntervalType {
    match &iv.event {
        Some(Event1::Switch { locale: SwitchLocale::SameComponent { neighborhood, .. }, .. })
            if neighborhood.genus() == 1 =>
        {
            IntervalType::Type1
        }
        _ => IntervalType::Type0,
    }
}

/// Outcome of pushing a cut system through one interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppliedInterval {
    pub system: CutSystem,
    pub surgery: Option<SurgeryData>,
}

/// Transports a cut system across an interval: slides apply verbatim,
/// genus-one switches replace one curve class, everything else passes the
/// system through unchanged.
pub fn apply_interval(
    lattice: &SymplecticLattice,
    cs: &CutSystem,
    iv: &ElementaryInterval,
) -> Result<AppliedInterval> {
    let genus = iv.validate()?;
    if lattice.genus() != genus {
        return Err(Error::GenusMismatch { expected: lattice.genus(), got: genus });
    }
    let report = validate_cut_system(lattice, cs);
    if !report.valid() {
        return Err(Error::InvalidCutSystem { context: "apply_interval input", report });
    }

    if let Some(mv) = iv.slide {
        return Ok(AppliedInterval { system: slide(cs, mv)?, surgery: None });
    }
    if interval_type_of(iv) == IntervalType::Type0 {
        return Ok(AppliedInterval { system: cs.clone(), surgery: None });
    }

    let Some(Event1::Switch { locale: SwitchLocale::SameComponent { surgery: Some(s), .. }, .. }) =
        &iv.event
    else {
        unreachable!("type-1 intervals carry surgery data");
    };
    let system = perform_surgery(lattice, cs, s)?;
    Ok(AppliedInterval { system, surgery: Some(s.clone()) })
}

/// Replaces the `replaced` direction of the system's span by `new_class`.
fn perform_surgery(
    lattice: &SymplecticLattice,
    cs: &CutSystem,
    s: &SurgeryData,
) -> Result<CutSystem> {
    let g = lattice.genus();
    let p = intersection_pairing(&s.replaced, &s.new_class)?;
    if p != 1 && p != -1 {
        return Err(Error::PairingNotUnit { value: p });
    }
    // Fast path: the replaced class sits in the list (up to sign) and the new
    // class already pairs trivially with every other curve.
    let neg = s.replaced.neg();
    if let Some(i) = cs.curves.iter().position(|c| *c == s.replaced || *c == neg) {
        let clean = cs
            .curves
            .iter()
            .enumerate()
            .all(|(j, c)| j == i || intersection_pairing(c, &s.new_class).unwrap() == 0);
        if clean {
            let mut out = cs.clone();
            out.curves[i] = s.new_class.clone();
            out.provenance[i] = None;
            return Ok(out);
        }
    }
    // General position: check membership, then swap the pairing-one direction
    // for the new class and keep the kernel of the pairing functional.
    let m = cs.matrix();
    if solve_left(&m, &s.replaced.0).is_none() {
        return Err(Error::ClassNotInSpan);
    }
    let mut w = IntMat::zeros(g, 1);
    for (j, c) in cs.curves.iter().enumerate() {
        w.set(j, 0, intersection_pairing(c, &s.new_class)?);
    }
    let ker = left_kernel(&w);
    debug_assert_eq!(ker.rows(), g - 1);
    let mut curves = vec![s.new_class.clone()];
    for r in 0..ker.rows() {
        let mut v = HomologyClass::zero(lattice.rank());
        for j in 0..g {
            v = v.scaled_add(ker.get(r, j), &cs.curves[j])?;
        }
        curves.push(v);
    }
    let out = CutSystem::new(g, curves);
    debug_assert!(validate_cut_system(lattice, &out).valid());
    Ok(out)
}

/// A one-parameter family cut into elementary intervals. Consecutive
/// intervals share their endpoint functions; cyclic families close up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CerfGraphic1 {
    pub genus: usize,
    pub cyclic: bool,
    pub segments: Vec<ElementaryInterval>,
}

pub fn validate_graphic(gr: &CerfGraphic1) -> Result<()> {
    for (i, seg) in gr.segments.iter().enumerate() {
        let g = seg.validate().map_err(|e| Error::InvalidGraphic {
            detail: format!("segment {}: {}", i, e),
        })?;
        if g != gr.genus {
            return Err(Error::InvalidGraphic {
                detail: format!("segment {} has genus {}, graphic claims {}", i, g, gr.genus),
            });
        }
    }
    for i in 1..gr.segments.len() {
        if gr.segments[i - 1].end != gr.segments[i].start {
            return Err(Error::InvalidGraphic {
                detail: format!("segments {} and {} do not share a function", i - 1, i),
            });
        }
    }
    if gr.cyclic && !gr.segments.is_empty() {
        let last = gr.segments.len() - 1;
        if gr.segments[last].end != gr.segments[0].start {
            return Err(Error::InvalidGraphic {
                detail: "a cyclic family returns to its starting function".into(),
            });
        }
    }
    Ok(())
}

/// The summary of a non-cyclic assembled family. Two families inducing the
/// same sequence of surgeries produce identical records, regardless of how
/// finely they are subdivided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourManifoldRecord {
    pub genus: usize,
    pub initial_system: CutSystem,
    pub surgeries: Vec<SurgeryData>,
    pub final_system: CutSystem,
    /// genus minus the number of surgeries.
    pub k: i64,
    /// First homology of the boundary three-manifold presented by the
    /// initial and final systems.
    pub boundary_h1: AbelianGroupDescriptor,
}

pub fn assemble_interval_family(gr: &CerfGraphic1, start: &CutSystem) -> Result<FourManifoldRecord> {
    if gr.cyclic {
        return Err(Error::CyclicGraphic);
    }
    validate_graphic(gr)?;
    let lattice = SymplecticLattice::new(gr.genus);
    let report = validate_cut_system(&lattice, start);
    if !report.valid() {
        return Err(Error::InvalidCutSystem { context: "assemble start system", report });
    }
    let mut cur = start.clone();
    let mut surgeries = Vec::new();
    for seg in &gr.segments {
        let applied = apply_interval(&lattice, &cur, seg)?;
        cur = applied.system;
        if let Some(s) = applied.surgery {
            surgeries.push(s);
        }
    }
    let boundary_h1 = heegaard_h1(&lattice, start, &cur)?;
    Ok(FourManifoldRecord {
        genus: gr.genus,
        initial_system: start.clone(),
        k: gr.genus as i64 - surgeries.len() as i64,
        surgeries,
        final_system: cur,
        boundary_h1,
    })
}

/// The summary of a cyclic assembled family: the replayed system must return
/// to the starting span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicFamilyRecord {
    pub genus: usize,
    pub initial_system: CutSystem,
    pub surgeries: Vec<SurgeryData>,
    pub final_system: CutSystem,
    pub closes: bool,
}

pub fn assemble_cyclic_family(gr: &CerfGraphic1, start: &CutSystem) -> Result<CyclicFamilyRecord> {
    if !gr.cyclic {
        return Err(Error::InvalidGraphic { detail: "expected a cyclic graphic".into() });
    }
    validate_graphic(gr)?;
    let lattice = SymplecticLattice::new(gr.genus);
    let report = validate_cut_system(&lattice, start);
    if !report.valid() {
        return Err(Error::InvalidCutSystem { context: "assemble start system", report });
    }
    let mut cur = start.clone();
    let mut surgeries = Vec::new();
    for seg in &gr.segments {
        let applied = apply_interval(&lattice, &cur, seg)?;
        cur = applied.system;
        if let Some(s) = applied.surgery {
            surgeries.push(s);
        }
    }
    let closes = lagrangian_span(&lattice, start)? == lagrangian_span(&lattice, &cur)?;
    Ok(CyclicFamilyRecord {
        genus: gr.genus,
        initial_system: start.clone(),
        surgeries,
        final_system: cur,
        closes,
    })
}

/// A slide sequence transforming one cut system into another with the same
/// span. `final_signs[i]` relates the replayed curve i to the target curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpolation {
    pub moves: Vec<SlideMove>,
    pub final_signs: Vec<i64>,
    /// Worst-case move count g^2 (A+2)^(g+1) for coefficient size A.
    pub bound: i64,
    pub within_bound: bool,
}

/// Factors a unit-determinant integer matrix into elementary row additions
/// (row r += c * row s), recorded in application order.
fn factor_into_row_ops(mut t: IntMat) -> Vec<(usize, usize, i64)> {
    let g = t.rows();
    let mut ops: Vec<(usize, usize, i64)> = Vec::new();
    fn do_op(t: &mut IntMat, ops: &mut Vec<(usize, usize, i64)>, r: usize, s: usize, c: i64) {
        if c != 0 {
            t.row_add(r, s, c);
            ops.push((r, s, c));
        }
    }
    for c in 0..g {
        loop {
            let nz: Vec<usize> = (c..g).filter(|&r| t.get(r, c) != 0).collect();
            assert!(!nz.is_empty(), "unit-determinant input cannot lose rank");
            if nz.len() == 1 {
                let p = nz[0];
                if p != c {
                    // Move the pivot into row c; row c is zero in column c.
                    do_op(&mut t, &mut ops, c, p, 1);
                    do_op(&mut t, &mut ops, p, c, -1);
                }
                break;
            }
            let p = *nz
                .iter()
                .min_by_key(|&&r| (t.get(r, c).abs(), r))
                .expect("nonempty");
            for &r in &nz {
                if r != p {
                    let q = t.get(r, c) / t.get(p, c);
                    do_op(&mut t, &mut ops, r, p, -q);
                }
            }
        }
        let piv = t.get(c, c);
        assert!(piv == 1 || piv == -1, "column gcd of a unimodular block is 1");
        if piv == -1 {
            // Two pivots of a determinant +1 matrix flip together, so a row
            // below always exists; fix the sign with three additions.
            assert!(c + 1 < g, "last pivot of a determinant +1 matrix is positive");
            let j = c + 1;
            do_op(&mut t, &mut ops, j, c, 1);
            do_op(&mut t, &mut ops, c, j, -2);
            do_op(&mut t, &mut ops, j, c, 1);
        }
    }
    for c in 1..g {
        for r in 0..c {
            let e = t.get(r, c);
            do_op(&mut t, &mut ops, r, c, -e);
        }
    }
    debug_assert!(t.is_identity());
    ops
}

/// Finds an explicit slide sequence from one system to a system listing the
/// same span. Errors with SpanMismatch when no sequence exists.
pub fn interpolate_cut_systems(
    lattice: &SymplecticLattice,
    from: &CutSystem,
    to: &CutSystem,
) -> Result<Interpolation> {
    for (ctx, cs) in [("interpolation source", from), ("interpolation target", to)] {
        let report = validate_cut_system(lattice, cs);
        if !report.valid() {
            return Err(Error::InvalidCutSystem { context: ctx, report });
        }
    }
    let g = lattice.genus();
    if lagrangian_span(lattice, from)? != lagrangian_span(lattice, to)? {
        return Err(Error::SpanMismatch);
    }
    if g == 0 {
        return Ok(Interpolation { moves: vec![], final_signs: vec![], bound: 0, within_bound: true });
    }
    let m_from = from.matrix();
    let mut u = IntMat::zeros(g, g);
    for i in 0..g {
        let coords = solve_left(&m_from, &to.curves[i].0)
            .expect("equal spans make every target curve expressible");
        for j in 0..g {
            u.set(i, j, coords[j]);
        }
    }
    let det_u = crate::linalg::det(&u);
    assert!(det_u == 1 || det_u == -1, "change of basis between bases is unimodular");
    let mut s = u.clone();
    if det_u == -1 {
        s.row_negate(g - 1);
    }

    let ops = factor_into_row_ops(s);
    let mut moves: Vec<SlideMove> = Vec::new();
    for &(r, c, coeff) in ops.iter().rev() {
        let sign = if coeff > 0 { -1 } else { 1 };
        for _ in 0..coeff.unsigned_abs() {
            moves.push(SlideMove { target: r, other: c, sign });
        }
    }

    // Replay to certify the sequence and read the per-curve signs.
    let mut cur = from.clone();
    for mv in &moves {
        cur = slide(&cur, *mv)?;
    }
    let mut final_signs = Vec::with_capacity(g);
    for i in 0..g {
        if cur.curves[i] == to.curves[i] {
            final_signs.push(1);
        } else if cur.curves[i] == to.curves[i].neg() {
            final_signs.push(-1);
        } else {
            unreachable!("replayed curve {} differs from the target by more than a sign", i);
        }
    }

    let a = u.max_abs().max(1) as i128;
    let bound_i128 = (g as i128) * (g as i128) * (a + 2).pow(g as u32 + 1);
    let bound = i64::try_from(bound_i128).unwrap_or(i64::MAX);
    let within_bound = (moves.len() as i64) <= bound;
    Ok(Interpolation { moves, final_signs, bound, within_bound })
}

/// Replays an interpolation as a list of slide segments over a fixed function.
fn slide_segments(f: &SlicedMorseFunction, moves: &[SlideMove]) -> Vec<ElementaryInterval> {
    moves.iter().map(|mv| ElementaryInterval::slide_segment(f, *mv)).collect()
}

/// The compiled standard family for one ordered pair of cut systems:
/// slide segments into an adapted listing, then one genus-one switch per
/// non-common handle, then slide segments to the target listing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairBlock {
    pub segments: Vec<ElementaryInterval>,
    pub surgeries: Vec<SurgeryData>,
    pub resulting_system: CutSystem,
    pub k: usize,
}

pub fn compile_pair_family(
    lattice: &SymplecticLattice,
    from: &CutSystem,
    to: &CutSystem,
) -> Result<PairBlock> {
    let g = lattice.genus();
    for (ctx, cs) in [("pair source", from), ("pair target", to)] {
        let report = validate_cut_system(lattice, cs);
        if !report.valid() {
            return Err(Error::InvalidCutSystem { context: ctx, report });
        }
    }
    let h1 = heegaard_h1(lattice, from, to)?;
    if !h1.torsion.is_empty() {
        return Err(Error::NotStandardPair {
            detail: format!("the pair presents {}, which has torsion", h1),
        });
    }
    let k = h1.rank;
    let f = SlicedMorseFunction::standard(g);
    if g == 0 {
        return Ok(PairBlock {
            segments: vec![],
            surgeries: vec![],
            resulting_system: to.clone(),
            k: 0,
        });
    }

    let m_from = from.matrix();
    let m_to = to.matrix();

    // Common sublattice W = span(from) o span(to), canonical basis.
    let mut stacked = IntMat::zeros(2 * g, 2 * g);
    for i in 0..g {
        for j in 0..2 * g {
            stacked.set(i, j, m_from.get(i, j));
            stacked.set(g + i, j, -m_to.get(i, j));
        }
    }
    let ker = left_kernel(&stacked);
    if ker.rows() != k {
        return Err(Error::NotStandardPair {
            detail: format!("common sublattice has rank {}, expected {}", ker.rows(), k),
        });
    }
    let w_rows: Vec<Vec<i64>> = (0..k)
        .map(|r| {
            (0..2 * g)
                .map(|j| (0..g).map(|i| ker.get(r, i) * m_from.get(i, j)).sum())
                .collect()
        })
        .collect();
    let w_canon = if k == 0 {
        IntMat::zeros(0, 2 * g)
    } else {
        hermite_normal_form(&IntMat::from_rows(&w_rows))
    };

    let coords_in = |m: &IntMat| -> Result<IntMat> {
        let mut out = IntMat::zeros(k, g);
        for r in 0..k {
            let row: Vec<i64> = (0..2 * g).map(|j| w_canon.get(r, j)).collect();
            let sol = solve_left(m, &row).ok_or_else(|| Error::NotStandardPair {
                detail: "common sublattice escapes one of the spans".into(),
            })?;
            for j in 0..g {
                out.set(r, j, sol[j]);
            }
        }
        Ok(out)
    };
    let wa = coords_in(&m_from)?;
    let wb = coords_in(&m_to)?;
    let ext_a = unimodular_completion(&wa).ok_or_else(|| Error::NotStandardPair {
        detail: "common sublattice is not a direct summand of the source span".into(),
    })?;
    let ext_b = unimodular_completion(&wb).ok_or_else(|| Error::NotStandardPair {
        detail: "common sublattice is not a direct summand of the target span".into(),
    })?;

    let expand = |coeffs: &[i64], m: &IntMat| -> HomologyClass {
        let mut v = vec![0i64; 2 * g];
        for (i, &c) in coeffs.iter().enumerate() {
            for j in 0..2 * g {
                v[j] += c * m.get(i, j);
            }
        }
        HomologyClass(v)
    };

    // Adapted source listing: canonical W curves first, then a completion.
    let mut adapted_curves: Vec<HomologyClass> = (0..k)
        .map(|r| HomologyClass((0..2 * g).map(|j| w_canon.get(r, j)).collect()))
        .collect();
    let mut x_rows: Vec<HomologyClass> = Vec::new();
    for r in k..g {
        let coeffs: Vec<i64> = (0..g).map(|j| ext_a.get(r, j)).collect();
        let x = expand(&coeffs, &m_from);
        adapted_curves.push(x.clone());
        x_rows.push(x);
    }
    let adapted = CutSystem::new(g, adapted_curves);
    debug_assert!(validate_cut_system(lattice, &adapted).valid());

    let y_rows: Vec<HomologyClass> = (k..g)
        .map(|r| {
            let coeffs: Vec<i64> = (0..g).map(|j| ext_b.get(r, j)).collect();
            expand(&coeffs, &m_to)
        })
        .collect();

    // Dualize the complement of the target so that <x_i, y''_j> = 0 for
    // i != j; then each switch touches exactly one slot.
    let n = g - k;
    let mut p = IntMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            p.set(i, j, intersection_pairing(&x_rows[i], &y_rows[j])?);
        }
    }
    let det_p = crate::linalg::det(&p);
    if det_p != 1 && det_p != -1 {
        return Err(Error::NotStandardPair {
            detail: format!("complement pairing has determinant {}", det_p),
        });
    }
    let mut p_inv = IntMat::zeros(n, n);
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        let row = solve_left(&p, &e).expect("unimodular pairing inverts over the integers");
        for j in 0..n {
            p_inv.set(i, j, row[j]);
        }
    }
    let y_dual: Vec<HomologyClass> = (0..n)
        .map(|i| {
            let mut v = HomologyClass::zero(2 * g);
            for j in 0..n {
                // (P^{-1})^T coefficient
                v = v.scaled_add(p_inv.get(j, i), &y_rows[j]).expect("dimensions match");
            }
            let lead = v.0.iter().find(|&&c| c != 0).copied().unwrap_or(0);
            if lead < 0 {
                v.neg()
            } else {
                v
            }
        })
        .collect();

    let mut segments = Vec::new();
    let mut surgeries = Vec::new();

    let interp1 = interpolate_cut_systems(lattice, from, &adapted)?;
    segments.extend(slide_segments(&f, &interp1.moves));
    let mut cur = from.clone();
    for mv in &interp1.moves {
        cur = slide(&cur, *mv)?;
    }

    for i in 0..n {
        let slot = k + i;
        let replaced = cur.curves[slot].clone();
        let new_class = y_dual[i].clone();
        let pairing = intersection_pairing(&replaced, &new_class)?;
        debug_assert!(pairing == 1 || pairing == -1);
        let seg = ElementaryInterval {
            start: f.clone(),
            end: f.clone(),
            event: Some(Event1::Switch {
                first: 2 * slot + 1,
                second: 2 * slot + 2,
                locale: SwitchLocale::SameComponent {
                    neighborhood: genus_one_switch(),
                    surgery: Some(SurgeryData { replaced: replaced.clone(), new_class: new_class.clone() }),
                },
            }),
            slide: None,
        };
        segments.push(seg);
        surgeries.push(SurgeryData { replaced: replaced.clone(), new_class: new_class.clone() });
        cur.curves[slot] = new_class;
        cur.provenance[slot] = None;
    }

    let interp2 = interpolate_cut_systems(lattice, &cur, to)?;
    segments.extend(slide_segments(&f, &interp2.moves));
    for mv in &interp2.moves {
        cur = slide(&cur, *mv)?;
    }

    Ok(PairBlock { segments, surgeries, resulting_system: cur, k })
}

/// A compiled cyclic family visiting the three systems of a trisection
/// diagram in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrisectionFamily {
    pub graphic: CerfGraphic1,
    pub block_sizes: [usize; 3],
    pub switch_count: usize,
    pub k: usize,
}

pub fn standard_family_from_trisection(
    t: &crate::invariants::TrisectionDiagram,
) -> Result<TrisectionFamily> {
    let report = crate::invariants::validate_trisection(t);
    if !report.valid() {
        return Err(Error::InvalidTrisection { detail: report.summary() });
    }
    let lattice = t.lattice();
    let b1 = compile_pair_family(&lattice, &t.alpha, &t.beta)?;
    let b2 = compile_pair_family(&lattice, &b1.resulting_system, &t.gamma)?;
    let b3 = compile_pair_family(&lattice, &b2.resulting_system, &t.alpha)?;
    debug_assert!(b1.k == t.k && b2.k == t.k && b3.k == t.k);
    let block_sizes = [b1.segments.len(), b2.segments.len(), b3.segments.len()];
    let switch_count = b1.surgeries.len() + b2.surgeries.len() + b3.surgeries.len();
    let mut segments = b1.segments;
    segments.extend(b2.segments);
    segments.extend(b3.segments);
    let graphic = CerfGraphic1 { genus: t.genus, cyclic: true, segments };
    validate_graphic(&graphic)?;
    Ok(TrisectionFamily { graphic, block_sizes, switch_count, k: t.k })
}
