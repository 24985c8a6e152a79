//! Two-parameter families cut into elementary polygons. A polygon's boundary
//! is a cyclic chain of elementary intervals; its center holds at most one
//! codimension-two event. Gluing polygons along reversed edge pairs builds a
//! disk-shaped family whose outer boundary is a one-parameter cyclic family.

use crate::family_one::{
    apply_interval, classify_interval, interval_type_of, ElementaryInterval, IntervalType,
};
use crate::invariants::{trisection_signature, wall_signature, TrisectionDiagram};
use crate::ribbon::{smooth_vertex, RibbonNeighborhood, Smoothing};
use crate::surface::{
    intersection_pairing, lagrangian_span, validate_cut_system, CutSystem, HomologyClass,
    LagrangianSublattice, SymplecticLattice,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// The codimension-two event at the center of a polygon, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event2 {
    /// A cancelling pair is born already stacked against a third critical
    /// point; no cut-system effect.
    Swallowtail,
    /// A birth wall crosses a switch wall transversally.
    BirthMorseCross,
    /// Three critical points share one height. The neighborhood carries the
    /// three saddles; when it has genus one, `local_classes` lists the three
    /// curve classes in the local torus, in wall order.
    TripleSwitch {
        neighborhood: RibbonNeighborhood,
        local_classes: Option<[HomologyClass; 3]>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolygonType {
    Type0,
    Type1,
    Type2 { sign: i64 },
}

impl fmt::Display for PolygonType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolygonType::Type0 => write!(f, "type0"),
            PolygonType::Type1 => write!(f, "type1"),
            PolygonType::Type2 { sign: 1 } => write!(f, "type2(+1)"),
            PolygonType::Type2 { sign } => write!(f, "type2({})", sign),
        }
    }
}

/// One elementary polygon of a two-parameter family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryPolygon {
    pub boundary: Vec<ElementaryInterval>,
    pub center: Option<Event2>,
}

impl ElementaryPolygon {
    /// Structural validation; returns the common genus of the boundary.
    pub fn validate(&self) -> Result<usize> {
        if self.boundary.is_empty() {
            return Err(Error::InvalidPolygon { detail: "a polygon has at least one edge".into() });
        }
        let mut genus = None;
        for (i, edge) in self.boundary.iter().enumerate() {
            let g = edge.validate().map_err(|e| Error::InvalidPolygon {
                detail: format!("edge {}: {}", i, e),
            })?;
            match genus {
                None => genus = Some(g),
                Some(prev) if prev != g => {
                    return Err(Error::InvalidPolygon {
                        detail: format!("edge {} has genus {}, edge 0 has genus {}", i, g, prev),
                    });
                }
                _ => {}
            }
        }
        let n = self.boundary.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if self.boundary[i].end != self.boundary[j].start {
                return Err(Error::InvalidPolygon {
                    detail: format!("edges {} and {} do not share a function", i, j),
                });
            }
        }
        match &self.center {
            None | Some(Event2::Swallowtail) | Some(Event2::BirthMorseCross) => {}
            Some(Event2::TripleSwitch { neighborhood, local_classes }) => {
                if n != 6 {
                    return Err(Error::InvalidPolygon {
                        detail: format!("a triple switch is hexagonal, found {} edges", n),
                    });
                }
                if neighborhood.vertices() != 3 {
                    return Err(Error::InvalidPolygon {
                        detail: "a triple-switch neighborhood holds exactly three saddles".into(),
                    });
                }
                match (neighborhood.genus() == 1, local_classes) {
                    (true, None) => {
                        return Err(Error::InvalidPolygon {
                            detail: "a genus-one triple switch must list its three local classes".into(),
                        });
                    }
                    (false, Some(_)) => {
                        return Err(Error::InvalidPolygon {
                            detail: "a planar triple switch carries no local classes".into(),
                        });
                    }
                    (true, Some(classes)) => {
                        for (i, c) in classes.iter().enumerate() {
                            if c.rank() != 2 {
                                return Err(Error::InvalidPolygon {
                                    detail: format!(
                                        "local class {} lives in the local torus and needs 2 coordinates",
                                        i
                                    ),
                                });
                            }
                            if !c.is_primitive() {
                                return Err(Error::InvalidPolygon {
                                    detail: format!("local class {} is not primitive", i),
                                });
                            }
                        }
                        for i in 0..3 {
                            let j = (i + 1) % 3;
                            let p = intersection_pairing(&classes[i], &classes[j])?;
                            if p != 1 && p != -1 {
                                return Err(Error::InvalidPolygon {
                                    detail: format!(
                                        "local classes {} and {} pair to {}, expected a unit",
                                        i, j, p
                                    ),
                                });
                            }
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        Ok(genus.expect("nonempty boundary"))
    }
}

/// Type of a validated polygon, decided by its center and the number of
/// type-1 boundary edges.
pub fn classify_polygon(poly: &ElementaryPolygon) -> Result<PolygonType> {
    poly.validate()?;
    let t1 = poly
        .boundary
        .iter()
        .filter(|e| interval_type_of(e) == IntervalType::Type1)
        .count();
    match &poly.center {
        None => match t1 {
            0 => Ok(PolygonType::Type0),
            2 => Ok(PolygonType::Type1),
            n => Err(Error::AnomalousTypeCount { count: n }),
        },
        Some(Event2::Swallowtail) | Some(Event2::BirthMorseCross) => match t1 {
            0 => Ok(PolygonType::Type0),
            n => Err(Error::AnomalousTypeCount { count: n }),
        },
        Some(Event2::TripleSwitch { neighborhood, local_classes }) => {
            if neighborhood.genus() == 0 {
                return match t1 {
                    0 => Ok(PolygonType::Type0),
                    n => Err(Error::AnomalousTypeCount { count: n }),
                };
            }
            match t1 {
                0 => Ok(PolygonType::Type0),
                2 => Ok(PolygonType::Type1),
                3 => {
                    let classes = local_classes.as_ref().expect("validated genus-one center");
                    let spans: Vec<LagrangianSublattice> = classes
                        .iter()
                        .map(|c| LagrangianSublattice::span_of(2, std::slice::from_ref(c)))
                        .collect::<Result<_>>()?;
                    let w = wall_signature(&spans[0], &spans[1], &spans[2])?;
                    Ok(PolygonType::Type2 { sign: -w })
                }
                n => Err(Error::AnomalousTypeCount { count: n }),
            }
        }
    }
}

/// The six hexagon edges around a triple point, in cyclic order. Each entry
/// switches one pair of saddles while the third sits above or below.
const HEXAGON_SCHEDULE: [(usize, usize, usize, bool); 6] = [
    // (left, right, third, third_is_above)
    (0, 1, 2, true),
    (0, 2, 1, false),
    (1, 2, 0, true),
    (0, 1, 2, false),
    (0, 2, 1, true),
    (1, 2, 0, false),
];

/// Interval types of the six switches around a triple point. `roles` assigns
/// the three ribbon-graph vertices to the three critical points in height
/// order at the base corner of the hexagon.
pub fn permutahedron_edge_types(
    rn: &RibbonNeighborhood,
    roles: [usize; 3],
) -> Result<[IntervalType; 6]> {
    if rn.vertices() != 3 {
        return Err(Error::InvalidPolygon {
            detail: format!("a triple point holds 3 saddles, neighborhood has {}", rn.vertices()),
        });
    }
    let mut seen = [false; 3];
    for &r in &roles {
        if r >= 3 || seen[r] {
            return Err(Error::InvalidPolygon {
                detail: "roles must name each of the three saddles once".into(),
            });
        }
        seen[r] = true;
    }
    let mut out = [IntervalType::Type0; 6];
    for (slot, &(_l, _r, third, above)) in HEXAGON_SCHEDULE.iter().enumerate() {
        // Remove the uninvolved saddle along the slice facing the switch:
        // from below when it sits above the switching pair, from above
        // when it sits below.
        let dir = if above { Smoothing::FromBelow } else { Smoothing::FromAbove };
        let smoothed = smooth_vertex(rn, roles[third], dir)?;
        let t = if !smoothed.connected() {
            IntervalType::Type0
        } else if smoothed.neighborhood()?.genus() == 1 {
            IntervalType::Type1
        } else {
            IntervalType::Type0
        };
        out[slot] = t;
    }
    debug_assert!(
        out.iter().filter(|&&t| t == IntervalType::Type1).count() <= 3,
        "no hexagon carries more than three genus-one switches"
    );
    Ok(out)
}

/// One side of a gluing: polygon index, edge index.
pub type EdgeRef = (usize, usize);

/// A family over a disk: polygons glued along reversed edge pairs. Unglued
/// edges form the outer boundary. `start_system` is the reference cut system
/// at the start of the first unglued edge of polygon 0 (or of the walk's
/// starting edge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonDecomposition {
    pub genus: usize,
    pub polygons: Vec<ElementaryPolygon>,
    pub gluings: Vec<(EdgeRef, EdgeRef)>,
    pub start_system: CutSystem,
    pub boundary_trisection: Option<TrisectionDiagram>,
}

fn check_edge_ref(dec: &PolygonDecomposition, e: EdgeRef) -> Result<()> {
    let (p, i) = e;
    if p >= dec.polygons.len() || i >= dec.polygons[p].boundary.len() {
        return Err(Error::InvalidGluing {
            detail: format!("edge ({}, {}) does not exist", p, i),
        });
    }
    Ok(())
}

pub fn validate_decomposition(dec: &PolygonDecomposition) -> Result<()> {
    if dec.polygons.is_empty() {
        return Err(Error::InvalidPolygon { detail: "a decomposition holds at least one polygon".into() });
    }
    for (i, poly) in dec.polygons.iter().enumerate() {
        let g = poly.validate().map_err(|e| Error::InvalidPolygon {
            detail: format!("polygon {}: {}", i, e),
        })?;
        if g != dec.genus {
            return Err(Error::InvalidPolygon {
                detail: format!("polygon {} has genus {}, decomposition claims {}", i, g, dec.genus),
            });
        }
    }
    let mut used: BTreeMap<EdgeRef, usize> = BTreeMap::new();
    for (gi, &(a, b)) in dec.gluings.iter().enumerate() {
        check_edge_ref(dec, a)?;
        check_edge_ref(dec, b)?;
        if a == b {
            return Err(Error::InvalidGluing {
                detail: format!("gluing {} identifies edge ({}, {}) with itself", gi, a.0, a.1),
            });
        }
        for e in [a, b] {
            if let Some(prev) = used.insert(e, gi) {
                return Err(Error::InvalidGluing {
                    detail: format!(
                        "edge ({}, {}) appears in gluings {} and {}",
                        e.0, e.1, prev, gi
                    ),
                });
            }
        }
        let ea = &dec.polygons[a.0].boundary[a.1];
        let eb = &dec.polygons[b.0].boundary[b.1];
        if ea.reversed() != *eb {
            return Err(Error::InvalidGluing {
                detail: format!(
                    "glued edges ({}, {}) and ({}, {}) are not reverses of each other",
                    a.0, a.1, b.0, b.1
                ),
            });
        }
    }
    Ok(())
}

fn gluing_partner(dec: &PolygonDecomposition, e: EdgeRef) -> Option<EdgeRef> {
    for &(a, b) in &dec.gluings {
        if a == e {
            return Some(b);
        }
        if b == e {
            return Some(a);
        }
    }
    None
}

/// The unglued edges in walk order. Starting from any free edge, the walk
/// steps to the next edge of the same polygon and hops across gluings until
/// it lands on a free edge again.
pub fn boundary_cycle(dec: &PolygonDecomposition) -> Result<Vec<EdgeRef>> {
    let total: usize = dec.polygons.iter().map(|p| p.boundary.len()).sum();
    let mut free: Vec<EdgeRef> = Vec::new();
    for (pi, poly) in dec.polygons.iter().enumerate() {
        for ei in 0..poly.boundary.len() {
            if gluing_partner(dec, (pi, ei)).is_none() {
                free.push((pi, ei));
            }
        }
    }
    if free.is_empty() {
        return Err(Error::BoundaryNotSingleCycle {
            detail: "every edge is glued, so the family has no boundary".into(),
        });
    }
    let start = free[0];
    let mut cycle = vec![start];
    let mut cur = start;
    loop {
        // Successor within the current polygon, then hop through gluings.
        let mut cand = (cur.0, (cur.1 + 1) % dec.polygons[cur.0].boundary.len());
        let mut hops = 0;
        while let Some((p, e)) = gluing_partner(dec, cand) {
            cand = (p, (e + 1) % dec.polygons[p].boundary.len());
            hops += 1;
            if hops > total {
                unreachable!("gluing hops revisit an edge, so some edge is glued twice");
            }
        }
        if cand == start {
            break;
        }
        cycle.push(cand);
        cur = cand;
        if cycle.len() > free.len() {
            unreachable!("walk visits more free edges than exist");
        }
    }
    if cycle.len() != free.len() {
        return Err(Error::BoundaryNotSingleCycle {
            detail: format!(
                "walk from ({}, {}) closes after {} of {} free edges",
                start.0,
                start.1,
                cycle.len(),
                free.len()
            ),
        });
    }
    Ok(cycle)
}

/// The result of assembling a disk family: per-polygon types, the counts of
/// positively and negatively signed triple points, and the replayed outer
/// boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CappingReport {
    pub genus: usize,
    pub polygon_types: Vec<PolygonType>,
    pub positive_triples: usize,
    pub negative_triples: usize,
    pub boundary_edges: usize,
    pub boundary_type1_edges: usize,
    pub boundary_closes: bool,
    pub boundary_signature: Option<i64>,
    /// signature + positive - negative must vanish when a boundary
    /// trisection is supplied.
    pub signature_balanced: Option<bool>,
}

pub fn assemble_disk_family(dec: &PolygonDecomposition) -> Result<CappingReport> {
    validate_decomposition(dec)?;
    let lattice = SymplecticLattice::new(dec.genus);
    let report = validate_cut_system(&lattice, &dec.start_system);
    if !report.valid() {
        return Err(Error::InvalidCutSystem { context: "disk family start system", report });
    }

    let mut polygon_types = Vec::with_capacity(dec.polygons.len());
    let mut positive = 0usize;
    let mut negative = 0usize;
    for poly in &dec.polygons {
        let t = classify_polygon(poly)?;
        match t {
            PolygonType::Type2 { sign: 1 } => positive += 1,
            PolygonType::Type2 { sign: -1 } => negative += 1,
            PolygonType::Type2 { sign } => {
                return Err(Error::InvalidPolygon {
                    detail: format!("triple point carries sign {}, expected +1 or -1", sign),
                });
            }
            _ => {}
        }
        polygon_types.push(t);
    }

    let cycle = boundary_cycle(dec)?;
    let mut cur = dec.start_system.clone();
    let mut type1 = 0usize;
    for &(p, e) in &cycle {
        let edge = &dec.polygons[p].boundary[e];
        if classify_interval(edge)? == IntervalType::Type1 {
            type1 += 1;
        }
        cur = apply_interval(&lattice, &cur, edge)?.system;
    }
    let boundary_closes = lagrangian_span(&lattice, &dec.start_system)?
        == lagrangian_span(&lattice, &cur)?;

    let (boundary_signature, signature_balanced) = match &dec.boundary_trisection {
        None => (None, None),
        Some(t) => {
            let sigma = trisection_signature(t)?;
            let balanced = sigma + positive as i64 - negative as i64 == 0;
            (Some(sigma), Some(balanced))
        }
    };

    Ok(CappingReport {
        genus: dec.genus,
        polygon_types,
        positive_triples: positive,
        negative_triples: negative,
        boundary_edges: cycle.len(),
        boundary_type1_edges: type1,
        boundary_closes,
        boundary_signature,
        signature_balanced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ribbon::triple_census;

    use crate::catalog::{
        plain_segment, projective_plane, toral_hexagon, toral_switch_segment, toral_triple_point,
    };

    fn t1_edge(replaced: HomologyClass, new_class: HomologyClass) -> ElementaryInterval {
        toral_switch_segment(replaced, new_class)
    }

    fn t0_edge() -> ElementaryInterval {
        plain_segment(1)
    }

    fn a() -> HomologyClass {
        HomologyClass(vec![1, 0])
    }
    fn b() -> HomologyClass {
        HomologyClass(vec![0, 1])
    }
    fn ab() -> HomologyClass {
        HomologyClass(vec![1, 1])
    }

    #[test]
    fn hexagons_carry_at_most_three_toral_edges() {
        for rn in triple_census() {
            for roles in [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]] {
                let types = permutahedron_edge_types(&rn, roles).unwrap();
                let t1 = types.iter().filter(|&&t| t == IntervalType::Type1).count();
                assert!(t1 <= 3, "profile {:?} roles {:?} gives {} type-1 edges", rn.profile(), roles, t1);
            }
        }
    }

    #[test]
    fn census_contains_a_fully_toral_triple_point() {
        let rn = toral_triple_point();
        assert_eq!(rn.genus(), 1);
        assert_eq!(rn.vertices(), 3);
    }

    #[test]
    fn centerless_polygons_classify_by_edge_count() {
        let square = ElementaryPolygon {
            boundary: vec![t0_edge(), t0_edge(), t0_edge(), t0_edge()],
            center: None,
        };
        assert_eq!(classify_polygon(&square).unwrap(), PolygonType::Type0);

        let crossing = ElementaryPolygon {
            boundary: vec![t1_edge(a(), b()), t0_edge(), t1_edge(b(), a()), t0_edge()],
            center: None,
        };
        assert_eq!(classify_polygon(&crossing).unwrap(), PolygonType::Type1);

        let anomalous = ElementaryPolygon {
            boundary: vec![t1_edge(a(), b()), t0_edge(), t1_edge(b(), a()), t1_edge(a(), b()), t0_edge(), t1_edge(b(), a())],
            center: None,
        };
        assert!(matches!(
            classify_polygon(&anomalous),
            Err(Error::AnomalousTypeCount { count: 4 })
        ));
    }

    #[test]
    fn swallowtails_reject_toral_edges() {
        let bad = ElementaryPolygon {
            boundary: vec![t1_edge(a(), b()), t0_edge(), t1_edge(b(), a()), t0_edge()],
            center: Some(Event2::Swallowtail),
        };
        assert!(matches!(classify_polygon(&bad), Err(Error::AnomalousTypeCount { count: 2 })));
    }

    #[test]
    fn toral_hexagon_signs_follow_the_local_classes() {
        let minus = toral_hexagon([a(), b(), ab()]);
        assert_eq!(classify_polygon(&minus).unwrap(), PolygonType::Type2 { sign: -1 });
        let plus = toral_hexagon([a(), ab(), b()]);
        assert_eq!(classify_polygon(&plus).unwrap(), PolygonType::Type2 { sign: 1 });
    }

    #[test]
    fn triple_switch_validation_constrains_the_local_data() {
        let mut poly = toral_hexagon([a(), b(), ab()]);
        // Wrong edge count.
        poly.boundary.pop();
        assert!(poly.validate().is_err());

        // Non-unit local pairing: a pairs to zero with itself.
        let bad = toral_hexagon([a(), a(), b()]);
        assert!(bad.validate().is_err());

        // Imprimitive local class.
        let imprimitive = toral_hexagon([HomologyClass(vec![2, 0]), b(), ab()]);
        assert!(imprimitive.validate().is_err());
    }

    #[test]
    fn capping_a_projective_plane_boundary_balances_the_signature() {
        let dec = PolygonDecomposition {
            genus: 1,
            polygons: vec![toral_hexagon([a(), b(), ab()])],
            gluings: vec![],
            start_system: CutSystem::from_rows(1, &[vec![1, 0]]),
            boundary_trisection: Some(projective_plane()),
        };
        let report = assemble_disk_family(&dec).unwrap();
        assert_eq!(report.positive_triples, 0);
        assert_eq!(report.negative_triples, 1);
        assert_eq!(report.boundary_edges, 6);
        assert_eq!(report.boundary_type1_edges, 3);
        assert!(report.boundary_closes);
        assert_eq!(report.boundary_signature, Some(1));
        assert_eq!(report.signature_balanced, Some(true));
    }

    #[test]
    fn glued_hexagons_merge_their_boundaries() {
        // Second hexagon walks the surgeries backwards; its type-2 sign flips.
        let h1 = toral_hexagon([a(), b(), ab()]);
        let h2 = ElementaryPolygon {
            boundary: vec![
                t1_edge(a(), ab()),
                t1_edge(ab(), b()),
                t0_edge(),
                t0_edge(),
                t0_edge(),
                t1_edge(b(), a()),
            ],
            center: Some(Event2::TripleSwitch {
                neighborhood: toral_triple_point(),
                local_classes: Some([a(), ab(), b()]),
            }),
        };
        let dec = PolygonDecomposition {
            genus: 1,
            polygons: vec![h1, h2],
            gluings: vec![((0, 1), (1, 4))],
            start_system: CutSystem::from_rows(1, &[vec![1, 0]]),
            boundary_trisection: None,
        };
        let report = assemble_disk_family(&dec).unwrap();
        assert_eq!(report.positive_triples, 1);
        assert_eq!(report.negative_triples, 1);
        assert_eq!(report.boundary_edges, 10);
        assert!(report.boundary_closes);
    }

    #[test]
    fn gluing_validation_rejects_mismatched_edges() {
        let h1 = toral_hexagon([a(), b(), ab()]);
        let h2 = toral_hexagon([a(), b(), ab()]);
        let dec = PolygonDecomposition {
            genus: 1,
            polygons: vec![h1, h2],
            // Edge (0,0) replaces a by b; edge (1,0) does the same instead of
            // undoing it, so the pair is not reversed.
            gluings: vec![((0, 0), (1, 0))],
            start_system: CutSystem::from_rows(1, &[vec![1, 0]]),
            boundary_trisection: None,
        };
        assert!(matches!(
            validate_decomposition(&dec),
            Err(Error::InvalidGluing { .. })
        ));
    }

    #[test]
    fn doubly_used_edges_are_rejected() {
        let h1 = toral_hexagon([a(), b(), ab()]);
        let h2 = ElementaryPolygon {
            boundary: vec![
                t1_edge(a(), ab()),
                t1_edge(ab(), b()),
                t0_edge(),
                t0_edge(),
                t0_edge(),
                t1_edge(b(), a()),
            ],
            center: Some(Event2::TripleSwitch {
                neighborhood: toral_triple_point(),
                local_classes: Some([a(), ab(), b()]),
            }),
        };
        let dec = PolygonDecomposition {
            genus: 1,
            polygons: vec![h1, h2],
            gluings: vec![((0, 1), (1, 4)), ((0, 3), (1, 4))],
            start_system: CutSystem::from_rows(1, &[vec![1, 0]]),
            boundary_trisection: None,
        };
        assert!(matches!(
            validate_decomposition(&dec),
            Err(Error::InvalidGluing { .. })
        ));
    }
}
