//! Ready-made diagrams, segments, and decompositions: the standard genus-g
//! trisections, the small catalog of closed four-manifolds used to pin down
//! sign conventions, and a fully populated hexagon decomposition.

use crate::family_one::{ElementaryInterval, Event1, IntervalType, SurgeryData, SwitchLocale};
use crate::family_two::{
    permutahedron_edge_types, ElementaryPolygon, Event2, PolygonDecomposition,
};
use crate::invariants::TrisectionDiagram;
use crate::morse::SlicedMorseFunction;
use crate::ribbon::{genus_one_switch, triple_census, RibbonNeighborhood};
use crate::surface::{CutSystem, HomologyClass, SymplecticLattice};

/// The standard (g, k) trisection diagram: the first k handles are shared by
/// all three systems; each remaining handle contributes a, b, a+b.
pub fn standard_trisection(genus: usize, k: usize) -> TrisectionDiagram {
    assert!(k <= genus, "a (g, k) diagram needs k <= g");
    let l = SymplecticLattice::new(genus);
    let alpha: Vec<HomologyClass> = (0..genus).map(|i| l.a(i)).collect();
    let beta: Vec<HomologyClass> =
        (0..genus).map(|i| if i < k { l.a(i) } else { l.b(i) }).collect();
    let gamma: Vec<HomologyClass> = (0..genus)
        .map(|i| if i < k { l.a(i) } else { l.a(i).add(&l.b(i)).expect("equal ranks") })
        .collect();
    TrisectionDiagram {
        genus,
        k,
        alpha: CutSystem::new(genus, alpha),
        beta: CutSystem::new(genus, beta),
        gamma: CutSystem::new(genus, gamma),
    }
}

/// The standard genus-g Heegaard pair presenting #^k S^1 x S^2: k shared
/// handles, then duals.
pub fn standard_pair(genus: usize, k: usize) -> (CutSystem, CutSystem) {
    let t = standard_trisection(genus, k);
    (t.alpha, t.beta)
}

/// (0, 0): the four-sphere.
pub fn four_sphere() -> TrisectionDiagram {
    standard_trisection(0, 0)
}

/// (1, 0) with gamma = a + b: the complex projective plane, signature +1.
pub fn projective_plane() -> TrisectionDiagram {
    standard_trisection(1, 0)
}

/// (1, 0) with gamma = a - b: reversed orientation, signature -1.
pub fn projective_plane_reversed() -> TrisectionDiagram {
    let l = SymplecticLattice::new(1);
    TrisectionDiagram {
        genus: 1,
        k: 0,
        alpha: CutSystem::new(1, vec![l.a(0)]),
        beta: CutSystem::new(1, vec![l.b(0)]),
        gamma: CutSystem::new(1, vec![l.a(0).scaled_add(-1, &l.b(0)).expect("equal ranks")]),
    }
}

/// (1, 1): S^1 x S^3.
pub fn s1_cross_s3() -> TrisectionDiagram {
    standard_trisection(1, 1)
}

/// Genus-2 block sum of the projective plane and its reverse; signature 0.
pub fn projective_sum() -> TrisectionDiagram {
    let l = SymplecticLattice::new(2);
    TrisectionDiagram {
        genus: 2,
        k: 0,
        alpha: CutSystem::new(2, vec![l.a(0), l.a(1)]),
        beta: CutSystem::new(2, vec![l.b(0), l.b(1)]),
        gamma: CutSystem::new(
            2,
            vec![
                l.a(0).add(&l.b(0)).expect("equal ranks"),
                l.a(1).scaled_add(-1, &l.b(1)).expect("equal ranks"),
            ],
        ),
    }
}

/// An eventless segment over the standard genus-g function.
pub fn plain_segment(genus: usize) -> ElementaryInterval {
    ElementaryInterval::eventless(&SlicedMorseFunction::standard(genus))
}

/// A genus-one switch segment over the standard genus-1 function, replacing
/// one curve class by another.
pub fn toral_switch_segment(
    replaced: HomologyClass,
    new_class: HomologyClass,
) -> ElementaryInterval {
    let f = SlicedMorseFunction::standard(1);
    ElementaryInterval {
        start: f.clone(),
        end: f,
        event: Some(Event1::Switch {
            first: 1,
            second: 2,
            locale: SwitchLocale::SameComponent {
                neighborhood: genus_one_switch(),
                surgery: Some(SurgeryData { replaced, new_class }),
            },
        }),
        slide: None,
    }
}

/// A triple point whose hexagon shows three genus-one switches, pulled from
/// the census.
pub fn toral_triple_point() -> RibbonNeighborhood {
    static CACHE: std::sync::OnceLock<RibbonNeighborhood> = std::sync::OnceLock::new();
    CACHE
        .get_or_init(|| {
            triple_census()
                .into_iter()
                .find(|rn| {
                    rn.genus() == 1
                        && permutahedron_edge_types(rn, [0, 1, 2])
                            .map(|ts| {
                                ts.iter().filter(|&&t| t == IntervalType::Type1).count() == 3
                            })
                            .unwrap_or(false)
                })
                .expect("the census contains a fully toral triple point")
        })
        .clone()
}

/// The hexagon around a toral triple point whose boundary walks the curve
/// through a -> b -> a+b -> a. The listed local classes fix its sign.
pub fn toral_hexagon(local: [HomologyClass; 3]) -> ElementaryPolygon {
    let a = HomologyClass(vec![1, 0]);
    let b = HomologyClass(vec![0, 1]);
    let ab = HomologyClass(vec![1, 1]);
    ElementaryPolygon {
        boundary: vec![
            toral_switch_segment(a.clone(), b.clone()),
            plain_segment(1),
            toral_switch_segment(b, ab.clone()),
            plain_segment(1),
            toral_switch_segment(ab, a),
            plain_segment(1),
        ],
        center: Some(Event2::TripleSwitch {
            neighborhood: toral_triple_point(),
            local_classes: Some(local),
        }),
    }
}

/// A single hexagon capping the compiled projective-plane family:
/// one negative triple point against a boundary of signature +1.
pub fn projective_hexagon_decomposition() -> PolygonDecomposition {
    let a = HomologyClass(vec![1, 0]);
    let b = HomologyClass(vec![0, 1]);
    let ab = HomologyClass(vec![1, 1]);
    PolygonDecomposition {
        genus: 1,
        polygons: vec![toral_hexagon([a, b, ab])],
        gluings: vec![],
        start_system: CutSystem::from_rows(1, &[vec![1, 0]]),
        boundary_trisection: Some(projective_plane()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{
        trisection_euler_characteristic, trisection_signature, validate_trisection,
    };

    #[test]
    fn standard_trisections_are_valid_for_small_parameters() {
        for g in 0..4 {
            for k in 0..=g {
                let t = standard_trisection(g, k);
                assert!(validate_trisection(&t).valid(), "({}, {}) failed", g, k);
                assert_eq!(
                    trisection_euler_characteristic(&t),
                    2 + g as i64 - 3 * k as i64
                );
            }
        }
    }

    #[test]
    fn catalog_signatures_match_the_frozen_convention() {
        assert_eq!(trisection_signature(&four_sphere()).unwrap(), 0);
        assert_eq!(trisection_signature(&projective_plane()).unwrap(), 1);
        assert_eq!(trisection_signature(&projective_plane_reversed()).unwrap(), -1);
        assert_eq!(trisection_signature(&s1_cross_s3()).unwrap(), 0);
        assert_eq!(trisection_signature(&projective_sum()).unwrap(), 0);
    }
}
