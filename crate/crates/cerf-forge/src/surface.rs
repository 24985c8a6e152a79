//! First homology of a closed oriented genus-g surface with its intersection
//! pairing, and cut systems up to handle slides.
//!
//! Basis order is interleaved: a1, b1, a2, b2, ..., ag, bg. The pairing is
//! <a_i, b_i> = +1, all other basis pairings zero.

use crate::linalg::{hermite_normal_form, smith_normal_form, solve_left, IntMat};
use crate::{Error, Result, ValidationReport};
use serde::{Deserialize, Serialize};

/// An integral first-homology class, coordinates in the interleaved basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyClass(pub Vec<i64>);

impl HomologyClass {
    pub fn zero(rank: usize) -> Self {
        HomologyClass(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        HomologyClass(self.0.iter().map(|&c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: other.rank() });
        }
        Ok(HomologyClass(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect()))
    }

    pub fn scaled_add(&self, coeff: i64, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: other.rank() });
        }
        Ok(HomologyClass(self.0.iter().zip(&other.0).map(|(x, y)| x + coeff * y).collect()))
    }

    /// gcd of the coordinates; 0 for the zero class.
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |acc, &c| crate::linalg::gcd(acc, c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }
}

/// The rank-2g lattice H1 of a genus-g surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticLattice {
    genus: usize,
}

impl SymplecticLattice {
    pub fn new(genus: usize) -> Self {
        SymplecticLattice { genus }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    /// The class a_{i+1} (0-indexed handle).
    pub fn a(&self, handle: usize) -> HomologyClass {
        assert!(handle < self.genus, "handle index out of range");
        let mut v = vec![0; self.rank()];
        v[2 * handle] = 1;
        HomologyClass(v)
    }

    /// The class b_{i+1} (0-indexed handle).
    pub fn b(&self, handle: usize) -> HomologyClass {
        assert!(handle < self.genus, "handle index out of range");
        let mut v = vec![0; self.rank()];
        v[2 * handle + 1] = 1;
        HomologyClass(v)
    }
}

/// Algebraic intersection number of two classes on the same surface.
pub fn intersection_pairing(x: &HomologyClass, y: &HomologyClass) -> Result<i64> {
    if x.rank() != y.rank() {
        return Err(Error::DimensionMismatch { expected: x.rank(), got: y.rank() });
    }
    if !x.rank().is_multiple_of(2) {
        return Err(Error::DimensionMismatch { expected: x.rank() + 1, got: x.rank() });
    }
    let mut total = 0i64;
    for h in 0..x.rank() / 2 {
        total += x.0[2 * h] * y.0[2 * h + 1] - x.0[2 * h + 1] * y.0[2 * h];
    }
    Ok(total)
}

/// An ordered list of curve classes, one slot per handle. Possibly invalid;
/// see [`validate_cut_system`].
///
/// `provenance` remembers, per slot, which level circle the class was read
/// from when the system came out of a sliced function. Slides clear it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSystem {
    pub genus: usize,
    pub curves: Vec<HomologyClass>,
    pub provenance: Vec<Option<String>>,
}

impl CutSystem {
    pub fn new(genus: usize, curves: Vec<HomologyClass>) -> Self {
        let provenance = vec![None; curves.len()];
        CutSystem { genus, curves, provenance }
    }

    pub fn from_rows(genus: usize, rows: &[Vec<i64>]) -> Self {
        CutSystem::new(genus, rows.iter().map(|r| HomologyClass(r.clone())).collect())
    }

    pub fn matrix(&self) -> IntMat {
        let rows: Vec<Vec<i64>> = self.curves.iter().map(|c| c.0.clone()).collect();
        if rows.is_empty() {
            IntMat::zeros(0, 2 * self.genus)
        } else {
            IntMat::from_rows(&rows)
        }
    }
}

/// One slide: curve `target` += `sign` * curve `other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideMove {
    pub target: usize,
    pub other: usize,
    pub sign: i64,
}

/// Checks curve count, coordinate dimensions, pairwise intersection numbers,
/// and that the curves form part of a basis (all elementary divisors 1).
pub fn validate_cut_system(lattice: &SymplecticLattice, cs: &CutSystem) -> ValidationReport {
    let mut report = ValidationReport::new();
    let g = lattice.genus();
    if cs.genus != g {
        report.push("GENUS_MISMATCH", format!("system claims genus {}, surface has genus {}", cs.genus, g));
    }
    if cs.curves.len() != g {
        report.push(
            "WRONG_CURVE_COUNT",
            format!("expected {} curve classes, found {}", g, cs.curves.len()),
        );
    }
    let mut dims_ok = true;
    for (i, c) in cs.curves.iter().enumerate() {
        if c.rank() != 2 * g {
            report.push(
                "DIMENSION_MISMATCH",
                format!("curve {} has {} coordinates, expected {}", i, c.rank(), 2 * g),
            );
            dims_ok = false;
        }
    }
    if !dims_ok || cs.curves.len() != g {
        return report;
    }
    for i in 0..g {
        for j in (i + 1)..g {
            let p = intersection_pairing(&cs.curves[i], &cs.curves[j]).expect("dims checked");
            if p != 0 {
                report.push(
                    "NOT_ISOTROPIC",
                    format!("curves {} and {} intersect with pairing {}", i, j, p),
                );
            }
        }
    }
    if g > 0 {
        let snf = smith_normal_form(&cs.matrix());
        let diag = snf.diagonal();
        let unimodular = diag.len() == g && diag.iter().all(|&d| d == 1);
        if !unimodular {
            report.push(
                "NOT_UNIMODULAR",
                format!("elementary divisors {:?}, expected {} ones", diag, g),
            );
        }
    }
    report
}

/// Applies one handle slide, returning the new system. Slot provenance of the
/// moved curve is cleared.
pub fn slide(cs: &CutSystem, mv: SlideMove) -> Result<CutSystem> {
    if mv.target == mv.other {
        return Err(Error::SlideSameIndex);
    }
    let len = cs.curves.len();
    for idx in [mv.target, mv.other] {
        if idx >= len {
            return Err(Error::IndexOutOfRange { index: idx, len });
        }
    }
    if mv.sign != 1 && mv.sign != -1 {
        return Err(Error::MalformedEvent { detail: format!("slide sign must be +1 or -1, got {}", mv.sign) });
    }
    let mut out = cs.clone();
    out.curves[mv.target] = cs.curves[mv.target].scaled_add(mv.sign, &cs.curves[mv.other])?;
    out.provenance[mv.target] = None;
    Ok(out)
}

/// A saturated isotropic sublattice of half rank, stored by its canonical
/// (Hermite-form) basis. Equal values mean equal sublattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangianSublattice {
    pub ambient_rank: usize,
    pub basis: Vec<HomologyClass>,
}

impl LagrangianSublattice {
    /// Canonicalizes the span of the given classes, checking that it really
    /// is Lagrangian: isotropic, saturated, rank = half the ambient rank.
    pub fn span_of(ambient_rank: usize, classes: &[HomologyClass]) -> Result<Self> {
        if !ambient_rank.is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: ambient_rank + 1, got: ambient_rank });
        }
        for c in classes {
            if c.rank() != ambient_rank {
                return Err(Error::DimensionMismatch { expected: ambient_rank, got: c.rank() });
            }
        }
        for i in 0..classes.len() {
            for j in (i + 1)..classes.len() {
                let p = intersection_pairing(&classes[i], &classes[j])?;
                if p != 0 {
                    return Err(Error::NotLagrangian {
                        detail: format!("classes {} and {} pair to {}", i, j, p),
                    });
                }
            }
        }
        let half = ambient_rank / 2;
        if classes.is_empty() {
            if half == 0 {
                return Ok(LagrangianSublattice { ambient_rank, basis: Vec::new() });
            }
            return Err(Error::NotLagrangian {
                detail: format!("span has rank 0, expected {}", half),
            });
        }
        let rows: Vec<Vec<i64>> = classes.iter().map(|c| c.0.clone()).collect();
        let m = IntMat::from_rows(&rows);
        let snf = smith_normal_form(&m);
        if snf.rank() != half {
            return Err(Error::NotLagrangian {
                detail: format!("span has rank {}, expected {}", snf.rank(), half),
            });
        }
        if snf.diagonal().iter().any(|&d| d != 1) {
            return Err(Error::NotLagrangian {
                detail: format!("span is not saturated, elementary divisors {:?}", snf.diagonal()),
            });
        }
        let hnf = hermite_normal_form(&m);
        let basis = hnf.row_vecs().into_iter().map(HomologyClass).collect();
        Ok(LagrangianSublattice { ambient_rank, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_matrix(&self) -> IntMat {
        if self.basis.is_empty() {
            return IntMat::zeros(0, self.ambient_rank);
        }
        let rows: Vec<Vec<i64>> = self.basis.iter().map(|c| c.0.clone()).collect();
        IntMat::from_rows(&rows)
    }

    pub fn contains(&self, class: &HomologyClass) -> bool {
        if class.rank() != self.ambient_rank {
            return false;
        }
        if self.basis.is_empty() {
            return class.is_zero();
        }
        solve_left(&self.basis_matrix(), &class.0).is_some()
    }
}

/// The sublattice spanned by a valid cut system; the slide-equivalence
/// invariant. Two systems are slide-equivalent iff their spans agree.
pub fn lagrangian_span(lattice: &SymplecticLattice, cs: &CutSystem) -> Result<LagrangianSublattice> {
    let report = validate_cut_system(lattice, cs);
    if !report.valid() {
        return Err(Error::InvalidCutSystem { context: "lagrangian_span", report });
    }
    LagrangianSublattice::span_of(lattice.rank(), &cs.curves)
}
