//! Invariants read off cut-system data: first homology of the three-manifolds
//! presented by pairs of systems, and the Euler characteristic and signature
//! of the four-manifold encoded by a trisection diagram.

use crate::linalg::{smith_normal_form, IntMat};
use crate::surface::{
    intersection_pairing, lagrangian_span, validate_cut_system, CutSystem, LagrangianSublattice,
    SymplecticLattice,
};
use crate::{Error, Result, ValidationReport};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A finitely generated abelian group: free rank plus invariant factors
/// (each > 1, each dividing the next).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupDescriptor {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianGroupDescriptor {
    pub fn free(rank: usize) -> Self {
        AbelianGroupDescriptor { rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free_of_rank(&self, rank: usize) -> bool {
        self.rank == rank && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The quotient of Z^cols by the row lattice of `m`.
pub fn cokernel_of_rows(m: &IntMat) -> AbelianGroupDescriptor {
    if m.rows() == 0 || m.cols() == 0 {
        return AbelianGroupDescriptor::free(m.cols());
    }
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let torsion: Vec<i64> = diag.iter().copied().filter(|&d| d > 1).collect();
    AbelianGroupDescriptor { rank: m.cols() - snf.rank(), torsion }
}

/// First homology of the closed three-manifold glued from two handlebodies
/// along the two cut systems: the cokernel of their intersection matrix.
pub fn heegaard_h1(
    lattice: &SymplecticLattice,
    alpha: &CutSystem,
    beta: &CutSystem,
) -> Result<AbelianGroupDescriptor> {
    for (name, cs) in [("alpha", alpha), ("beta", beta)] {
        let report = validate_cut_system(lattice, cs);
        if !report.valid() {
            return Err(Error::InvalidCutSystem {
                context: if name == "alpha" { "heegaard alpha system" } else { "heegaard beta system" },
                report,
            });
        }
    }
    let g = lattice.genus();
    let mut p = IntMat::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            p.set(i, j, intersection_pairing(&alpha.curves[i], &beta.curves[j])?);
        }
    }
    Ok(cokernel_of_rows(&p))
}

/// Three cut systems on one surface, claimed to present a closed
/// four-manifold with `k` the common complexity of the three sectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrisectionDiagram {
    pub genus: usize,
    pub k: usize,
    pub alpha: CutSystem,
    pub beta: CutSystem,
    pub gamma: CutSystem,
}

impl TrisectionDiagram {
    pub fn lattice(&self) -> SymplecticLattice {
        SymplecticLattice::new(self.genus)
    }

    pub fn systems(&self) -> [(&'static str, &CutSystem); 3] {
        [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma)]
    }
}

/// Checks the three systems individually and the pairwise condition: each
/// pair must present a connected sum of k copies of S1 x S2, i.e. have
/// first homology Z^k.
pub fn validate_trisection(t: &TrisectionDiagram) -> ValidationReport {
    let mut report = ValidationReport::new();
    let lattice = t.lattice();
    if t.k > t.genus {
        report.push(
            "K_EXCEEDS_GENUS",
            format!("sector complexity {} exceeds genus {}", t.k, t.genus),
        );
    }
    let mut all_valid = true;
    for (name, cs) in t.systems() {
        let r = validate_cut_system(&lattice, cs);
        if !r.valid() {
            all_valid = false;
            for f in r.failures {
                report.push(&f.code, format!("{} system: {}", name, f.detail));
            }
        }
    }
    if !all_valid {
        return report;
    }
    let pairs = [("alpha", &t.alpha, "beta", &t.beta), ("beta", &t.beta, "gamma", &t.gamma), ("gamma", &t.gamma, "alpha", &t.alpha)];
    for (n1, s1, n2, s2) in pairs {
        let h1 = heegaard_h1(&lattice, s1, s2).expect("systems validated above");
        if !h1.is_free_of_rank(t.k) {
            report.push(
                "PAIR_H1_MISMATCH",
                format!("{}/{} pair has first homology {}, expected Z^{}", n1, n2, h1, t.k),
            );
        }
    }
    report
}

/// Euler characteristic of the four-manifold: 2 + g - 3k.
pub fn trisection_euler_characteristic(t: &TrisectionDiagram) -> i64 {
    2 + t.genus as i64 - 3 * t.k as i64
}

/// First homology of the presented four-manifold. All three curve families
/// bound disks in their sectors, so H1 is the surface lattice modulo the
/// union of the three spans.
pub fn trisection_h1(t: &TrisectionDiagram) -> Result<AbelianGroupDescriptor> {
    let report = validate_trisection(t);
    if !report.valid() {
        return Err(Error::InvalidTrisection { detail: report.summary() });
    }
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(3 * t.genus);
    for (_, cs) in t.systems() {
        for c in &cs.curves {
            rows.push(c.0.clone());
        }
    }
    if rows.is_empty() {
        return Ok(AbelianGroupDescriptor::free(0));
    }
    Ok(cokernel_of_rows(&IntMat::from_rows(&rows)))
}

type Rat = BigRational;

fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Symplectic pairing extended to rational coordinate vectors.
fn pairing_rat(x: &[Rat], y: &[Rat]) -> Rat {
    let mut total = Rat::zero();
    for h in 0..x.len() / 2 {
        total += &x[2 * h] * &y[2 * h + 1] - &x[2 * h + 1] * &y[2 * h];
    }
    total
}

/// Basis of the rational left kernel {v : v * m = 0} via Gauss elimination.
fn rational_left_kernel(m: &IntMat) -> Vec<Vec<Rat>> {
    let n = m.rows();
    let cols = m.cols();
    // a = m^T as rational rows: cols x n, kernel of v |-> a * v.
    let mut a: Vec<Vec<Rat>> = (0..cols)
        .map(|r| (0..n).map(|c| rat(m.get(c, r))).collect())
        .collect();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0usize;
    for c in 0..n {
        let mut pivot = None;
        for i in r..cols {
            if !a[i][c].is_zero() {
                pivot = Some(i);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= &inv;
        }
        for i in 0..cols {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..n {
                    let d = &a[r][j] * &f;
                    a[i][j] -= d;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == cols {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let mut kernel = Vec::new();
    for f in 0..n {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![Rat::zero(); n];
        v[f] = rat(1);
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[row][f].clone();
        }
        kernel.push(v);
    }
    kernel
}

/// Signature of a symmetric rational matrix by congruence diagonalization.
fn symmetric_signature(mut s: Vec<Vec<Rat>>) -> i64 {
    let n = s.len();
    let mut plus = 0i64;
    let mut minus = 0i64;
    for k in 0..n {
        if s[k][k].is_zero() {
            if let Some(j) = ((k + 1)..n).find(|&j| !s[j][j].is_zero()) {
                s.swap(k, j);
                for row in s.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = ((k + 1)..n).find(|&j| !s[k][j].is_zero()) {
                // add row/col j into k; diagonal becomes 2*s[k][j]
                for c in 0..n {
                    let add = s[j][c].clone();
                    s[k][c] += add;
                }
                for r in 0..n {
                    let add = s[r][j].clone();
                    s[r][k] += add;
                }
            } else {
                continue; // null direction
            }
        }
        let p = s[k][k].clone();
        for j in (k + 1)..n {
            if s[k][j].is_zero() {
                continue;
            }
            let f = &s[k][j] / &p;
            for c in 0..n {
                let sub = &s[k][c] * &f;
                s[j][c] -= sub;
            }
            for r in 0..n {
                let sub = &s[r][k] * &f;
                s[r][j] -= sub;
            }
        }
        if p.is_positive() {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    plus - minus
}

/// Signature of the (symmetrized) pairing form on triples
/// (a, b, c) in La x Lb x Lc with a + b + c = 0, evaluated as <a, b'>.
pub fn wall_signature(
    la: &LagrangianSublattice,
    lb: &LagrangianSublattice,
    lc: &LagrangianSublattice,
) -> Result<i64> {
    let ambient = la.ambient_rank;
    if lb.ambient_rank != ambient || lc.ambient_rank != ambient {
        return Err(Error::DimensionMismatch { expected: ambient, got: lb.ambient_rank.max(lc.ambient_rank) });
    }
    let g = ambient / 2;
    if g == 0 {
        return Ok(0);
    }
    debug_assert!(la.rank() == g && lb.rank() == g && lc.rank() == g);

    // Stack the three bases; left-kernel vectors (x|y|z) encode the triples.
    let mut stacked = IntMat::zeros(3 * g, ambient);
    for (block, l) in [la, lb, lc].iter().enumerate() {
        let bm = l.basis_matrix();
        for i in 0..g {
            for j in 0..ambient {
                stacked.set(block * g + i, j, bm.get(i, j));
            }
        }
    }
    let kernel = rational_left_kernel(&stacked);

    let to_ambient = |coeffs: &[Rat], l: &LagrangianSublattice| -> Vec<Rat> {
        let bm = l.basis_matrix();
        (0..ambient)
            .map(|j| {
                let mut acc = Rat::zero();
                for (i, c) in coeffs.iter().enumerate() {
                    acc += c * rat(bm.get(i, j));
                }
                acc
            })
            .collect()
    };

    let dim = kernel.len();
    let mut gram = vec![vec![Rat::zero(); dim]; dim];
    let parts: Vec<(Vec<Rat>, Vec<Rat>)> = kernel
        .iter()
        .map(|v| {
            let a = to_ambient(&v[0..g], la);
            let b = to_ambient(&v[g..2 * g], lb);
            (a, b)
        })
        .collect();
    for i in 0..dim {
        for j in 0..dim {
            gram[i][j] = pairing_rat(&parts[i].0, &parts[j].1);
        }
    }
    // The raw form is only symmetric up to the null directions; its
    // symmetrization carries the signature.
    let mut sym = vec![vec![Rat::zero(); dim]; dim];
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    for i in 0..dim {
        for j in 0..dim {
            sym[i][j] = (&gram[i][j] + &gram[j][i]) * &half;
        }
    }
    Ok(symmetric_signature(sym))
}

/// Signature of the four-manifold presented by a valid trisection diagram.
pub fn trisection_signature(t: &TrisectionDiagram) -> Result<i64> {
    let report = validate_trisection(t);
    if !report.valid() {
        return Err(Error::InvalidTrisection { detail: report.summary() });
    }
    let lattice = t.lattice();
    let la = lagrangian_span(&lattice, &t.alpha)?;
    let lb = lagrangian_span(&lattice, &t.beta)?;
    let lc = lagrangian_span(&lattice, &t.gamma)?;
    wall_signature(&la, &lb, &lc)
}
