//! Exact integer matrix routines: Smith and Hermite normal forms, integer
//! kernels, solving over the integers, and unimodular completion.
//!
//! Everything works on dense `i64` matrices at desk scale. Debug builds trap
//! on overflow, which is the honest failure mode for inputs far outside the
//! intended range.

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        IntMat { rows: r, cols: c, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == i64::from(r == c)))
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    // Elementary row operations. All preserve the row lattice up to unimodular
    // change of basis.
    pub fn row_add(&mut self, dst: usize, src: usize, k: i64) {
        assert_ne!(dst, src);
        for c in 0..self.cols {
            let v = self.get(dst, c) + k * self.get(src, c);
            self.set(dst, c, v);
        }
    }

    pub fn row_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let (x, y) = (self.get(a, c), self.get(b, c));
            self.set(a, c, y);
            self.set(b, c, x);
        }
    }

    pub fn row_negate(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c);
            self.set(r, c, v);
        }
    }

    fn col_add(&mut self, dst: usize, src: usize, k: i64) {
        assert_ne!(dst, src);
        for r in 0..self.rows {
            let v = self.get(r, dst) + k * self.get(r, src);
            self.set(r, dst, v);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let (x, y) = (self.get(r, a), self.get(r, b));
            self.set(r, a, y);
            self.set(r, b, x);
        }
    }

}

/// Smith normal form `u * m * v = d` with `d` diagonal, non-negative, and each
/// diagonal entry dividing the next. `u`, `v` are unimodular; `vinv` is kept
/// for basis-completion callers.
pub struct Snf {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
    pub vinv: IntMat,
}

impl Snf {
    /// Diagonal entries, including zeros, in chain order.
    pub fn diagonal(&self) -> Vec<i64> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&x| x != 0).count()
    }
}

pub fn smith_normal_form(m: &IntMat) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);
    let mut vinv = IntMat::identity(cols);

    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // Pivot: entry of minimal absolute value in the working block.
            let mut pivot: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    let x = d.get(r, c).abs();
                    if x != 0 && pivot.is_none_or(|(pr, pc)| x < d.get(pr, pc).abs()) {
                        pivot = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = pivot else {
                // Block is zero; done with the whole loop.
                assert_diag_clean(&d, t);
                finish(&mut d, &mut u, m, &mut v, &mut vinv);
                return Snf { d, u, v, vinv };
            };
            d.row_swap(t, pr);
            u.row_swap(t, pr);
            d.col_swap(t, pc);
            v.col_swap(t, pc);
            vinv.row_swap(t, pc);

            let p = d.get(t, t);
            let mut dirty = false;
            for r in t + 1..rows {
                let q = d.get(r, t) / p;
                if q != 0 {
                    d.row_add(r, t, -q);
                    u.row_add(r, t, -q);
                }
                dirty |= d.get(r, t) != 0;
            }
            for c in t + 1..cols {
                let q = d.get(t, c) / p;
                if q != 0 {
                    d.col_add(c, t, -q);
                    v.col_add(c, t, -q);
                    vinv.row_add(t, c, q);
                }
                dirty |= d.get(t, c) != 0;
            }
            if !dirty {
                break;
            }
        }
    }
    finish(&mut d, &mut u, m, &mut v, &mut vinv);
    Snf { d, u, v, vinv }
}

fn assert_diag_clean(d: &IntMat, upto: usize) {
    debug_assert!((0..upto).all(|t| {
        (t + 1..d.rows()).all(|r| d.get(r, t) == 0) && (t + 1..d.cols()).all(|c| d.get(t, c) == 0)
    }));
}

/// Sign normalization, divisibility chain repair, and the postcondition
/// asserts (`u*m*v = d`, chain divides). Asserted on every call by design.
fn finish(d: &mut IntMat, u: &mut IntMat, m: &IntMat, v: &mut IntMat, vinv: &mut IntMat) {
    let n = d.rows().min(d.cols());
    for t in 0..n {
        if d.get(t, t) < 0 {
            d.row_negate(t);
            u.row_negate(t);
        }
    }
    // Repair divisibility pairwise: gcd/lcm surgery on the 2x2 diagonal block.
    loop {
        let mut fixed = true;
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (d.get(i, i), d.get(i + 1, i + 1));
            if a == 0 && b != 0 {
                d.row_swap(i, i + 1);
                u.row_swap(i, i + 1);
                d.col_swap(i, i + 1);
                v.col_swap(i, i + 1);
                vinv.row_swap(i, i + 1);
                fixed = false;
                continue;
            }
            if a != 0 && b % a != 0 {
                // Put b beside a, then run a two-row gcd reduction.
                d.col_add(i, i + 1, 1);
                v.col_add(i, i + 1, 1);
                vinv.row_add(i + 1, i, -1);
                // Column i now holds (a, b); reduce to (gcd, 0) adjusting col i+1.
                while d.get(i + 1, i) != 0 {
                    let q = d.get(i, i) / d.get(i + 1, i);
                    if q != 0 {
                        d.row_add(i, i + 1, -q);
                        u.row_add(i, i + 1, -q);
                    }
                    d.row_swap(i, i + 1);
                    u.row_swap(i, i + 1);
                }
                // Clear the off-diagonal remnant in row i / col i+1.
                let p = d.get(i, i);
                let r = d.get(i, i + 1);
                debug_assert_eq!(r % p, 0);
                d.col_add(i + 1, i, -(r / p));
                v.col_add(i + 1, i, -(r / p));
                vinv.row_add(i, i + 1, r / p);
                if d.get(i, i) < 0 {
                    d.row_negate(i);
                    u.row_negate(i);
                }
                if d.get(i + 1, i + 1) < 0 {
                    d.row_negate(i + 1);
                    u.row_negate(i + 1);
                }
                fixed = false;
            }
        }
        if fixed {
            break;
        }
    }
    // Postconditions, checked unconditionally.
    assert!(u.mul(m).mul(v) == *d, "normal form transform drifted");
    assert!(v.mul(vinv).is_identity(), "inverse transform drifted");
    let diag: Vec<i64> = (0..n).map(|i| d.get(i, i)).collect();
    for w in diag.windows(2) {
        assert!(w[1] == 0 || (w[0] != 0 && w[1] % w[0] == 0), "divisibility chain broken");
    }
    for r in 0..d.rows() {
        for c in 0..d.cols() {
            assert!(r == c || d.get(r, c) == 0, "off-diagonal residue");
        }
    }
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`.
/// Returns only the nonzero rows: pivots positive, strictly right-stepping,
/// entries above each pivot reduced into `[0, pivot)`. This is the canonical
/// basis of the row lattice: equal lattices give byte-equal results.
pub fn hermite_normal_form(m: &IntMat) -> IntMat {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        if (r..rows).all(|i| h.get(i, c) == 0) {
            continue;
        }
        loop {
            let p = (r..rows)
                .filter(|&i| h.get(i, c) != 0)
                .min_by_key(|&i| h.get(i, c).abs())
                .expect("nonzero entry exists");
            let mut clean = true;
            for i in r..rows {
                if i == p || h.get(i, c) == 0 {
                    continue;
                }
                let q = h.get(i, c) / h.get(p, c);
                h.row_add(i, p, -q);
                clean &= h.get(i, c) == 0;
            }
            if clean {
                h.row_swap(r, p);
                break;
            }
        }
        if h.get(r, c) < 0 {
            h.row_negate(r);
        }
        let pivot = h.get(r, c);
        for i in 0..r {
            let q = h.get(i, c).div_euclid(pivot);
            if q != 0 {
                h.row_add(i, r, -q);
            }
        }
        r += 1;
    }
    debug_assert!((r..rows).all(|i| (0..cols).all(|c| h.get(i, c) == 0)));
    IntMat::from_rows(&h.row_vecs()[..r])
}

/// Basis of the left kernel `{ x : x * m = 0 }` as rows; the basis spans the
/// full (saturated) kernel lattice.
pub fn left_kernel(m: &IntMat) -> IntMat {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let rows: Vec<Vec<i64>> = (rank..m.rows()).map(|r| snf.u.row(r).to_vec()).collect();
    if rows.is_empty() {
        IntMat::zeros(0, m.rows())
    } else {
        IntMat::from_rows(&rows)
    }
}

/// One integer solution of `x * m = b`, if any.
pub fn solve_left(m: &IntMat, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(b.len(), m.cols(), "dimension mismatch in solve_left");
    let snf = smith_normal_form(m);
    let bm = IntMat::from_rows(&[b.to_vec()]);
    let bv = bm.mul(&snf.v);
    let n = m.rows().min(m.cols());
    let mut y = vec![0i64; m.rows()];
    for i in 0..m.cols() {
        let rhs = bv.get(0, i);
        let di = if i < n { snf.d.get(i, i) } else { 0 };
        if di == 0 {
            if rhs != 0 {
                return None;
            }
        } else {
            if rhs % di != 0 {
                return None;
            }
            y[i] = rhs / di;
        }
    }
    let x = IntMat::from_rows(&[y]).mul(&snf.u);
    Some(x.row(0).to_vec())
}

/// Completes a primitive full-rank-`k` matrix (rows spanning a saturated
/// rank-`k` sublattice of Z^n) to a unimodular n x n matrix whose first `k`
/// rows span the same sublattice.
pub fn unimodular_completion(w: &IntMat) -> Option<IntMat> {
    let k = w.rows();
    let snf = smith_normal_form(w);
    if snf.rank() != k || snf.diagonal().iter().any(|&d| d != 0 && d != 1) {
        return None;
    }
    // u*w*v = [I_k | 0]  =>  rows of vinv[..k] span the same lattice as w.
    Some(snf.vinv.clone())
}

/// Determinant by fraction-free (Bareiss) elimination in i128.
pub fn det(m: &IntMat) -> i64 {
    assert_eq!(m.rows(), m.cols(), "determinant of non-square matrix");
    let n = m.rows();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> =
        (0..n).map(|r| m.row(r).iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let d = sign * a[n - 1][n - 1];
    i64::try_from(d).expect("determinant exceeds i64")
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
