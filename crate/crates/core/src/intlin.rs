//! Exact integer and rational linear algebra.
//!
//! Hermite and Smith normal forms with unimodular transforms, fraction-free
//! determinants, and integer linear system solving. Entries are
//! arbitrary-precision integers throughout; intermediate values in normal
//! form computations can blow up well past machine words even for small
//! inputs, so nothing here ever rounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::{Error, Result};

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zero(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    /// Fixture helper; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: r, cols: c, entries }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>]) -> Result<Self> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err(Error::InvalidInput("no columns".into()));
        }
        let n = cols[0].len();
        let mut m = IntMatrix::zero(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch("ragged columns".into()));
            }
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.entry(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.entry(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.entry(i, j) + a * other.entry(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn neg(&self) -> IntMatrix {
        let mut m = self.clone();
        for e in &mut m.entries {
            *e = -std::mem::take(e);
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IntMatrix::identity(self.rows)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.entry(i, j).is_zero()))
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        if !is_unimodular(self)? {
            return Err(Error::InvalidInput("matrix is not unimodular".into()));
        }
        let inv = RatMatrix::from_int(self)
            .inverse()
            .expect("unimodular matrix is invertible");
        Ok(inv.to_int().expect("inverse of a unimodular matrix is integral"))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.entry(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// row_dst += c * row_src
    pub(crate) fn add_multiple_of_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.entry(dst, j) + c * self.entry(src, j);
            self.set(dst, j, v);
        }
    }

    /// col_dst += c * col_src
    pub(crate) fn add_multiple_of_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.entry(i, dst) + c * self.entry(i, src);
            self.set(i, dst, v);
        }
    }

    /// Applies [[s, t], [x, y]] on the left to rows (a, b).
    fn two_row_transform(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, x: &BigInt, y: &BigInt) {
        for j in 0..self.cols {
            let va = self.entry(a, j).clone();
            let vb = self.entry(b, j).clone();
            self.set(a, j, s * &va + t * &vb);
            self.set(b, j, x * &va + y * &vb);
        }
    }

    /// Applies [[s, x], [t, y]] on the right to columns (a, b).
    fn two_col_transform(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, x: &BigInt, y: &BigInt) {
        for i in 0..self.rows {
            let va = self.entry(i, a).clone();
            let vb = self.entry(i, b).clone();
            self.set(i, a, s * &va + t * &vb);
            self.set(i, b, x * &va + y * &vb);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Smith normal form `U * A * V = D` with `U`, `V` unimodular and `D`
/// diagonal, diagonal entries positive and each dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub source_rows: usize,
    pub source_cols: usize,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).take_while(|&i| !self.d.entry(i, i).is_zero()).count()
    }

    /// The nonzero diagonal entries d_1 | d_2 | ... | d_r.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.d.entry(i, i).clone()).collect()
    }
}

fn find_pivot(m: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..m.rows() {
        for j in k..m.cols() {
            let e = m.entry(i, j);
            if e.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if e.abs() < m.entry(bi, bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Computes the Smith normal form of `a`.
///
/// Pivot selection takes the entry of smallest nonzero magnitude, breaking
/// ties in (row, col) order, so the output is reproducible.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    let mut k = 0;
    while k < m.min(n) {
        let Some((pi, pj)) = find_pivot(&d, k) else { break };
        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);

        loop {
            // Clear the column below the pivot. A plain shear suffices when
            // the pivot divides the entry; otherwise a gcd transform, which
            // strictly shrinks the pivot, so the loop terminates.
            for i in k + 1..m {
                if d.entry(i, k).is_zero() {
                    continue;
                }
                let aa = d.entry(k, k).clone();
                let bb = d.entry(i, k).clone();
                let (q, rem) = bb.div_rem(&aa);
                if rem.is_zero() {
                    d.add_multiple_of_row(i, k, &(-q.clone()));
                    u.add_multiple_of_row(i, k, &(-q));
                } else {
                    let eg = aa.extended_gcd(&bb);
                    let (p, q) = (&aa / &eg.gcd, &bb / &eg.gcd);
                    d.two_row_transform(k, i, &eg.x, &eg.y, &(-q.clone()), &p);
                    u.two_row_transform(k, i, &eg.x, &eg.y, &(-q), &p);
                }
            }
            // Same for the row right of the pivot.
            for j in k + 1..n {
                if d.entry(k, j).is_zero() {
                    continue;
                }
                let aa = d.entry(k, k).clone();
                let bb = d.entry(k, j).clone();
                let (q, rem) = bb.div_rem(&aa);
                if rem.is_zero() {
                    d.add_multiple_of_col(j, k, &(-q.clone()));
                    v.add_multiple_of_col(j, k, &(-q));
                } else {
                    let eg = aa.extended_gcd(&bb);
                    let (p, q) = (&aa / &eg.gcd, &bb / &eg.gcd);
                    d.two_col_transform(k, j, &eg.x, &eg.y, &(-q.clone()), &p);
                    v.two_col_transform(k, j, &eg.x, &eg.y, &(-q), &p);
                }
            }
            // Column transforms can re-dirty the column; loop until clean.
            let col_clean = (k + 1..m).all(|i| d.entry(i, k).is_zero());
            let row_clean = (k + 1..n).all(|j| d.entry(k, j).is_zero());
            if !(col_clean && row_clean) {
                continue;
            }
            // The pivot must divide every entry of the trailing block.
            let offending = (k + 1..m)
                .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(d.entry(i, j) % d.entry(k, k)).is_zero());
            match offending {
                Some((i, _)) => {
                    d.add_multiple_of_row(k, i, &BigInt::one());
                    u.add_multiple_of_row(k, i, &BigInt::one());
                }
                None => break,
            }
        }

        if d.entry(k, k).is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
        k += 1;
    }

    SmithDecomposition {
        u,
        d,
        v,
        source_rows: m,
        source_cols: n,
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U * A = H`.
///
/// Convention: pivots are the first nonzero entry of each nonzero row,
/// strictly to the right of the pivot above, positive, with the entries
/// above each pivot reduced into `[0, pivot)`. Zero rows sit at the bottom.
/// The form is unique, so lattices of row spans compare bit-exactly.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut row = 0;

    for col in 0..n {
        if row >= m {
            break;
        }
        // Fold everything at or below `row` in this column into `row`.
        for i in row + 1..m {
            if h.entry(i, col).is_zero() {
                continue;
            }
            let aa = h.entry(row, col).clone();
            let bb = h.entry(i, col).clone();
            if !aa.is_zero() && (&bb % &aa).is_zero() {
                let q = &bb / &aa;
                h.add_multiple_of_row(i, row, &(-q.clone()));
                u.add_multiple_of_row(i, row, &(-q));
            } else {
                let eg = aa.extended_gcd(&bb);
                let (p, q) = (&aa / &eg.gcd, &bb / &eg.gcd);
                h.two_row_transform(row, i, &eg.x, &eg.y, &(-q.clone()), &p);
                u.two_row_transform(row, i, &eg.x, &eg.y, &(-q), &p);
            }
        }
        if h.entry(row, col).is_zero() {
            continue;
        }
        if h.entry(row, col).is_negative() {
            h.negate_row(row);
            u.negate_row(row);
        }
        let pivot = h.entry(row, col).clone();
        for i in 0..row {
            let q = h.entry(i, col).div_floor(&pivot);
            h.add_multiple_of_row(i, row, &(-q.clone()));
            u.add_multiple_of_row(i, row, &(-q));
        }
        row += 1;
    }

    (h, u)
}

/// Exact determinant via Bareiss fraction-free elimination.
pub fn det(a: &IntMatrix) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m.entry(k, k).is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !m.entry(i, k).is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap_rows(k, i);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m.entry(i, j) * m.entry(k, k) - m.entry(i, k) * m.entry(k, j);
                m.set(i, j, &num / &prev);
            }
        }
        for i in k + 1..n {
            m.set(i, k, BigInt::zero());
        }
        prev = m.entry(k, k).clone();
    }
    Ok(sign * m.entry(n - 1, n - 1).clone())
}

/// True iff `det(a)` is +1 or -1, i.e. `a` is an automorphism of `Z^n`.
pub fn is_unimodular(a: &IntMatrix) -> Result<bool> {
    Ok(det(a)?.abs().is_one())
}

/// Solves `A x = b` over the integers via the Smith normal form.
///
/// Returns `None` when no integer solution exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but rhs has length {}",
            a.rows(),
            b.len()
        )));
    }
    let s = snf(a);
    let c = s.u.mul_vec(b);
    let r = s.rank();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < r {
            let d = s.d.entry(i, i);
            let (q, rem) = ci.div_rem(d);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    let x = s.v.mul_vec(&y);
    debug_assert_eq!(a.mul_vec(&x), b.to_vec());
    Ok(Some(x))
}

/// Dense matrix over exact rationals; support for the few conjugation and
/// solving steps that leave the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn from_int(a: &IntMatrix) -> Self {
        RatMatrix {
            rows: a.rows(),
            cols: a.cols(),
            entries: a
                .entries
                .iter()
                .map(|e| BigRational::from_integer(e.clone()))
                .collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        RatMatrix::from_int(&IntMatrix::identity(n))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let zero = BigRational::zero();
        let mut out = RatMatrix {
            rows: self.rows,
            cols: other.cols,
            entries: vec![zero; self.rows * other.cols],
        };
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k).clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.entry(i, j) + &a * other.entry(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| !a.entry(i, k).is_zero())?;
            if pivot_row != k {
                for j in 0..n {
                    let tmp = a.entry(k, j).clone();
                    a.set(k, j, a.entry(pivot_row, j).clone());
                    a.set(pivot_row, j, tmp);
                    let tmp = inv.entry(k, j).clone();
                    inv.set(k, j, inv.entry(pivot_row, j).clone());
                    inv.set(pivot_row, j, tmp);
                }
            }
            let p = a.entry(k, k).clone();
            for j in 0..n {
                let v = a.entry(k, j) / &p;
                a.set(k, j, v);
                let v = inv.entry(k, j) / &p;
                inv.set(k, j, v);
            }
            for i in 0..n {
                if i == k || a.entry(i, k).is_zero() {
                    continue;
                }
                let f = a.entry(i, k).clone();
                for j in 0..n {
                    let v = a.entry(i, j) - &f * a.entry(k, j);
                    a.set(i, j, v);
                    let v = inv.entry(i, j) - &f * inv.entry(k, j);
                    inv.set(i, j, v);
                }
            }
        }
        Some(inv)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.to_integer()).collect(),
        })
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut rank = 0;
        for col in 0..n {
            if rank >= m {
                break;
            }
            let Some(pivot) = (rank..m).find(|&i| !a.entry(i, col).is_zero()) else {
                continue;
            };
            for j in 0..n {
                let tmp = a.entry(rank, j).clone();
                a.set(rank, j, a.entry(pivot, j).clone());
                a.set(pivot, j, tmp);
            }
            let p = a.entry(rank, col).clone();
            for i in rank + 1..m {
                if a.entry(i, col).is_zero() {
                    continue;
                }
                let f = a.entry(i, col) / &p;
                for j in 0..n {
                    let v = a.entry(i, j) - &f * a.entry(rank, j);
                    a.set(i, j, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of an integer matrix over the rationals.
pub fn rank(a: &IntMatrix) -> usize {
    RatMatrix::from_int(a).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Independent cofactor-expansion determinant, used only as an oracle.
    fn naive_det(a: &IntMatrix) -> BigInt {
        let n = a.rows();
        if n == 1 {
            return a.entry(0, 0).clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if a.entry(0, j).is_zero() {
                continue;
            }
            let mut sub = IntMatrix::zero(n - 1, n - 1);
            for i in 1..n {
                let mut jj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    sub.set(i - 1, jj, a.entry(i, k).clone());
                    jj += 1;
                }
            }
            let term = a.entry(0, j) * naive_det(&sub);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// gcd of all k x k minors; 0 when every minor vanishes.
    fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in subsets(n, k - 1) {
                    if rest.iter().all(|&x| x > first) {
                        rest.insert(0, first);
                        out.push(rest);
                    }
                }
            }
            out.retain(|s| s.len() == k);
            out
        }
        let mut g = BigInt::zero();
        for ri in subsets(a.rows(), k) {
            for ci in subsets(a.cols(), k) {
                let mut sub = IntMatrix::zero(k, k);
                for (si, &i) in ri.iter().enumerate() {
                    for (sj, &j) in ci.iter().enumerate() {
                        sub.set(si, sj, a.entry(i, j).clone());
                    }
                }
                g = g.gcd(&naive_det(&sub));
            }
        }
        g
    }

    fn check_snf(a: &IntMatrix) {
        let s = snf(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U*A*V must equal D");
        assert!(is_unimodular(&s.u).unwrap());
        assert!(is_unimodular(&s.v).unwrap());
        assert!(s.d.is_diagonal());
        let factors = s.invariant_factors();
        for f in &factors {
            assert!(f.is_positive());
        }
        for w in factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
        }
        // trailing diagonal entries are zero
        for i in s.rank()..s.d.rows().min(s.d.cols()) {
            assert!(s.d.entry(i, i).is_zero());
        }
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(2);
        let s = snf(&a);
        assert!(s.u.is_identity());
        assert!(s.d.is_identity());
        assert!(s.v.is_identity());
    }

    #[test]
    fn snf_2x2_example() {
        // d1 = gcd of entries = 2, d1*d2 = |det| = 8
        let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        check_snf(&a);
        let s = snf(&a);
        assert_eq!(s.invariant_factors(), vec![bi(2), bi(4)]);
    }

    #[test]
    fn snf_rectangular_example() {
        // gcd of entries 1; gcd of 2x2 minors 2
        let a = IntMatrix::from_i64(&[&[2, 0, 2], &[0, 1, 1]]);
        check_snf(&a);
        let s = snf(&a);
        assert_eq!(s.invariant_factors(), vec![bi(1), bi(2)]);
        assert_eq!(s.d.rows(), 2);
        assert_eq!(s.d.cols(), 3);
    }

    #[test]
    fn snf_matches_minor_gcd_oracle() {
        let fixtures: Vec<IntMatrix> = vec![
            IntMatrix::from_i64(&[&[2, 4], &[6, 8]]),
            IntMatrix::from_i64(&[&[2, 0, 2], &[0, 1, 1]]),
            IntMatrix::from_i64(&[&[4, 0], &[0, 6]]),
            IntMatrix::from_i64(&[&[0, 0], &[0, 0]]),
            IntMatrix::from_i64(&[&[6, 10, 15], &[10, 15, 6], &[15, 6, 10]]),
            IntMatrix::from_i64(&[&[1, 2, 3, 4], &[5, 6, 7, 8], &[9, 10, 11, 12], &[13, 14, 15, 17]]),
        ];
        for a in &fixtures {
            check_snf(a);
            let s = snf(a);
            let factors = s.invariant_factors();
            let mut prod = BigInt::one();
            for (k, f) in factors.iter().enumerate() {
                prod *= f;
                assert_eq!(prod, minor_gcd(a, k + 1), "d_1..d_k must equal the k-minor gcd");
            }
            assert_eq!(factors.len(), rank(a));
        }
    }

    #[test]
    fn hnf_identity_and_swap() {
        let (h, u) = hnf(&IntMatrix::identity(3));
        assert!(h.is_identity());
        assert!(u.is_identity());

        let a = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let (h, u) = hnf(&a);
        assert!(h.is_identity());
        assert_eq!(u.mul(&a), h);
        assert!(is_unimodular(&u).unwrap());
    }

    #[test]
    fn hnf_column_gcd() {
        let a = IntMatrix::from_i64(&[&[2], &[4]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, IntMatrix::from_i64(&[&[2], &[0]]));
        assert_eq!(u.mul(&a), h);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&IntMatrix::identity(3)).unwrap(), bi(1));
        assert_eq!(det(&IntMatrix::from_i64(&[&[0, -1], &[1, -1]])).unwrap(), bi(1));
        assert_eq!(det(&IntMatrix::from_i64(&[&[2, 0], &[0, 1]])).unwrap(), bi(2));
        assert!(det(&IntMatrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]])).is_err());
    }

    #[test]
    fn unimodular_examples() {
        assert!(is_unimodular(&IntMatrix::identity(4)).unwrap());
        assert!(!is_unimodular(&IntMatrix::from_i64(&[&[2, 0], &[0, 1]])).unwrap());
        assert!(is_unimodular(&IntMatrix::from_i64(&[&[0, -1], &[1, -1]])).unwrap());
    }

    #[test]
    fn solve_examples() {
        let i2 = IntMatrix::identity(2);
        assert_eq!(
            solve_integer(&i2, &[bi(3), bi(5)]).unwrap(),
            Some(vec![bi(3), bi(5)])
        );
        let d = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        assert_eq!(solve_integer(&d, &[bi(3), bi(1)]).unwrap(), None);
        assert_eq!(
            solve_integer(&d, &[bi(4), bi(7)]).unwrap(),
            Some(vec![bi(2), bi(7)])
        );
        assert!(solve_integer(&d, &[bi(1)]).is_err());
    }

    /// Membership of b in the column lattice of A, decided by reducing b
    /// against the HNF of the transposed matrix. Independent of the SNF
    /// route used by solve_integer.
    fn in_column_lattice_via_hnf(a: &IntMatrix, b: &[BigInt]) -> bool {
        let (h, _) = hnf(&a.transpose());
        let mut v: Vec<BigInt> = b.to_vec();
        for i in 0..h.rows() {
            let Some(p) = (0..h.cols()).find(|&j| !h.entry(i, j).is_zero()) else {
                break;
            };
            let q = v[p].div_floor(h.entry(i, p));
            for j in 0..h.cols() {
                v[j] = &v[j] - &q * h.entry(i, j);
            }
        }
        v.iter().all(|x| x.is_zero())
    }

    proptest! {
        #[test]
        fn snf_reconstructs_and_divides(rows in 1usize..4, cols in 1usize..4, seed in proptest::collection::vec(-9i64..10, 16)) {
            let entries: Vec<BigInt> = seed.iter().take(rows * cols).map(|&x| bi(x)).collect();
            let a = IntMatrix::new(rows, cols, entries).unwrap();
            check_snf(&a);
        }

        #[test]
        fn hnf_is_idempotent(rows in 1usize..4, cols in 1usize..4, seed in proptest::collection::vec(-9i64..10, 16)) {
            let entries: Vec<BigInt> = seed.iter().take(rows * cols).map(|&x| bi(x)).collect();
            let a = IntMatrix::new(rows, cols, entries).unwrap();
            let (h, u) = hnf(&a);
            prop_assert_eq!(u.mul(&a), h.clone());
            prop_assert!(is_unimodular(&u).unwrap());
            let (h2, u2) = hnf(&h);
            prop_assert_eq!(h2, h);
            prop_assert!(u2.is_identity());
        }

        #[test]
        fn solve_agrees_with_hnf_membership(n in 1usize..4, seed in proptest::collection::vec(-6i64..7, 12), rhs in proptest::collection::vec(-9i64..10, 3)) {
            let entries: Vec<BigInt> = seed.iter().take(n * n).map(|&x| bi(x)).collect();
            let a = IntMatrix::new(n, n, entries).unwrap();
            let b: Vec<BigInt> = rhs.iter().take(n).map(|&x| bi(x)).collect();
            let solved = solve_integer(&a, &b).unwrap();
            prop_assert_eq!(solved.is_some(), in_column_lattice_via_hnf(&a, &b));
            if let Some(x) = solved {
                prop_assert_eq!(a.mul_vec(&x), b);
            }
        }

        #[test]
        fn bareiss_matches_cofactor_det(n in 1usize..5, seed in proptest::collection::vec(-9i64..10, 16)) {
            let entries: Vec<BigInt> = seed.iter().take(n * n).map(|&x| bi(x)).collect();
            let a = IntMatrix::new(n, n, entries).unwrap();
            prop_assert_eq!(det(&a).unwrap(), naive_det(&a));
        }
    }
}
