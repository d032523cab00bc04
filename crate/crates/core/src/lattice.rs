//! Finite-rank subgroups `H <= Z^n`: span, index, simultaneous basis, and
//! the standardizing automorphism that moves an index-k sublattice onto
//! `kZ x Z^(n-1)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::intlin::{self, IntMatrix};
use crate::{Error, Result};

/// Index of a sublattice in its ambient `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl LatticeIndex {
    pub fn as_finite(&self) -> Option<&BigInt> {
        match self {
            LatticeIndex::Finite(k) => Some(k),
            LatticeIndex::Infinite => None,
        }
    }
}

/// A rank-r subgroup of `Z^n`, stored with its canonical basis.
///
/// The basis matrix has n rows and r columns, one basis vector per column.
/// Bases are canonicalized through the Hermite normal form on construction,
/// so lattice equality is a bit-exact matrix comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    ambient_dim: usize,
    basis: IntMatrix,
}

impl Lattice {
    /// The subgroup generated by the given vectors.
    pub fn span(vectors: &[Vec<BigInt>], n: usize) -> Result<Lattice> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        if vectors.is_empty() || vectors.iter().all(|v| v.iter().all(|x| x.is_zero())) {
            return Err(Error::InvalidInput("span requires a nonzero generator".into()));
        }
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::BadVector);
        }
        let mut rows = IntMatrix::zero(vectors.len(), n);
        for (i, v) in vectors.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                rows.set(i, j, x.clone());
            }
        }
        let (h, _) = intlin::hnf(&rows);
        let basis_cols: Vec<Vec<BigInt>> = (0..h.rows())
            .filter(|&i| (0..n).any(|j| !h.entry(i, j).is_zero()))
            .map(|i| h.row(i).to_vec())
            .collect();
        let basis = IntMatrix::from_columns(&basis_cols)?;
        Ok(Lattice { ambient_dim: n, basis })
    }

    /// The lattice spanned by the columns of a basis-candidate matrix.
    pub fn from_columns(m: &IntMatrix) -> Result<Lattice> {
        let cols: Vec<Vec<BigInt>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Lattice::span(&cols, m.rows())
    }

    /// The full lattice `Z^n`.
    pub fn full(n: usize) -> Lattice {
        Lattice {
            ambient_dim: n,
            basis: IntMatrix::identity(n),
        }
    }

    /// `kZ x Z^(n-1)`.
    pub fn standard_sublattice(k: &BigInt, n: usize) -> Lattice {
        let mut entries = vec![BigInt::one(); n];
        entries[0] = k.clone();
        Lattice {
            ambient_dim: n,
            basis: IntMatrix::diagonal(&entries),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// `INFINITE` when the rank is deficient, otherwise the product of the
    /// Smith normal form diagonal of the basis matrix.
    pub fn index(&self) -> LatticeIndex {
        if self.rank() < self.ambient_dim {
            return LatticeIndex::Infinite;
        }
        let s = intlin::snf(&self.basis);
        let mut k = BigInt::one();
        for f in s.invariant_factors() {
            k *= f;
        }
        LatticeIndex::Finite(k)
    }

    /// Coordinates of `v` in the stored basis, when `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs ambient dimension {}",
                v.len(),
                self.ambient_dim
            )));
        }
        intlin::solve_integer(&self.basis, v)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        matches!(self.coordinates(v), Ok(Some(_)))
    }

    /// Basis coordinates back to an ambient vector.
    pub fn to_ambient(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.basis.mul_vec(coords)
    }

    /// A basis `y_1, ..., y_n` of `Z^n` (columns of the returned unimodular
    /// matrix) together with positive integers `a_1 | a_2 | ... | a_r` such
    /// that `a_1 y_1, ..., a_r y_r` is a basis of this lattice.
    pub fn simultaneous_basis(&self) -> (IntMatrix, Vec<BigInt>) {
        let s = intlin::snf(&self.basis);
        let y = s
            .u
            .inverse_unimodular()
            .expect("left transform of SNF is unimodular");
        let a = s.invariant_factors();
        debug_assert_eq!(a.len(), self.rank());
        // The scaled columns must regenerate the lattice exactly.
        let scaled: Vec<Vec<BigInt>> = a
            .iter()
            .enumerate()
            .map(|(i, ai)| y.column(i).iter().map(|x| x * ai).collect())
            .collect();
        let regenerated = Lattice::span(&scaled, self.ambient_dim)
            .expect("scaled simultaneous basis spans the lattice");
        assert_eq!(regenerated, *self, "simultaneous basis failed to regenerate the lattice");
        (y, a)
    }

    /// The standardizing automorphism of `Z^n`: a unimodular `sigma` with
    /// `sigma(L) = kZ x Z^(n-1)`, where `k` is the (finite, square-free)
    /// index of `L`.
    ///
    /// The construction sends `y_n` to `e_1`, `y_1` to `e_n` and `y_i` to
    /// `e_i` otherwise, which is only available when the invariant factors
    /// are `1, ..., 1, k`; that is exactly the square-free case, so other
    /// indices are rejected.
    pub fn standardize(&self) -> Result<IntMatrix> {
        let n = self.ambient_dim;
        if n < 2 {
            return Err(Error::InvalidInput("standardize requires ambient dimension > 1".into()));
        }
        let k = match self.index() {
            LatticeIndex::Finite(k) => k,
            LatticeIndex::Infinite => return Err(Error::InfiniteIndex),
        };
        if !is_squarefree(&k) {
            return Err(Error::NotSquareFree(k));
        }
        let target = Lattice::standard_sublattice(&k, n);
        if *self == target {
            return Ok(IntMatrix::identity(n));
        }
        let (y, a) = self.simultaneous_basis();
        debug_assert!(a[..n - 1].iter().all(|ai| ai.is_one()));
        debug_assert_eq!(a[n - 1], k);
        // sigma * Y = [e_n | e_2 | ... | e_(n-1) | e_1]
        let mut p = IntMatrix::zero(n, n);
        p.set(n - 1, 0, BigInt::one());
        for i in 1..n - 1 {
            p.set(i, i, BigInt::one());
        }
        p.set(0, n - 1, BigInt::one());
        let sigma = p.mul(&y.inverse_unimodular().expect("Y is unimodular"));
        // Self-check: sigma unimodular and sigma(L) = kZ x Z^(n-1) exactly.
        assert!(intlin::is_unimodular(&sigma).unwrap_or(false));
        let image = Lattice::from_columns(&sigma.mul(&self.basis))?;
        assert_eq!(image, target, "standardization self-check failed");
        Ok(sigma)
    }

    /// Image of this lattice under an ambient linear map.
    pub fn apply(&self, m: &IntMatrix) -> Result<Lattice> {
        Lattice::from_columns(&m.mul(&self.basis))
    }
}

/// True iff no prime square divides `k`.
pub fn is_squarefree(k: &BigInt) -> bool {
    let mut k = k.abs();
    if k.is_zero() {
        return false;
    }
    let mut p = BigInt::from(2u8);
    while &p * &p <= k {
        if (&k % &p).is_zero() {
            k /= &p;
            if (&k % &p).is_zero() {
                return false;
            }
        }
        p += 1u8;
    }
    true
}
