//! The finite setwise stabilizer of a connection set inside `Aut(H)`,
//! extendability of `H`-automorphisms to `Z^n`, congruence-quotient images
//! mod k, and the product-condition decision.
//!
//! Everything works in basis coordinates: an automorphism of a rank-r
//! lattice is an r x r unimodular matrix acting on the stored (canonical)
//! basis. Quotient groups mod k are explicit element sets; k and n are
//! small by design.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cayley::ConnectionSet;
use crate::intlin::{self, IntMatrix, RatMatrix};
use crate::lattice::{is_squarefree, Lattice, LatticeIndex};
use crate::{Error, Result};

/// An automorphism of a lattice H, as a unimodular matrix acting on the
/// stored basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HAut {
    matrix: IntMatrix,
}

impl HAut {
    pub fn new(matrix: IntMatrix) -> Result<HAut> {
        if !intlin::is_unimodular(&matrix)? {
            return Err(Error::InvalidInput(
                "lattice automorphisms must be unimodular".into(),
            ));
        }
        Ok(HAut { matrix })
    }

    pub fn identity(r: usize) -> HAut {
        HAut {
            matrix: IntMatrix::identity(r),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn compose(&self, other: &HAut) -> HAut {
        HAut {
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn inverse(&self) -> HAut {
        HAut {
            matrix: self
                .matrix
                .inverse_unimodular()
                .expect("unimodular by construction"),
        }
    }
}

/// The finite group `Stab_{Aut(H)}(S)` as an explicit, canonically sorted
/// element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    lattice: Lattice,
    elements: Vec<HAut>,
}

impl SymmetryGroup {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn elements(&self) -> &[HAut] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, t: &HAut) -> bool {
        self.elements.binary_search(t).is_ok()
    }

    fn assert_group_closed(&self) {
        assert!(self.contains(&HAut::identity(self.lattice.rank())));
        for a in &self.elements {
            assert!(self.contains(&a.inverse()), "stabilizer not closed under inverse");
            for b in &self.elements {
                assert!(
                    self.contains(&a.compose(b)),
                    "stabilizer not closed under composition"
                );
            }
        }
    }
}

/// Coordinates of every vector of `s` in the stored basis of `l`.
///
/// Errors when `span(S)` is not exactly `l`.
fn coords_in(l: &Lattice, s: &ConnectionSet) -> Result<Vec<Vec<BigInt>>> {
    if s.span_lattice() != *l {
        return Err(Error::SpanMismatch);
    }
    s.vectors()
        .iter()
        .map(|v| l.coordinates(v)?.ok_or(Error::SpanMismatch))
        .collect()
}

fn is_negation_closed(x: &BTreeSet<Vec<BigInt>>) -> bool {
    x.iter()
        .all(|v| x.contains(&v.iter().map(|a| -a.clone()).collect::<Vec<_>>()))
}

/// Greedy maximal rationally-independent subset, in canonical order.
fn rational_basis_indices(x: &[Vec<BigInt>], r: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for (i, _) in x.iter().enumerate() {
        if chosen.len() == r {
            break;
        }
        let mut trial: Vec<Vec<BigInt>> = chosen.iter().map(|&c| x[c].clone()).collect();
        trial.push(x[i].clone());
        let m = IntMatrix::from_columns(&trial).expect("nonempty trial");
        if intlin::rank(&m) == trial.len() {
            chosen.push(i);
        }
    }
    chosen
}

fn injective_tuples(first: usize, len: usize, depth: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: Vec<usize>, len: usize, depth: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == depth {
            out.push(prefix);
            return;
        }
        for i in 0..len {
            if prefix.contains(&i) {
                continue;
            }
            let mut next = prefix.clone();
            next.push(i);
            extend(next, len, depth, out);
        }
    }
    let mut out = Vec::new();
    extend(vec![first], len, depth, &mut out);
    out
}

fn enumerate_branches<F>(firsts: Vec<usize>, f: F, parallel: bool) -> Vec<IntMatrix>
where
    F: Fn(usize) -> Vec<IntMatrix> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return firsts.into_par_iter().flat_map_iter(|i| f(i)).collect();
    }
    let _ = parallel;
    firsts.into_iter().flat_map(f).collect()
}

/// All `tau` in `GL(r, Z)` with `tau(x) = x2` setwise, canonically sorted.
///
/// Both coordinate sets must span `Q^r`. A candidate is determined by the
/// images of a rationally-independent subset of `x`; it is kept iff it is
/// integral, unimodular and permutes the sets exactly. Completeness holds
/// because the sets generate the lattice, so a transporter is pinned down
/// by those images. When both sets are negation-closed only half of the
/// first images are enumerated and the found maps are closed under global
/// negation.
pub(crate) fn linear_transporters(
    x: &[Vec<BigInt>],
    x2: &[Vec<BigInt>],
    parallel: bool,
) -> Vec<IntMatrix> {
    if x.len() != x2.len() || x.is_empty() {
        return Vec::new();
    }
    let r = x[0].len();
    let basis_idx = rational_basis_indices(x, r);
    assert_eq!(basis_idx.len(), r, "coordinates of a generating set span Q^r");
    let basis_cols: Vec<Vec<BigInt>> = basis_idx.iter().map(|&i| x[i].clone()).collect();
    let b = IntMatrix::from_columns(&basis_cols).expect("basis nonempty");
    let b_inv = RatMatrix::from_int(&b).inverse().expect("independent columns");

    let x_set: BTreeSet<Vec<BigInt>> = x.iter().cloned().collect();
    let x2_set: BTreeSet<Vec<BigInt>> = x2.iter().cloned().collect();
    let symmetric = is_negation_closed(&x_set) && is_negation_closed(&x2_set);

    let firsts: Vec<usize> = if symmetric {
        (0..x2.len())
            .filter(|&i| {
                let neg: Vec<BigInt> = x2[i].iter().map(|a| -a.clone()).collect();
                x2[i] > neg
            })
            .collect()
    } else {
        (0..x2.len()).collect()
    };

    let check = |images: &[usize]| -> Option<IntMatrix> {
        let cols: Vec<Vec<BigInt>> = images.iter().map(|&i| x2[i].clone()).collect();
        let p = IntMatrix::from_columns(&cols).expect("image tuple nonempty");
        let tau = RatMatrix::from_int(&p).mul(&b_inv).to_int()?;
        if !intlin::is_unimodular(&tau).ok()? {
            return None;
        }
        let mapped: BTreeSet<Vec<BigInt>> = x.iter().map(|v| tau.mul_vec(v)).collect();
        (mapped == x2_set).then_some(tau)
    };

    let mut found = enumerate_branches(
        firsts,
        |first| {
            if crate::cancel::is_requested() {
                return Vec::new();
            }
            injective_tuples(first, x2.len(), r)
                .iter()
                .filter_map(|t| check(t))
                .collect()
        },
        parallel,
    );
    if symmetric {
        let negated: Vec<IntMatrix> = found.iter().map(|t| t.neg()).collect();
        found.extend(negated);
    }
    found.sort();
    found.dedup();
    found
}

fn parallel_default() -> bool {
    cfg!(feature = "parallel")
}

fn stabilizer_with(l: &Lattice, s: &ConnectionSet, parallel: bool) -> Result<SymmetryGroup> {
    let x = coords_in(l, s)?;
    let found = linear_transporters(&x, &x, parallel);
    crate::cancel::checkpoint()?;
    let elements: Vec<HAut> = found.into_iter().map(|m| HAut { matrix: m }).collect();
    let group = SymmetryGroup {
        lattice: l.clone(),
        elements,
    };
    group.assert_group_closed();
    Ok(group)
}

/// The complete finite group of automorphisms of `L` fixing `S` setwise.
pub fn set_stabilizer(l: &Lattice, s: &ConnectionSet) -> Result<SymmetryGroup> {
    stabilizer_with(l, s, parallel_default())
}

/// Sequential variant of [`set_stabilizer`]; the code path used when the
/// `parallel` feature is off, kept callable for the comparison benchmarks.
pub fn set_stabilizer_seq(l: &Lattice, s: &ConnectionSet) -> Result<SymmetryGroup> {
    stabilizer_with(l, s, false)
}

/// Some `tau` in `Aut(L)` with `tau(S) = S2`, or `None`.
pub fn transporter(l: &Lattice, s: &ConnectionSet, s2: &ConnectionSet) -> Result<Option<HAut>> {
    let x = coords_in(l, s)?;
    let x2 = coords_in(l, s2)?;
    if x.len() != x2.len() {
        return Ok(None);
    }
    let mut all = linear_transporters(&x, &x2, parallel_default());
    crate::cancel::checkpoint()?;
    if all.is_empty() {
        return Ok(None);
    }
    // Prefer the identity when it qualifies, else the canonical minimum.
    let id = IntMatrix::identity(x[0].len());
    let pick = if all.contains(&id) { id } else { all.remove(0) };
    Ok(Some(HAut { matrix: pick }))
}

/// All lattice isomorphisms `H -> H2` carrying one coordinate set onto the
/// other; the cross-lattice kernel behind the isomorphism searches.
pub(crate) fn cross_transporters(
    h: &Lattice,
    s: &ConnectionSet,
    h2: &Lattice,
    s2: &ConnectionSet,
) -> Result<Vec<IntMatrix>> {
    let x = coords_in(h, s)?;
    let x2 = coords_in(h2, s2)?;
    if x.len() != x2.len() {
        return Ok(Vec::new());
    }
    let found = linear_transporters(&x, &x2, parallel_default());
    crate::cancel::checkpoint()?;
    Ok(found)
}

/// Extends a lattice isomorphism `tau: H -> H2` (in stored-basis
/// coordinates) to an automorphism of the ambient `Z^n`, when possible.
///
/// Via the simultaneous bases `(Y, a)` of `H` and `(Y2, a2)` of `H2`: any
/// extension is forced on the first r ambient basis vectors, scaling as
/// `T[j][i] = tau'[j][i] * a2[j] / a[i]`, and is free on a complement; so
/// an extension exists iff `T` is integral and unimodular, in which case
/// `M = Y2 * diag(T, I) * Y^-1` is one. Failure is a proof that none
/// exists.
pub fn extends_between(h: &Lattice, h2: &Lattice, tau: &IntMatrix) -> Option<IntMatrix> {
    let n = h.ambient_dim();
    let r = h.rank();
    if h2.ambient_dim() != n || h2.rank() != r {
        return None;
    }
    let (y, a) = h.simultaneous_basis();
    let (y2, a2) = h2.simultaneous_basis();

    let scaled_basis = |y: &IntMatrix, a: &[BigInt]| -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = a
            .iter()
            .enumerate()
            .map(|(i, ai)| y.column(i).iter().map(|v| v * ai).collect())
            .collect();
        IntMatrix::from_columns(&cols).expect("rank >= 1")
    };
    let sb = scaled_basis(&y, &a);
    let sb2 = scaled_basis(&y2, &a2);
    // Stored basis expressed in the scaled simultaneous basis.
    let change = |sb: &IntMatrix, basis: &IntMatrix| -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = (0..basis.cols())
            .map(|j| {
                intlin::solve_integer(sb, &basis.column(j))
                    .expect("dimensions agree")
                    .expect("stored basis lies in the lattice")
            })
            .collect();
        IntMatrix::from_columns(&cols).expect("rank >= 1")
    };
    let c = change(&sb, h.basis());
    let c2 = change(&sb2, h2.basis());
    let tau_sim = c2.mul(tau).mul(&c.inverse_unimodular().ok()?);

    // T = diag(a2) * tau_sim * diag(a)^-1, entrywise exact division.
    let mut t = IntMatrix::zero(r, r);
    for j in 0..r {
        for i in 0..r {
            let num = tau_sim.entry(j, i) * &a2[j];
            let (q, rem) = num.div_rem(&a[i]);
            if !rem.is_zero() {
                return None;
            }
            t.set(j, i, q);
        }
    }
    if !intlin::is_unimodular(&t).ok()? {
        return None;
    }
    let mut block = IntMatrix::identity(n);
    for i in 0..r {
        for j in 0..r {
            block.set(i, j, t.entry(i, j).clone());
        }
    }
    let m = y2.mul(&block).mul(&y.inverse_unimodular().ok()?);
    // The extension must restrict to tau on the stored basis.
    let lhs = m.mul(h.basis());
    let rhs = h2.basis().mul(tau);
    if lhs != rhs || !intlin::is_unimodular(&m).unwrap_or(false) {
        return None;
    }
    Some(m)
}

/// The ambient matrix extending `tau` in `Aut(L)`, or `None` when `tau`
/// does not extend to `Z^n`. For full-rank lattices this is exactly the
/// integrality-and-unimodularity check of `B * tau * B^-1`.
pub fn extends_to_ambient(l: &Lattice, tau: &HAut) -> Option<IntMatrix> {
    extends_between(l, l, tau.matrix())
}

/// Square matrix over `Z_k`, entries reduced to `[0, k)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModMatrix {
    n: usize,
    k: u64,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn identity(n: usize, k: u64) -> ModMatrix {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1 % k;
        }
        ModMatrix { n, k, entries }
    }

    pub fn from_entries(n: usize, k: u64, raw: &[i64]) -> ModMatrix {
        assert_eq!(raw.len(), n * n);
        let kk = k as i64;
        ModMatrix {
            n,
            k,
            entries: raw.iter().map(|&x| x.rem_euclid(kk) as u64).collect(),
        }
    }

    pub fn reduce(m: &IntMatrix, k: u64) -> ModMatrix {
        assert!(m.is_square());
        let n = m.rows();
        let kb = BigInt::from(k);
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let r = ((m.entry(i, j) % &kb) + &kb) % &kb;
                r.to_u64().expect("reduced residue fits u64")
            })
            .collect();
        ModMatrix { n, k, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.k
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.n, other.n);
        assert_eq!(self.k, other.k);
        let n = self.n;
        let k = self.k as u128;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for l in 0..n {
                    acc = (acc + self.entry(i, l) as u128 * other.entry(l, j) as u128) % k;
                }
                entries[i * n + j] = acc as u64;
            }
        }
        ModMatrix {
            n,
            k: self.k,
            entries,
        }
    }

    pub fn lift_naive(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, BigInt::from(self.entry(i, j)));
            }
        }
        m
    }

    pub fn det(&self) -> u64 {
        let d = intlin::det(&self.lift_naive()).expect("square");
        let kb = BigInt::from(self.k);
        ((d % &kb + &kb) % &kb).to_u64().expect("residue fits")
    }

    pub fn has_unit_pm_det(&self) -> bool {
        let d = self.det();
        d == 1 % self.k || d == (self.k - 1) % self.k
    }

    fn swap_rows_mod(&mut self, a: usize, b: usize) {
        for j in 0..self.n {
            self.entries.swap(a * self.n + j, b * self.n + j);
        }
    }
}

/// An explicit subgroup of `{M in GL(n, Z_k) : det = +-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGroup {
    pub n: usize,
    pub k: u64,
    pub elements: BTreeSet<ModMatrix>,
}

impl QuotientGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &ModMatrix) -> bool {
        self.elements.contains(m)
    }
}

fn mod_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        mod_gcd(b, a % b)
    }
}

fn mod_inv(a: u64, k: u64) -> Option<u64> {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (k as i128, (a % k) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(k as i128) as u64)
}

fn units(k: u64) -> Vec<u64> {
    (1..k).filter(|&u| mod_gcd(u, k) == 1).collect()
}

fn prime_factors(k: u64) -> Vec<u64> {
    let mut k = k;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= k {
        if k % p == 0 {
            out.push(p);
            while k % p == 0 {
                k /= p;
            }
        }
        p += 1;
    }
    if k > 1 {
        out.push(k);
    }
    out
}

/// `|{M in GL(n, Z_k) : det = +-1}|` for square-free k, via CRT over the
/// prime factors: the product of `|SL(n, F_p)|`, doubled when `-1 != 1`.
pub fn quotient_order(n: usize, k: u64) -> BigInt {
    let mut total = BigInt::one();
    for p in prime_factors(k) {
        let pb = BigInt::from(p);
        let mut sl = pb.pow((n * (n - 1) / 2) as u32);
        for i in 2..=n {
            sl *= pb.pow(i as u32) - 1;
        }
        total *= sl;
    }
    if k > 2 {
        total *= 2;
    }
    total
}

fn close_under_multiplication(gens: Vec<ModMatrix>, n: usize, k: u64) -> BTreeSet<ModMatrix> {
    let mut elements: BTreeSet<ModMatrix> = BTreeSet::new();
    elements.insert(ModMatrix::identity(n, k));
    let mut frontier: Vec<ModMatrix> = gens;
    while let Some(m) = frontier.pop() {
        if !elements.insert(m.clone()) {
            continue;
        }
        let snapshot: Vec<ModMatrix> = elements.iter().cloned().collect();
        for e in snapshot {
            frontier.push(e.mul(&m));
            frontier.push(m.mul(&e));
        }
    }
    elements
}

/// Generators for the mod-k image of the extendable group in standardized
/// coordinates. Every matrix here is the reduction of an explicit integer
/// matrix with determinant +-1 whose first column is `(unit, 0, ..., 0)`
/// mod k, so the generated subgroup is sound by construction.
fn extendable_image_generators(n: usize, k: u64) -> Vec<ModMatrix> {
    let mut gens: Vec<ModMatrix> = Vec::new();

    // E_{1j}(1) for j >= 2, and E_{ij}(1) for i, j >= 2 with i != j.
    for i in 0..n {
        for j in 1..n {
            if i == j {
                continue;
            }
            let mut e = IntMatrix::identity(n);
            e.set(i, j, BigInt::one());
            gens.push(ModMatrix::reduce(&e, k));
        }
    }
    // Sign flips.
    for i in 0..n {
        let mut d = IntMatrix::identity(n);
        d.set(i, i, BigInt::from(-1));
        gens.push(ModMatrix::reduce(&d, k));
    }
    // Adjacent transpositions of coordinates 2..n.
    for i in 1..n.saturating_sub(1) {
        let mut p = IntMatrix::zero(n, n);
        for l in 0..n {
            if l == i {
                p.set(l, i + 1, BigInt::one());
            } else if l == i + 1 {
                p.set(l, i, BigInt::one());
            } else {
                p.set(l, l, BigInt::one());
            }
        }
        gens.push(ModMatrix::reduce(&p, k));
    }
    // Unit blocks [[u, -y], [k, x]] with u*x + k*y = 1 at coordinates
    // (1, 2); they reduce to upper-triangular elements carrying an
    // arbitrary unit in the corner, which the elementary family misses
    // whenever Z_k has units other than +-1.
    for u in units(k) {
        let ub = BigInt::from(u);
        let eg = ub.extended_gcd(&BigInt::from(k));
        debug_assert!(eg.gcd.is_one());
        let mut m = IntMatrix::identity(n);
        m.set(0, 0, ub);
        m.set(0, 1, -eg.y);
        m.set(1, 0, BigInt::from(k));
        m.set(1, 1, eg.x);
        debug_assert!(intlin::is_unimodular(&m).unwrap());
        gens.push(ModMatrix::reduce(&m, k));
    }
    gens
}

/// The congruence-described set `{M : det = +-1, M[i][0] = 0 for i >= 1}`,
/// enumerated directly. This is the independent route the generated image
/// is compared against.
pub fn described_congruence_subgroup(n: usize, k: u64) -> Result<BTreeSet<ModMatrix>> {
    if n < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    let cells = (n - 1) * (n - 1) + (n - 1);
    let total = (k as u128).checked_pow(cells as u32);
    if total.is_none() || total.unwrap() > 20_000_000 {
        return Err(Error::ScaleExceeded(format!(
            "direct congruence enumeration for n={n}, k={k} is too large"
        )));
    }
    let mut out = BTreeSet::new();
    let blocks = enumerate_matrices(n - 1, k);
    let rows = enumerate_tuples(n - 1, k);
    for u in units(k) {
        let uinv = mod_inv(u, k).expect("unit");
        let want_pos = uinv % k;
        let want_neg = (k - uinv % k) % k;
        for b in &blocks {
            let db = b.det();
            if db != want_pos && db != want_neg {
                continue;
            }
            for w in &rows {
                let mut entries = vec![0u64; n * n];
                entries[0] = u;
                for (j, &wj) in w.iter().enumerate() {
                    entries[j + 1] = wj;
                }
                for i in 0..n - 1 {
                    for j in 0..n - 1 {
                        entries[(i + 1) * n + (j + 1)] = b.entry(i, j);
                    }
                }
                out.insert(ModMatrix { n, k, entries });
            }
        }
    }
    Ok(out)
}

fn enumerate_tuples(len: usize, k: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * k as usize);
        for t in &out {
            for v in 0..k {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn enumerate_matrices(n: usize, k: u64) -> Vec<ModMatrix> {
    assert!(n >= 1);
    enumerate_tuples(n * n, k)
        .into_iter()
        .map(|entries| ModMatrix { n, k, entries })
        .collect()
}

/// Result of computing the mod-k image of the extendable group.
#[derive(Clone, Debug)]
pub struct CongruenceImage {
    pub group: QuotientGroup,
    /// Set when the generated subgroup could not be confirmed equal to the
    /// congruence-described set; the generated (smaller, sound) subgroup is
    /// the one returned.
    pub uncertain: bool,
}

/// The image in `GL(n, Z_k)` of the ambient-extendable automorphisms in
/// standardized coordinates.
///
/// Computed by subgroup generation from reductions of explicit integer
/// extendable matrices, then cross-checked against the congruence
/// description `{M : det = +-1, M[i][0] = 0 mod k for i >= 1}`. A mismatch
/// flags the result as uncertain instead of trusting either side.
pub fn congruence_image(n: usize, k: u64) -> Result<CongruenceImage> {
    if n < 2 {
        return Err(Error::InvalidInput("congruence image needs n >= 2".into()));
    }
    if k < 2 || !is_squarefree(&BigInt::from(k)) {
        return Err(Error::InvalidModulus(BigInt::from(k)));
    }
    let gens = extendable_image_generators(n, k);
    let elements = close_under_multiplication(gens, n, k);
    let uncertain = match described_congruence_subgroup(n, k) {
        Ok(described) => elements != described,
        // Too large to compare directly: cannot certify equality.
        Err(_) => true,
    };
    Ok(CongruenceImage {
        group: QuotientGroup { n, k, elements },
        uncertain,
    })
}

/// Counts backing a product-condition verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageCertificate {
    pub k: BigInt,
    pub card_extendable_image: BigInt,
    pub card_stabilizer_image: BigInt,
    pub card_intersection: BigInt,
    pub card_quotient: BigInt,
}

/// Outcome of the product-condition decision.
#[derive(Clone, Debug)]
pub struct ProductDecision {
    pub holds: bool,
    pub certificate: CoverageCertificate,
    /// On failure, a canonical element of the quotient not covered by the
    /// product of the two images.
    pub uncovered: Option<ModMatrix>,
    pub uncertain: bool,
}

/// Stabilizer elements rewritten in the standardized H-basis
/// `{k e_1, e_2, ..., e_n}` after applying the standardizing automorphism.
pub fn stabilizer_in_standard_coords(
    l: &Lattice,
    stab: &SymmetryGroup,
    k: &BigInt,
) -> Result<Vec<IntMatrix>> {
    let n = l.ambient_dim();
    let sigma = l.standardize()?;
    let sigma_b = sigma.mul(l.basis());
    // C = B_std^-1 * sigma * B: divide the first row by k, exactly.
    let mut c = sigma_b.clone();
    for j in 0..n {
        let (q, rem) = c.entry(0, j).div_rem(k);
        assert!(rem.is_zero(), "standardized image must lie in kZ x Z^(n-1)");
        c.set(0, j, q);
    }
    let c_inv = c.inverse_unimodular()?;
    Ok(stab
        .elements()
        .iter()
        .map(|t| c.mul(t.matrix()).mul(&c_inv))
        .collect())
}

/// Decides `Aut(H) = Aut(H)_{Z^n} . Stab_{Aut(H)}(S)` by reduction mod k.
///
/// The principal congruence kernel is contained in the extendable side and
/// is normal, so the product equation descends to and lifts from the
/// quotient: it holds iff `|A| * |B| / |A n B| = |Q|` between the two
/// images.
pub fn product_condition(l: &Lattice, s: &ConnectionSet) -> Result<ProductDecision> {
    let stab = set_stabilizer(l, s)?;
    product_condition_with_stabilizer(l, s, &stab)
}

pub fn product_condition_with_stabilizer(
    l: &Lattice,
    s: &ConnectionSet,
    stab: &SymmetryGroup,
) -> Result<ProductDecision> {
    if s.span_lattice() != *l {
        return Err(Error::SpanMismatch);
    }
    let n = l.ambient_dim();
    let k = match l.index() {
        LatticeIndex::Finite(k) => k,
        LatticeIndex::Infinite => return Err(Error::InfiniteIndex),
    };
    if k.is_one() {
        // Aut(H)_{Z^n} = Aut(H): trivially true, no quotient work.
        let one = BigInt::one();
        return Ok(ProductDecision {
            holds: true,
            certificate: CoverageCertificate {
                k,
                card_extendable_image: one.clone(),
                card_stabilizer_image: one.clone(),
                card_intersection: one.clone(),
                card_quotient: one,
            },
            uncovered: None,
            uncertain: false,
        });
    }
    if !is_squarefree(&k) {
        return Err(Error::NotSquareFree(k));
    }
    if n < 2 {
        return Err(Error::InvalidInput("product condition needs n >= 2".into()));
    }
    let k_u64: u64 = k
        .to_u64()
        .ok_or_else(|| Error::ScaleExceeded("index too large for explicit quotient work".into()))?;

    let std_elems = stabilizer_in_standard_coords(l, stab, &k)?;
    let b_bar: BTreeSet<ModMatrix> = std_elems
        .iter()
        .map(|m| ModMatrix::reduce(m, k_u64))
        .collect();
    let image = congruence_image(n, k_u64)?;
    let a_bar = &image.group.elements;

    let card_a = BigInt::from(a_bar.len());
    let card_b = BigInt::from(b_bar.len());
    let card_inter = BigInt::from(a_bar.intersection(&b_bar).count());
    let card_q = quotient_order(n, k_u64);
    let product_size = &card_a * &card_b / &card_inter;
    let holds = product_size == card_q;

    let uncovered = if holds {
        None
    } else {
        Some(first_uncovered(a_bar, &b_bar, n, k_u64)?)
    };

    Ok(ProductDecision {
        holds,
        certificate: CoverageCertificate {
            k,
            card_extendable_image: card_a,
            card_stabilizer_image: card_b,
            card_intersection: card_inter,
            card_quotient: card_q,
        },
        uncovered,
        uncertain: image.uncertain,
    })
}

/// Canonical smallest element of the quotient outside the product `A * B`.
fn first_uncovered(
    a_bar: &BTreeSet<ModMatrix>,
    b_bar: &BTreeSet<ModMatrix>,
    n: usize,
    k: u64,
) -> Result<ModMatrix> {
    let mut product: BTreeSet<ModMatrix> = BTreeSet::new();
    for a in a_bar {
        for b in b_bar {
            product.insert(a.mul(b));
        }
    }
    let total = (k as u128).checked_pow((n * n) as u32);
    if total.is_none() || total.unwrap() > 20_000_000 {
        return Err(Error::ScaleExceeded("quotient enumeration too large".into()));
    }
    enumerate_matrices(n, k)
        .into_iter()
        .find(|m| m.has_unit_pm_det() && !product.contains(m))
        .ok_or_else(|| Error::InvalidInput("product covers the quotient; nothing uncovered".into()))
}

/// Lifts a matrix over `Z_k` with determinant `+-1 mod k` to an integer
/// matrix with determinant exactly `+-1` in the same residue class.
///
/// The residue matrix is reduced to `diag(1, ..., 1, +-1)` using only row
/// and column operations that are reductions of integer unimodular
/// operations; unwinding the integer transforms yields the lift.
pub fn lift_unimodular(m: &ModMatrix) -> Result<IntMatrix> {
    let n = m.n();
    let k = m.modulus();
    if !m.has_unit_pm_det() {
        return Err(Error::InvalidInput("determinant is not +-1 mod k".into()));
    }
    let mut w = m.clone();
    let mut l_acc = IntMatrix::identity(n);
    let mut r_acc = IntMatrix::identity(n);

    fn row_add(w: &mut ModMatrix, l: &mut IntMatrix, dst: usize, src: usize, t: i128) {
        let n = w.n;
        let kk = w.k as i128;
        for j in 0..n {
            let v = (w.entry(dst, j) as i128 + t * w.entry(src, j) as i128).rem_euclid(kk);
            w.entries[dst * n + j] = v as u64;
        }
        l.add_multiple_of_row(dst, src, &BigInt::from(t));
    }
    fn col_add(w: &mut ModMatrix, r: &mut IntMatrix, dst: usize, src: usize, t: i128) {
        let n = w.n;
        let kk = w.k as i128;
        for i in 0..n {
            let v = (w.entry(i, dst) as i128 + t * w.entry(i, src) as i128).rem_euclid(kk);
            w.entries[i * n + dst] = v as u64;
        }
        r.add_multiple_of_col(dst, src, &BigInt::from(t));
    }

    for pos in 0..n {
        // Work a unit into (pos, pos) with Euclid steps down the column.
        // Some entry combination is a unit because the determinant is one.
        loop {
            if let Some(i) = (pos..n).find(|&i| mod_gcd(w.entry(i, pos), k) == 1) {
                if i != pos {
                    w.swap_rows_mod(pos, i);
                    l_acc.swap_rows(pos, i);
                }
                break;
            }
            let nz: Vec<(usize, u64)> = (pos..n)
                .map(|i| (i, w.entry(i, pos)))
                .filter(|&(_, v)| v != 0)
                .collect();
            assert!(!nz.is_empty(), "unit determinant forces column gcd 1 with k");
            let &(ib, b) = nz.iter().min_by_key(|&&(_, v)| v).expect("nonempty");
            for &(i, a) in &nz {
                if i == ib {
                    continue;
                }
                let q = (a / b) as i128;
                row_add(&mut w, &mut l_acc, i, ib, -q);
            }
        }
        let pivot = w.entry(pos, pos);
        let inv = mod_inv(pivot, k).expect("pivot is a unit");
        for i in pos + 1..n {
            let t = (w.entry(i, pos) as u128 * inv as u128 % k as u128) as i128;
            if t != 0 {
                row_add(&mut w, &mut l_acc, i, pos, -t);
            }
        }
        for j in pos + 1..n {
            let t = (w.entry(pos, j) as u128 * inv as u128 % k as u128) as i128;
            if t != 0 {
                col_add(&mut w, &mut r_acc, j, pos, -t);
            }
        }
    }

    // Squeeze diag(u_0, ..., u_{n-1}) to diag(1, ..., 1, eta).
    for i in 0..n.saturating_sub(1) {
        let u = w.entry(i, i);
        if u == 1 % k {
            continue;
        }
        let v = w.entry(i + 1, i + 1);
        let vinv = mod_inv(v, k).expect("diagonal entries are units");
        let t1 = ((1 + k - u) % k) as u128 * vinv as u128 % k as u128;
        row_add(&mut w, &mut l_acc, i, i + 1, t1 as i128);
        col_add(&mut w, &mut r_acc, i, i + 1, 1);
        row_add(&mut w, &mut l_acc, i + 1, i, -(v as i128));
        col_add(&mut w, &mut r_acc, i + 1, i, -(((1 + k - u) % k) as i128));
        debug_assert_eq!(w.entry(i, i), 1 % k);
        debug_assert_eq!(w.entry(i, i + 1), 0);
        debug_assert_eq!(w.entry(i + 1, i), 0);
    }
    let eta = w.entry(n - 1, n - 1);
    let eps = if eta == 1 % k {
        BigInt::one()
    } else {
        assert_eq!(eta, (k - 1) % k, "final diagonal entry must be +-1");
        -BigInt::one()
    };
    let mut delta = IntMatrix::identity(n);
    delta.set(n - 1, n - 1, eps);

    let lift = l_acc
        .inverse_unimodular()?
        .mul(&delta)
        .mul(&r_acc.inverse_unimodular()?);
    assert_eq!(ModMatrix::reduce(&lift, k), *m, "lift fails to reduce back");
    assert!(intlin::is_unimodular(&lift)?);
    Ok(lift)
}
