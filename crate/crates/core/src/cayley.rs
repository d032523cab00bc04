//! Connection sets and finite truncations of `Cay(Z^n; S)`: validation,
//! component counting, balls, torus quotients, and residue-class sets on
//! `Z` for the mod-5 demonstration.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::lattice::{Lattice, LatticeIndex};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Directed,
    Undirected,
}

/// A finite set of nonzero vectors defining `Cay(Z^n; S)`.
///
/// Vectors are deduplicated and canonically sorted; undirected sets are
/// materialized closed under negation, so input may list one representative
/// per +/- pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionSet {
    n: usize,
    mode: Mode,
    vectors: Vec<Vec<BigInt>>,
}

impl ConnectionSet {
    pub fn validate(raw: &[Vec<BigInt>], n: usize, mode: Mode) -> Result<ConnectionSet> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        if raw.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut set: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for v in raw {
            if v.len() != n {
                return Err(Error::BadVector);
            }
            if v.iter().all(|x| x.is_zero()) {
                return Err(Error::ZeroVector);
            }
            if mode == Mode::Undirected {
                set.insert(v.iter().map(|x| -x.clone()).collect());
            }
            set.insert(v.clone());
        }
        Ok(ConnectionSet {
            n,
            mode,
            vectors: set.into_iter().collect(),
        })
    }

    /// Convenience constructor for fixtures; panics on invalid input.
    pub fn from_i64(raw: &[&[i64]], n: usize, mode: Mode) -> ConnectionSet {
        let vs: Vec<Vec<BigInt>> = raw
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        ConnectionSet::validate(&vs, n, mode).expect("fixture connection set")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.vectors.iter().any(|w| w.as_slice() == v)
    }

    /// `S` together with `-S`; the arc set of the underlying graph.
    pub fn symmetrized(&self) -> Vec<Vec<BigInt>> {
        let mut set: BTreeSet<Vec<BigInt>> = self.vectors.iter().cloned().collect();
        for v in &self.vectors {
            set.insert(v.iter().map(|x| -x.clone()).collect());
        }
        set.into_iter().collect()
    }

    /// The subgroup of `Z^n` generated by `S`.
    pub fn span_lattice(&self) -> Lattice {
        Lattice::span(&self.vectors, self.n).expect("connection sets are nonzero")
    }

    /// Image of the set under an ambient linear map, revalidated.
    pub fn apply_matrix(&self, m: &crate::intlin::IntMatrix) -> Result<ConnectionSet> {
        let imgs: Vec<Vec<BigInt>> = self.vectors.iter().map(|v| m.mul_vec(v)).collect();
        ConnectionSet::validate(&imgs, m.rows(), self.mode)
    }

    /// Largest infinity-norm over the set.
    pub fn max_abs(&self) -> BigInt {
        self.vectors
            .iter()
            .flat_map(|v| v.iter().map(|x| x.abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Number of connected components of the underlying undirected graph:
/// the index of `<S u -S>` in `Z^n`.
pub fn component_count(s: &ConnectionSet) -> LatticeIndex {
    s.span_lattice().index()
}

/// A finite (di)graph with labeled vertices, used as the oracle substrate.
///
/// Vertex labels are integer tuples; arcs are ordered pairs of vertex
/// indices. Graphs constructed from undirected sets are arc-symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    pub labels: Vec<Vec<BigInt>>,
    pub arcs: BTreeSet<(usize, usize)>,
    /// Generator responsible for each arc, where applicable.
    pub arc_tags: BTreeMap<(usize, usize), Vec<BigInt>>,
}

impl FiniteGraph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn index_of(&self, label: &[BigInt]) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_slice().cmp(label)).ok()
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.arcs.contains(&(a, b))
    }

    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        self.arcs
            .range((v, 0)..=(v, usize::MAX))
            .map(|&(_, w)| w)
            .collect()
    }

    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        self.arcs.iter().filter(|&&(a, b)| b == v && a != usize::MAX).map(|&(a, _)| a).collect()
    }

    pub fn is_arc_symmetric(&self) -> bool {
        self.arcs.iter().all(|&(a, b)| self.arcs.contains(&(b, a)))
    }

    /// Connected components of the underlying undirected graph, as sorted
    /// vertex index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.arcs {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// True iff the induced arc sets agree under the vertex identification
    /// by labels; `other` must contain every label of `self`.
    pub fn is_induced_subgraph_of(&self, other: &FiniteGraph) -> bool {
        let map: Option<Vec<usize>> = self
            .labels
            .iter()
            .map(|l| other.index_of(l))
            .collect();
        let Some(map) = map else { return false };
        // every arc of self appears in other, and every arc of other between
        // mapped vertices appears in self
        let mapped: BTreeSet<usize> = map.iter().copied().collect();
        let fwd = self.arcs.iter().all(|&(a, b)| other.has_arc(map[a], map[b]));
        let back = other
            .arcs
            .iter()
            .filter(|&&(a, b)| mapped.contains(&a) && mapped.contains(&b))
            .all(|&(a, b)| {
                let ia = self.labels.iter().position(|l| l == &other.labels[a]).unwrap();
                let ib = self.labels.iter().position(|l| l == &other.labels[b]).unwrap();
                self.has_arc(ia, ib)
            });
        fwd && back
    }
}

fn sorted_graph(
    labels: BTreeSet<Vec<BigInt>>,
    arcs_by_label: &[(Vec<BigInt>, Vec<BigInt>, Vec<BigInt>)],
) -> FiniteGraph {
    let labels: Vec<Vec<BigInt>> = labels.into_iter().collect();
    let index: BTreeMap<&[BigInt], usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_slice(), i))
        .collect();
    let mut arcs = BTreeSet::new();
    let mut arc_tags = BTreeMap::new();
    for (from, to, tag) in arcs_by_label {
        let a = index[from.as_slice()];
        let b = index[to.as_slice()];
        arcs.insert((a, b));
        arc_tags.insert((a, b), tag.clone());
    }
    FiniteGraph { labels, arcs, arc_tags }
}

/// Ball of the stated radius around 0 in the underlying undirected graph.
///
/// Vertices are the elements of `Z^n` at undirected distance at most `r`
/// from the origin, labeled by their coordinates; arcs are the arcs of
/// `Cay(Z^n; S)` between retained vertices, tagged with their generator.
pub fn ball(s: &ConnectionSet, r: u32) -> FiniteGraph {
    let steps = s.symmetrized();
    let origin = vec![BigInt::zero(); s.n()];
    let mut dist: BTreeMap<Vec<BigInt>, u32> = BTreeMap::from([(origin.clone(), 0)]);
    let mut queue = VecDeque::from([origin]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == r {
            continue;
        }
        for step in &steps {
            let w: Vec<BigInt> = v.iter().zip(step).map(|(a, b)| a + b).collect();
            if !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    let labels: BTreeSet<Vec<BigInt>> = dist.into_keys().collect();
    let mut arcs = Vec::new();
    for v in &labels {
        for gen in s.vectors() {
            let w: Vec<BigInt> = v.iter().zip(gen).map(|(a, b)| a + b).collect();
            if labels.contains(&w) {
                arcs.push((v.clone(), w, gen.clone()));
            }
        }
    }
    sorted_graph(labels, &arcs)
}

/// Cayley graph of `(Z_m)^n` with connection set `S mod m`.
///
/// Requires `m > 2 * max |s_i|` so that distinct elements of `S u {0}`
/// stay distinct mod m and no loops appear.
pub fn torus(s: &ConnectionSet, m: u64) -> Result<FiniteGraph> {
    let max = s.max_abs();
    let bound = (&max * 2u8)
        .try_into()
        .map_err(|_| Error::ScaleExceeded("connection set entries exceed u64".into()))?;
    if m <= bound {
        return Err(Error::ModulusTooSmall { m, bound });
    }
    let n = s.n();
    let mb = BigInt::from(m);
    let count = (m as u128).checked_pow(n as u32).filter(|&c| c <= 1 << 20);
    let Some(count) = count else {
        return Err(Error::ScaleExceeded(format!("torus would have m^n = {m}^{n} vertices")));
    };
    let mut labels = BTreeSet::new();
    for idx in 0..count {
        let mut v = Vec::with_capacity(n);
        let mut rest = idx;
        for _ in 0..n {
            v.push(BigInt::from((rest % m as u128) as u64));
            rest /= m as u128;
        }
        v.reverse();
        labels.insert(v);
    }
    let mut arcs = Vec::new();
    for v in &labels {
        for gen in s.vectors() {
            let w: Vec<BigInt> = v
                .iter()
                .zip(gen)
                .map(|(a, b)| ((a + b) % &mb + &mb) % &mb)
                .collect();
            let tag: Vec<BigInt> = gen.iter().map(|x| ((x % &mb) + &mb) % &mb).collect();
            arcs.push((v.clone(), w, tag));
        }
    }
    Ok(sorted_graph(labels, &arcs))
}

/// Residue classes mod `m` defining the locally-infinite Cayley graph
/// `Cay(Z; { i : i mod m in classes })`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSet {
    modulus: u64,
    classes: BTreeSet<u64>,
    mode: Mode,
}

impl ResidueSet {
    pub fn new(modulus: u64, classes: &[u64], mode: Mode) -> Result<ResidueSet> {
        if modulus < 2 {
            return Err(Error::InvalidModulus(BigInt::from(modulus)));
        }
        if classes.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut set = BTreeSet::new();
        for &c in classes {
            let c = c % modulus;
            if c == 0 {
                return Err(Error::ZeroVector);
            }
            set.insert(c);
            if mode == Mode::Undirected {
                set.insert(modulus - c);
            }
        }
        Ok(ResidueSet {
            modulus,
            classes: set,
            mode,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn classes(&self) -> &BTreeSet<u64> {
        &self.classes
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn contains_difference(&self, d: &BigInt) -> bool {
        let m = BigInt::from(self.modulus);
        let r = ((d % &m) + &m) % &m;
        let r: u64 = r.try_into().expect("residue fits u64");
        self.classes.contains(&r)
    }
}

/// Induced sub(di)graph of the residue-class Cayley graph on `{-N, ..., N}`.
pub fn residue_window(r: &ResidueSet, n_window: u64) -> Result<FiniteGraph> {
    if n_window < r.modulus() {
        return Err(Error::WindowTooSmall {
            n: n_window,
            m: r.modulus(),
        });
    }
    let nw = n_window as i64;
    let labels: BTreeSet<Vec<BigInt>> = (-nw..=nw).map(|i| vec![BigInt::from(i)]).collect();
    let mut arcs = Vec::new();
    for i in -nw..=nw {
        for j in -nw..=nw {
            if i == j {
                continue;
            }
            let d = BigInt::from(j - i);
            if r.contains_difference(&d) {
                let m = BigInt::from(r.modulus());
                let tag = vec![((&d % &m) + &m) % &m];
                arcs.push((vec![BigInt::from(i)], vec![BigInt::from(j)], tag));
            }
        }
    }
    Ok(sorted_graph(labels, &arcs))
}
