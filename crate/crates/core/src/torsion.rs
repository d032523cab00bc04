//! Constructive automorphism extension along finite chains
//! `G_0 <= G_1 <= ... <= G_m` of finite abelian groups.
//!
//! Supported growth between consecutive groups, per prime p: the Sylow
//! p-part is unchanged, gains one elementary `Z_p` factor, or grows from
//! `Z_2` to `Z_4`. An automorphism of the bottom group extends step by
//! step: copied on unchanged parts, extended by the identity on a new
//! `Z_p` coordinate, and the identity on a `Z_4` that grew out of a `Z_2`.
//! The countable limit is represented by the ability to extend one more
//! step on demand, never by an infinite object.

use std::collections::BTreeMap;

use crate::oracle::{FiniteAbelianGroup, GroupAut};
use crate::{Error, Result};

fn prime_of(q: u64) -> u64 {
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            return p;
        }
        p += 1;
    }
    q
}

/// How one coordinate of the smaller group sits inside the bigger one.
#[derive(Clone, Debug, PartialEq, Eq)]
enum CoordEmbedding {
    /// Old coordinate i maps to new coordinate j with the same modulus.
    Same { to: usize },
    /// Old `Z_2` coordinate maps onto `2 * generator` of a new `Z_4`.
    Doubled { to: usize },
}

/// One inclusion `G_{i-1} <= G_i` with an explicit coordinate map.
#[derive(Clone, Debug)]
pub struct ChainStep {
    small: FiniteAbelianGroup,
    big: FiniteAbelianGroup,
    coord_map: Vec<CoordEmbedding>,
}

impl ChainStep {
    /// Validates the growth mode and builds the coordinate embedding.
    ///
    /// `assignment[i]` names the coordinate of `big` that coordinate `i`
    /// of `small` maps into.
    pub fn new(
        small: FiniteAbelianGroup,
        big: FiniteAbelianGroup,
        assignment: &[usize],
    ) -> Result<ChainStep> {
        if assignment.len() != small.primary().len() {
            return Err(Error::InvalidInput(
                "assignment must name a target coordinate per source coordinate".into(),
            ));
        }
        let mut used = vec![false; big.primary().len()];
        let mut coord_map = Vec::with_capacity(assignment.len());
        for (i, &to) in assignment.iter().enumerate() {
            let q_small = small.primary()[i];
            let q_big = *big
                .primary()
                .get(to)
                .ok_or_else(|| Error::InvalidInput("assignment out of range".into()))?;
            if used[to] {
                return Err(Error::InvalidInput("assignment reuses a coordinate".into()));
            }
            used[to] = true;
            if q_big == q_small {
                coord_map.push(CoordEmbedding::Same { to });
            } else if q_small == 2 && q_big == 4 {
                coord_map.push(CoordEmbedding::Doubled { to });
            } else {
                return Err(Error::UnsupportedChainStep {
                    p: prime_of(q_small),
                    detail: format!("coordinate of order {q_small} cannot grow to {q_big}"),
                });
            }
        }
        let step = ChainStep {
            small,
            big,
            coord_map,
        };
        step.validate_growth_modes()?;
        Ok(step)
    }

    /// Convenience constructor matching coordinates greedily: each source
    /// coordinate to the first unused target with the same modulus, then
    /// `Z_2` to an unused `Z_4`.
    pub fn infer(small: FiniteAbelianGroup, big: FiniteAbelianGroup) -> Result<ChainStep> {
        let mut used = vec![false; big.primary().len()];
        let mut assignment = Vec::with_capacity(small.primary().len());
        for &q in small.primary() {
            let same = big
                .primary()
                .iter()
                .enumerate()
                .find(|&(j, &qb)| !used[j] && qb == q);
            let slot = match same {
                Some((j, _)) => j,
                None if q == 2 => big
                    .primary()
                    .iter()
                    .enumerate()
                    .find(|&(j, &qb)| !used[j] && qb == 4)
                    .map(|(j, _)| j)
                    .ok_or(Error::UnsupportedChainStep {
                        p: 2,
                        detail: "no free Z_4 coordinate for a Z_2 to grow into".into(),
                    })?,
                None => {
                    return Err(Error::UnsupportedChainStep {
                        p: prime_of(q),
                        detail: format!("no free coordinate of order {q} in the bigger group"),
                    })
                }
            };
            used[slot] = true;
            assignment.push(slot);
        }
        ChainStep::new(small, big, &assignment)
    }

    pub fn small(&self) -> &FiniteAbelianGroup {
        &self.small
    }

    pub fn big(&self) -> &FiniteAbelianGroup {
        &self.big
    }

    /// The embedding as an element map.
    pub fn embed(&self, el: &[u64]) -> Vec<u64> {
        let mut out = self.big.zero();
        for (i, &x) in el.iter().enumerate() {
            match self.coord_map[i] {
                CoordEmbedding::Same { to } => out[to] = x,
                CoordEmbedding::Doubled { to } => out[to] = 2 * x % 4,
            }
        }
        out
    }

    /// Per-prime growth must be: unchanged, one new `Z_p`, or `Z_2 -> Z_4`.
    fn validate_growth_modes(&self) -> Result<()> {
        let histogram = |g: &FiniteAbelianGroup| -> BTreeMap<u64, Vec<u64>> {
            let mut h: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
            for &q in g.primary() {
                h.entry(prime_of(q)).or_default().push(q);
            }
            h
        };
        let hs = histogram(&self.small);
        let hb = histogram(&self.big);
        for (p, qs_big) in &hb {
            let empty = Vec::new();
            let qs_small = hs.get(p).unwrap_or(&empty);
            // Sylow parts must be elementary abelian, or the single Z_4.
            let elementary_or_z4 = |qs: &Vec<u64>| {
                qs.iter().all(|&q| q == *p) || (*p == 2 && qs.as_slice() == [4])
            };
            if !elementary_or_z4(qs_big) || !(qs_small.is_empty() || elementary_or_z4(qs_small)) {
                return Err(Error::UnsupportedChainStep {
                    p: *p,
                    detail: "Sylow part must be elementary abelian or a single Z_4 over a Z_2".into(),
                });
            }
            let unchanged = qs_small == qs_big;
            let gained_one = qs_big.len() == qs_small.len() + 1
                && qs_big.iter().all(|&q| q == *p)
                && qs_small.iter().all(|&q| q == *p);
            let two_to_four =
                *p == 2 && qs_small.as_slice() == [2] && qs_big.as_slice() == [4];
            if !(unchanged || gained_one || two_to_four) {
                return Err(Error::UnsupportedChainStep {
                    p: *p,
                    detail: format!("unsupported growth {qs_small:?} -> {qs_big:?}"),
                });
            }
        }
        for p in hs.keys() {
            if !hb.contains_key(p) {
                return Err(Error::UnsupportedChainStep {
                    p: *p,
                    detail: "a prime part disappeared along the chain".into(),
                });
            }
        }
        Ok(())
    }
}

/// A finite chain of finite abelian groups with explicit inclusions.
#[derive(Clone, Debug)]
pub struct AbelianChain {
    groups: Vec<FiniteAbelianGroup>,
    steps: Vec<ChainStep>,
}

impl AbelianChain {
    /// Builds the chain from consecutive groups, inferring coordinate
    /// embeddings.
    pub fn new(groups: Vec<FiniteAbelianGroup>) -> Result<AbelianChain> {
        if groups.is_empty() {
            return Err(Error::InvalidInput("chain needs at least one group".into()));
        }
        let mut steps = Vec::new();
        for pair in groups.windows(2) {
            steps.push(ChainStep::infer(pair[0].clone(), pair[1].clone())?);
        }
        Ok(AbelianChain { groups, steps })
    }

    pub fn from_steps(steps: Vec<ChainStep>) -> Result<AbelianChain> {
        if steps.is_empty() {
            return Err(Error::InvalidInput("chain needs at least one step".into()));
        }
        for pair in steps.windows(2) {
            if pair[0].big != pair[1].small {
                return Err(Error::InvalidInput("consecutive steps do not compose".into()));
            }
        }
        let mut groups = vec![steps[0].small.clone()];
        groups.extend(steps.iter().map(|s| s.big.clone()));
        Ok(AbelianChain { groups, steps })
    }

    pub fn groups(&self) -> &[FiniteAbelianGroup] {
        &self.groups
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    pub fn bottom(&self) -> &FiniteAbelianGroup {
        &self.groups[0]
    }

    pub fn top(&self) -> &FiniteAbelianGroup {
        self.groups.last().expect("nonempty chain")
    }
}

fn is_automorphism(g: &FiniteAbelianGroup, a: &GroupAut) -> bool {
    if a.images.len() != g.primary().len() {
        return false;
    }
    // well-defined: image orders divide the coordinate moduli
    for (i, &q) in g.primary().iter().enumerate() {
        if q % g.element_order(&a.images[i]) != 0 {
            return false;
        }
    }
    // bijective on all elements (groups here are small)
    let mut seen = std::collections::BTreeSet::new();
    g.elements().iter().all(|e| seen.insert(a.apply(g, e)))
}

/// Extends an automorphism of the smaller group across one chain step.
///
/// Unchanged coordinates copy through the embedding; a new elementary
/// coordinate is fixed; a `Z_4` grown from a `Z_2` is fixed pointwise
/// (forced, since the restriction to the old `Z_2` is the identity).
pub fn extend_automorphism(step: &ChainStep, alpha: &GroupAut) -> Result<GroupAut> {
    if !is_automorphism(&step.small, alpha) {
        return Err(Error::InvalidInput(
            "input is not an automorphism of the smaller group".into(),
        ));
    }
    let big_t = step.big.primary().len();
    let mut images: Vec<Option<Vec<u64>>> = vec![None; big_t];
    for (i, emb) in step.coord_map.iter().enumerate() {
        let alpha_ei = &alpha.images[i];
        match *emb {
            CoordEmbedding::Same { to } => {
                images[to] = Some(step.embed(alpha_ei));
            }
            CoordEmbedding::Doubled { to } => {
                // alpha fixes the unique involution, so the identity on the
                // whole Z_4 restricts correctly.
                let mut e = step.big.zero();
                e[to] = 1;
                images[to] = Some(e);
            }
        }
    }
    for (j, img) in images.iter_mut().enumerate() {
        if img.is_none() {
            // new elementary coordinate: fixed
            let mut e = step.big.zero();
            e[j] = 1;
            *img = Some(e);
        }
    }
    let extended = GroupAut {
        images: images.into_iter().map(|i| i.expect("filled")).collect(),
    };

    if !is_automorphism(&step.big, &extended) {
        return Err(Error::InvalidInput(
            "extension failed the automorphism check".into(),
        ));
    }
    // restriction identity, exhaustively
    for e in step.small.elements() {
        if extended.apply(&step.big, &step.embed(&e)) != step.embed(&alpha.apply(&step.small, &e)) {
            return Err(Error::InvalidInput(
                "extension does not restrict to the given automorphism".into(),
            ));
        }
    }
    Ok(extended)
}

/// Iterates [`extend_automorphism`] along the whole chain. The result is
/// an automorphism of the top group restricting to `alpha0` on the bottom,
/// hence still carrying `alpha0(S)` wherever it carried it.
pub fn chain_extend(chain: &AbelianChain, alpha0: &GroupAut) -> Result<GroupAut> {
    let mut alpha = alpha0.clone();
    for step in chain.steps() {
        alpha = extend_automorphism(step, &alpha)?;
    }
    // homomorphism property, exhaustively on small groups
    let top = chain.top();
    if top.order() <= 3000 {
        let elements = top.elements();
        for a in &elements {
            for b in &elements {
                let lhs = alpha.apply(top, &top.add(a, b));
                let rhs = top.add(&alpha.apply(top, a), &alpha.apply(top, b));
                assert_eq!(lhs, rhs, "extension is not a homomorphism");
            }
        }
    }
    Ok(alpha)
}

/// Embedding of a bottom-group element all the way to the top.
pub fn embed_to_top(chain: &AbelianChain, el: &[u64]) -> Vec<u64> {
    let mut v = el.to_vec();
    for step in chain.steps() {
        v = step.embed(&v);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn g(parts: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_primary(parts).unwrap()
    }

    fn inversion(group: &FiniteAbelianGroup) -> GroupAut {
        let t = group.primary().len();
        GroupAut {
            images: (0..t)
                .map(|i| {
                    let mut e = group.zero();
                    e[i] = 1;
                    group.neg(&e)
                })
                .collect(),
        }
    }

    fn identity(group: &FiniteAbelianGroup) -> GroupAut {
        let t = group.primary().len();
        GroupAut {
            images: (0..t)
                .map(|i| {
                    let mut e = group.zero();
                    e[i] = 1;
                    e
                })
                .collect(),
        }
    }

    #[test]
    fn elementary_growth_extends_componentwise() {
        let step = ChainStep::infer(g(&[3]), g(&[3, 3])).unwrap();
        let alpha = inversion(&g(&[3]));
        let ext = extend_automorphism(&step, &alpha).unwrap();
        // (g, h) -> (-g, h)
        assert_eq!(ext.apply(&g(&[3, 3]), &[1, 0]), vec![2, 0]);
        assert_eq!(ext.apply(&g(&[3, 3]), &[0, 1]), vec![0, 1]);
    }

    #[test]
    fn z2_to_z4_extends_as_identity() {
        let step = ChainStep::infer(g(&[2]), g(&[4])).unwrap();
        let alpha = identity(&g(&[2]));
        let ext = extend_automorphism(&step, &alpha).unwrap();
        for e in g(&[4]).elements() {
            assert_eq!(ext.apply(&g(&[4]), &e), e);
        }
    }

    #[test]
    fn unchanged_step_copies() {
        let step = ChainStep::infer(g(&[3]), g(&[3])).unwrap();
        let alpha = inversion(&g(&[3]));
        let ext = extend_automorphism(&step, &alpha).unwrap();
        assert_eq!(ext.images, alpha.images);
    }

    #[test]
    fn rejects_unsupported_growth() {
        // Z_3 -> Z_9 is not a supported mode
        assert!(matches!(
            ChainStep::infer(g(&[3]), g(&[9])),
            Err(Error::UnsupportedChainStep { p: 3, .. })
        ));
        // Z_4 -> Z_8 neither
        assert!(matches!(
            ChainStep::infer(g(&[4]), g(&[8])),
            Err(Error::UnsupportedChainStep { p: 2, .. })
        ));
    }

    #[test]
    fn chain_extension_examples() {
        // Z_2 <= Z_4 <= Z_4 x Z_3: identity all the way
        let chain = AbelianChain::new(vec![g(&[2]), g(&[4]), g(&[4, 3])]).unwrap();
        let ext = chain_extend(&chain, &identity(&g(&[2]))).unwrap();
        for e in chain.top().elements() {
            assert_eq!(ext.apply(chain.top(), &e), e);
        }

        // Z_3 <= Z_3 x Z_3 <= Z_3 x Z_3 x Z_5 with inversion at the bottom
        let chain = AbelianChain::new(vec![g(&[3]), g(&[3, 3]), g(&[3, 3, 5])]).unwrap();
        let ext = chain_extend(&chain, &inversion(&g(&[3]))).unwrap();
        let top = chain.top();
        assert_eq!(ext.apply(top, &[1, 0, 0]), vec![2, 0, 0]);
        assert_eq!(ext.apply(top, &[0, 1, 0]), vec![0, 1, 0]);
        assert_eq!(ext.apply(top, &[0, 0, 1]), vec![0, 0, 1]);
    }

    #[test]
    fn restriction_identity_holds_at_every_stage() {
        let groups = vec![g(&[3]), g(&[3, 3]), g(&[3, 3, 2]), g(&[3, 3, 2, 5])];
        let chain = AbelianChain::new(groups.clone()).unwrap();
        let alpha0 = inversion(&groups[0]);
        // stage automorphisms
        let mut stages = vec![alpha0.clone()];
        for step in chain.steps() {
            let prev = stages.last().unwrap();
            stages.push(extend_automorphism(step, prev).unwrap());
        }
        // the restriction of stage j+1 to stage j's group is stage j
        for (j, step) in chain.steps().iter().enumerate() {
            for e in step.small().elements() {
                assert_eq!(
                    stages[j + 1].apply(step.big(), &step.embed(&e)),
                    step.embed(&stages[j].apply(step.small(), &e))
                );
            }
        }
    }

    #[test]
    fn sets_are_carried_through() {
        let chain = AbelianChain::new(vec![g(&[3]), g(&[3, 3])]).unwrap();
        let alpha0 = inversion(&g(&[3]));
        let s: BTreeSet<Vec<u64>> = [vec![1u64], vec![2u64]].into();
        let s2: BTreeSet<Vec<u64>> = s.iter().map(|e| alpha0.apply(&g(&[3]), e)).collect();
        assert_eq!(s, s2); // symmetric set fixed by inversion
        let ext = chain_extend(&chain, &alpha0).unwrap();
        let embedded: BTreeSet<Vec<u64>> = s.iter().map(|e| embed_to_top(&chain, e)).collect();
        let mapped: BTreeSet<Vec<u64>> = embedded
            .iter()
            .map(|e| ext.apply(chain.top(), e))
            .collect();
        let want: BTreeSet<Vec<u64>> = s2.iter().map(|e| embed_to_top(&chain, e)).collect();
        assert_eq!(mapped, want);
    }
}
