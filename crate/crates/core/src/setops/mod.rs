//! Product-set algebra over `SL_n(F_p)` and the growth / intersection
//! verifiers built on it.

mod growth;
mod lemmas;
mod powers;


use rayon::prelude::*;
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::matgrp::{GroupElem, SlGroup};

pub use growth::{
    max_coset_intersection, verify_apa, verify_growth, verify_pab, ApaReport, CosetIntersection,
    GrowthReport, PabReport,
};
pub use lemmas::{
    check_r_pgp, r_pgp_census, subgroup_intersection, DoubleCosetEntry, IntersectionReport,
    RpgpReport,
};
pub use powers::{
    power_intersect, qr_fixture, quasirandom_check, tripling, PowerIntersect, QuasirandomReport,
    TriplingStats,
};

/// Left factors at least this long are split across the rayon pool.
const PAR_THRESHOLD: usize = 4096;

/// A finite set of elements of one `SL_n(F_p)`.
///
/// Elements are kept sorted so that iteration order (and therefore every
/// witness a report picks) does not depend on hashing or thread count.
#[derive(Clone, Debug)]
pub struct ElemSet {
    group: SlGroup,
    elems: Vec<GroupElem>,
    index: FxHashSet<GroupElem>,
}

impl PartialEq for ElemSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elems == other.elems
    }
}

impl Eq for ElemSet {}

impl ElemSet {
    pub fn empty(group: SlGroup) -> Self {
        Self { group, elems: Vec::new(), index: FxHashSet::default() }
    }

    pub fn from_vec(group: SlGroup, mut elems: Vec<GroupElem>) -> Self {
        debug_assert!(elems.iter().all(|g| g.dim() == group.n()));
        elems.sort_unstable();
        elems.dedup();
        let index = elems.iter().copied().collect();
        Self { group, elems, index }
    }

    fn from_hashset(group: SlGroup, index: FxHashSet<GroupElem>) -> Self {
        let mut elems: Vec<GroupElem> = index.iter().copied().collect();
        elems.sort_unstable();
        Self { group, elems, index }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_iter(group: SlGroup, it: impl IntoIterator<Item = GroupElem>) -> Self {
        Self::from_vec(group, it.into_iter().collect())
    }

    pub fn singleton(group: SlGroup, g: GroupElem) -> Self {
        Self::from_vec(group, vec![g])
    }

    pub fn group(&self) -> SlGroup {
        self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        self.index.contains(g)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElem> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[GroupElem] {
        &self.elems
    }

    pub fn filter(&self, pred: impl Fn(&GroupElem) -> bool) -> Self {
        Self::from_vec(self.group, self.elems.iter().copied().filter(|g| pred(g)).collect())
    }

    pub fn inverse(&self) -> Self {
        Self::from_iter(self.group, self.elems.iter().map(|g| self.group.inv(g)))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_iter(self.group, self.elems.iter().chain(other.elems.iter()).copied())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.filter(|g| other.contains(g))
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.filter(|g| !other.contains(g))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().any(|g| big.contains(g))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|g| other.contains(g))
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&self.group.identity())
    }

    /// `S·S = S` and `S^{-1} = S`, checked directly.
    pub fn is_subgroup(&self) -> bool {
        !self.is_empty()
            && self.elems.iter().all(|g| self.contains(&self.group.inv(g)))
            && self
                .elems
                .iter()
                .all(|a| self.elems.iter().all(|b| self.contains(&self.group.mul(a, b))))
    }

    /// `gS` for a single element.
    pub fn left_translate(&self, g: &GroupElem) -> Self {
        Self::from_iter(self.group, self.elems.iter().map(|s| self.group.mul(g, s)))
    }

    /// `Sg` for a single element.
    pub fn right_translate(&self, g: &GroupElem) -> Self {
        Self::from_iter(self.group, self.elems.iter().map(|s| self.group.mul(s, g)))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::ContextMismatch(self.group.to_string(), other.group.to_string()));
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a ElemSet {
    type Item = &'a GroupElem;
    type IntoIter = std::slice::Iter<'a, GroupElem>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

/// `AB = {ab : a ∈ A, b ∈ B}`.
pub fn product(a: &ElemSet, b: &ElemSet) -> Result<ElemSet> {
    a.check_same(b)?;
    let g = a.group;
    let chunk = |part: &[GroupElem]| {
        let mut set = FxHashSet::with_capacity_and_hasher(part.len() * 4, FxBuildHasher);
        for x in part {
            for y in b.iter() {
                set.insert(g.mul(x, y));
            }
        }
        set
    };
    let set = if a.len() * b.len() >= PAR_THRESHOLD * 16 && a.len() > 1 {
        let step = a.len().div_ceil(rayon::current_num_threads().max(1) * 4);
        a.elems
            .par_chunks(step.max(1))
            .map(chunk)
            .reduce(FxHashSet::default, |mut x, y| {
                if x.len() < y.len() {
                    return merge(y, x);
                }
                x.extend(y);
                x
            })
    } else {
        chunk(&a.elems)
    };
    Ok(ElemSet::from_hashset(g, set))
}

fn merge(mut x: FxHashSet<GroupElem>, y: FxHashSet<GroupElem>) -> FxHashSet<GroupElem> {
    x.extend(y);
    x
}

/// `A_1 A_2 ... A_k`, left to right.
pub fn product_many(sets: &[&ElemSet]) -> Result<ElemSet> {
    let (first, rest) = sets.split_first().ok_or_else(|| Error::Domain("empty product".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, s| product(&acc, s))
}

/// Multiplicities of every product `ab`.
pub fn rep_counts(a: &ElemSet, b: &ElemSet) -> Result<FxHashMap<GroupElem, u64>> {
    a.check_same(b)?;
    let g = a.group;
    let mut counts: FxHashMap<GroupElem, u64> = FxHashMap::default();
    for x in a.iter() {
        for y in b.iter() {
            *counts.entry(g.mul(x, y)).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// `r_{AB}(x) = |{(a, b) ∈ A×B : ab = x}|`
pub fn rep_count(a: &ElemSet, b: &ElemSet, x: &GroupElem) -> Result<u64> {
    a.check_same(b)?;
    let g = a.group;
    // ab = x  <=>  b = a^{-1} x
    Ok(a.iter().filter(|s| b.contains(&g.mul(&g.inv(s), x))).count() as u64)
}

/// Common energy `E(A, B) = Σ_x r_{A^{-1}B}(x)^2`.
pub fn energy(a: &ElemSet, b: &ElemSet) -> Result<u128> {
    let counts = rep_counts(&a.inverse(), b)?;
    Ok(counts.values().map(|&c| (c as u128) * (c as u128)).sum())
}

/// `σ_P(B, C) = Σ_{x ∈ P} r_{BC}(x)`.
pub fn sigma(p: &ElemSet, b: &ElemSet, c: &ElemSet) -> Result<u64> {
    p.check_same(b)?;
    p.check_same(c)?;
    Ok(sigma_by(|x| p.contains(x), b, c))
}

/// `σ` with membership given by a predicate (e.g. "is upper triangular").
pub fn sigma_by(member: impl Fn(&GroupElem) -> bool + Sync, b: &ElemSet, c: &ElemSet) -> u64 {
    let g = b.group;
    b.elems
        .par_iter()
        .map(|x| c.iter().filter(|y| member(&g.mul(x, y))).count() as u64)
        .sum()
}

/// Canonical label of the left coset `xP`: its smallest element.
pub fn left_coset_key(x: &GroupElem, p: &ElemSet) -> GroupElem {
    let g = p.group;
    p.iter().map(|h| g.mul(x, h)).min().expect("nonempty subgroup")
}

/// Canonical label of the right coset `Px`.
pub fn right_coset_key(x: &GroupElem, p: &ElemSet) -> GroupElem {
    let g = p.group;
    p.iter().map(|h| g.mul(h, x)).min().expect("nonempty subgroup")
}

/// Sizes of `A ∩ gP` keyed by coset label.
pub fn left_coset_counts(a: &ElemSet, p: &ElemSet) -> Vec<(GroupElem, usize)> {
    coset_counts(a, |x| left_coset_key(x, p))
}

/// Sizes of `A ∩ Pg` keyed by coset label.
pub fn right_coset_counts(a: &ElemSet, p: &ElemSet) -> Vec<(GroupElem, usize)> {
    coset_counts(a, |x| right_coset_key(x, p))
}

fn coset_counts(a: &ElemSet, key: impl Fn(&GroupElem) -> GroupElem + Sync + Send) -> Vec<(GroupElem, usize)> {
    let keys: Vec<GroupElem> = a.elems.par_iter().map(key).collect();
    let mut counts: FxHashMap<GroupElem, usize> = FxHashMap::default();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    let mut out: Vec<(GroupElem, usize)> = counts.into_iter().collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::{SubgroupKind, WeylElem};
    use crate::random::{random_subset, rng};
    use crate::DEFAULT_BUDGET;

    fn grp(n: usize, p: u64) -> SlGroup {
        SlGroup::new(n, p).unwrap()
    }

    #[test]
    fn product_with_identity() {
        let g = grp(2, 5);
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let b = random_subset(&all, 17, &mut rng(1));
        let one = ElemSet::singleton(g, g.identity());
        assert_eq!(product(&one, &b).unwrap(), b);
    }

    #[test]
    fn subgroup_products() {
        let g = grp(2, 5);
        let b = g.borel().unwrap();
        assert_eq!(product(&b, &b).unwrap(), b);
        // the tightness set B ⊔ BwB is the whole group here
        let w = g.weyl_rep(&WeylElem::reflection(2, 1).unwrap());
        let bwb = product_many(&[&b, &ElemSet::singleton(g, w), &b]).unwrap();
        let a = b.union(&bwb);
        assert_eq!(a.len(), 120);
        assert_eq!(product(&a, &b).unwrap(), a);
        assert_eq!(product(&b, &a).unwrap(), a);
    }

    #[test]
    fn context_mismatch() {
        let a = grp(2, 5).borel().unwrap();
        let b = grp(2, 7).borel().unwrap();
        assert!(matches!(product(&a, &b), Err(Error::ContextMismatch(..))));
    }

    #[test]
    fn rep_count_basics() {
        let g = grp(2, 7);
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let a = random_subset(&all, 25, &mut rng(2));
        assert_eq!(rep_count(&a, &a.inverse(), &g.identity()).unwrap(), 25);
        let x = all.as_slice()[10];
        assert_eq!(rep_count(&all, &all, &x).unwrap(), all.len() as u64);
        let s = ElemSet::singleton(g, all.as_slice()[3]);
        let t = ElemSet::singleton(g, all.as_slice()[5]);
        let prod = g.mul(&all.as_slice()[3], &all.as_slice()[5]);
        assert_eq!(rep_count(&s, &t, &prod).unwrap(), 1);
        assert_eq!(rep_count(&s, &t, &g.identity()).unwrap(), u64::from(prod == g.identity()));
    }

    #[test]
    fn energy_of_subgroup_is_cube() {
        let g = grp(2, 5);
        let b = g.borel().unwrap();
        assert_eq!(energy(&b, &b).unwrap(), 20u128.pow(3));
    }

    #[test]
    fn cauchy_schwarz_equality_for_borel() {
        let g = grp(2, 3);
        let b = g.borel().unwrap();
        let e = energy(&b, &b).unwrap();
        let ab = product(&b.inverse(), &b).unwrap().len() as u128;
        assert_eq!(e * ab, 216 * 6);
        assert_eq!(e * ab, 6u128.pow(2) * 6u128.pow(2));
    }

    #[test]
    fn energy_symmetric_and_cs() {
        let g = grp(2, 7);
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let mut r = rng(3);
        for _ in 0..20 {
            let a = random_subset(&all, 12, &mut r);
            let b = random_subset(&all, 30, &mut r);
            let e = energy(&a, &b).unwrap();
            assert_eq!(e, energy(&b, &a).unwrap());
            let ab = product(&a.inverse(), &b).unwrap().len() as u128;
            assert!(e * ab >= (a.len() as u128).pow(2) * (b.len() as u128).pow(2));
        }
    }

    #[test]
    fn sigma_basics() {
        let g = grp(2, 5);
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let mut r = rng(4);
        let b = random_subset(&all, 9, &mut r);
        let c = random_subset(&all, 11, &mut r);
        assert_eq!(sigma(&all, &b, &c).unwrap(), 99);
        let borel = g.borel().unwrap();
        // BC ∩ P = ∅ when B and C are both inside P and P is replaced by its complement
        let comp = all.difference(&borel);
        assert_eq!(sigma(&comp, &borel, &borel).unwrap(), 0);
    }

    #[test]
    fn subgroup_closure() {
        for (n, p) in [(2usize, 5u64), (3, 2)] {
            let g = grp(n, p);
            for kind in [SubgroupKind::Borel, SubgroupKind::Unipotent, SubgroupKind::Torus, SubgroupKind::LowerBorel] {
                assert!(g.subgroup(&kind, DEFAULT_BUDGET).unwrap().is_subgroup(), "{kind:?}");
            }
        }
    }

    #[test]
    fn containment_chain() {
        let g = grp(3, 3);
        let t = g.subgroup(&SubgroupKind::Torus, DEFAULT_BUDGET).unwrap();
        let b = g.borel().unwrap();
        assert!(t.is_subset(&b));
        for j in [&[][..], &[1], &[2], &[1, 2]] {
            assert!(b.is_subset(&g.parabolic(j).unwrap()));
        }
    }

    #[test]
    fn conjugation() {
        let g = grp(2, 5);
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let s = random_subset(&all, 13, &mut rng(5));
        assert_eq!(g.conjugate(&g.identity(), &s), s);
        assert_eq!(g.conjugate(&all.as_slice()[77], &s).len(), 13);
        let w = g.weyl_rep(&WeylElem::reflection(2, 1).unwrap());
        let lower = g.subgroup(&SubgroupKind::LowerBorel, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.conjugate(&w, &g.borel().unwrap()), lower);
    }

    #[test]
    fn coset_counts_partition() {
        let g = grp(2, 7);
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let b = g.borel().unwrap();
        let left = left_coset_counts(&all, &b);
        assert_eq!(left.len(), 8);
        assert!(left.iter().all(|&(_, c)| c == 42));
        let right = right_coset_counts(&all, &b);
        assert_eq!(right.len(), 8);
    }
}
