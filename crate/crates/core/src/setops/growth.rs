use serde::{Deserialize, Serialize};

use super::{left_coset_counts, left_coset_key, product, product_many, sigma, ElemSet};
use crate::error::{Error, Result};
use crate::matgrp::GroupElem;

/// `Δ = max_{g ∉ P} |A ∩ gP|` and an element of `A` in a maximizing coset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetIntersection {
    pub delta: u64,
    pub witness: Option<GroupElem>,
}

pub fn max_coset_intersection(a: &ElemSet, p: &ElemSet) -> Result<CosetIntersection> {
    a.check_same(p)?;
    let home = left_coset_key(&p.group().identity(), p);
    let best = left_coset_counts(a, p)
        .into_iter()
        .filter(|(key, _)| *key != home)
        // largest count, then smallest label
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)));
    Ok(match best {
        None => CosetIntersection { delta: 0, witness: None },
        Some((key, count)) => {
            let witness = a.iter().find(|g| left_coset_key(g, p) == key).copied();
            CosetIntersection { delta: count as u64, witness }
        }
    })
}

/// Sizes and verdicts for the two-alternative growth bound relative to a
/// parabolic subgroup, with `q = p`.
///
/// All inequalities are evaluated in integers:
/// * `alt_small`: `2|AP||A∩P| ≥ |A|²`
/// * `alt_growth`: `4|AP||PA| ≥ |A||P|q`
/// * `max_bound`: `max{|AP|,|PA|} ≥ ½·min{|A|²/|A∩P|, √(|A||P|q)}`
/// * `coset_bound`: `2|PA| ≥ qΔ`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub q: u64,
    pub size_a: u64,
    pub size_p: u64,
    pub size_ap: u64,
    pub size_pa: u64,
    pub size_a_cap_p: u64,
    pub delta: u64,
    pub delta_witness: Option<GroupElem>,
    pub alt_small: bool,
    pub alt_growth: bool,
    pub max_bound: bool,
    pub coset_bound: bool,
}

impl GrowthReport {
    pub fn holds(&self) -> bool {
        (self.alt_small || self.alt_growth) && self.max_bound && self.coset_bound
    }

    /// Recomputes every verdict from the stored sizes.
    pub fn recompute(&self) -> (bool, bool, bool, bool) {
        let (a, p, ap, pa, cap) = (
            self.size_a as u128,
            self.size_p as u128,
            self.size_ap as u128,
            self.size_pa as u128,
            self.size_a_cap_p as u128,
        );
        let q = self.q as u128;
        let alt_small = 2 * ap * cap >= a * a;
        let alt_growth = 4 * ap * pa >= a * p * q;
        let m = ap.max(pa);
        let max_bound = 2 * m * cap >= a * a || 4 * m * m >= a * p * q;
        let coset_bound = 2 * pa >= q * self.delta as u128;
        (alt_small, alt_growth, max_bound, coset_bound)
    }
}

pub fn verify_growth(a: &ElemSet, p: &ElemSet) -> Result<GrowthReport> {
    a.check_same(p)?;
    let ap = product(a, p)?;
    let pa = product(p, a)?;
    let cap = a.intersection(p);
    let ci = max_coset_intersection(a, p)?;
    let mut report = GrowthReport {
        q: a.group().p() as u64,
        size_a: a.len() as u64,
        size_p: p.len() as u64,
        size_ap: ap.len() as u64,
        size_pa: pa.len() as u64,
        size_a_cap_p: cap.len() as u64,
        delta: ci.delta,
        delta_witness: ci.witness,
        alt_small: false,
        alt_growth: false,
        max_bound: false,
        coset_bound: false,
    };
    let (s, g, m, c) = report.recompute();
    report.alt_small = s;
    report.alt_growth = g;
    report.max_bound = m;
    report.coset_bound = c;
    Ok(report)
}

/// `4|APA| ≥ |P|·min{q, |A|⁴ / (σ_P(A⁻¹,A) σ_P(A,A⁻¹))}`, in integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApaReport {
    pub q: u64,
    pub size_a: u64,
    pub size_p: u64,
    pub size_apa: u64,
    pub sigma_left: u64,
    pub sigma_right: u64,
    pub holds: bool,
}

pub fn verify_apa(a: &ElemSet, p: &ElemSet) -> Result<ApaReport> {
    a.check_same(p)?;
    let apa = product_many(&[a, p, a])?;
    let ainv = a.inverse();
    let sigma_left = sigma(p, &ainv, a)?;
    let sigma_right = sigma(p, a, &ainv)?;
    let (na, np, napa, q) = (a.len() as u128, p.len() as u128, apa.len() as u128, a.group().p() as u128);
    let holds = na == 0
        || 4 * napa >= np * q
        || 4 * napa * sigma_left as u128 * sigma_right as u128 >= np * na.pow(4);
    Ok(ApaReport {
        q: q as u64,
        size_a: na as u64,
        size_p: np as u64,
        size_apa: napa as u64,
        sigma_left,
        sigma_right,
        holds,
    })
}

/// `|PAB| ≥ q|P|` for `A ⊄ P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PabReport {
    pub q: u64,
    pub size_p: u64,
    pub size_pab: u64,
    pub holds: bool,
}

pub fn verify_pab(a: &ElemSet, borel: &ElemSet, p: &ElemSet) -> Result<PabReport> {
    a.check_same(p)?;
    a.check_same(borel)?;
    if a.is_subset(p) {
        return Err(Error::Precondition("A is contained in P".into()));
    }
    let pab = product_many(&[p, a, borel])?;
    let q = a.group().p() as u64;
    Ok(PabReport {
        q,
        size_p: p.len() as u64,
        size_pab: pab.len() as u64,
        holds: pab.len() as u128 >= q as u128 * p.len() as u128,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::{SlGroup, WeylElem};
    use crate::random::{random_subset, rng};
    use crate::DEFAULT_BUDGET;

    fn setup(p: u64) -> (SlGroup, ElemSet, ElemSet) {
        let g = SlGroup::new(2, p).unwrap();
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let b = g.borel().unwrap();
        (g, all, b)
    }

    /// Exhaustive oracle: try every g in the group.
    fn delta_oracle(a: &ElemSet, p: &ElemSet, all: &ElemSet) -> u64 {
        all.iter()
            .filter(|g| !p.contains(g))
            .map(|g| a.intersection(&p.left_translate(g)).len() as u64)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn delta_trivial_cases() {
        let (g, all, b) = setup(5);
        assert_eq!(max_coset_intersection(&b, &b).unwrap().delta, 0);
        let x = all.iter().find(|x| !b.contains(x)).unwrap();
        let coset = b.left_translate(x);
        let ci = max_coset_intersection(&coset, &b).unwrap();
        assert_eq!(ci.delta, 20);
        assert!(coset.contains(&ci.witness.unwrap()));
        let _ = g;
    }

    #[test]
    fn delta_matches_exhaustive_scan() {
        let (_, all, b) = setup(7);
        let mut r = rng(11);
        for _ in 0..10 {
            let a = random_subset(&all, 50, &mut r);
            assert_eq!(max_coset_intersection(&a, &b).unwrap().delta, delta_oracle(&a, &b, &all));
        }
    }

    #[test]
    fn growth_for_subgroup_itself() {
        let (_, _, b) = setup(7);
        let rep = verify_growth(&b, &b).unwrap();
        assert_eq!((rep.size_ap, rep.size_pa), (42, 42));
        assert!(rep.alt_small && rep.holds());
    }

    #[test]
    fn growth_for_disjoint_sets() {
        let (_, all, b) = setup(7);
        let comp = all.difference(&b);
        let mut r = rng(12);
        for k in [1, 5, 20, 42] {
            let a = random_subset(&comp, k, &mut r);
            let rep = verify_growth(&a, &b).unwrap();
            assert_eq!(rep.size_a_cap_p, 0);
            let m = rep.size_ap.max(rep.size_pa) as u128;
            assert!(4 * m * m >= (k as u128) * 42 * 7);
            assert!(rep.holds());
        }
    }

    #[test]
    fn tightness_fixture() {
        for p in [5u64, 7, 11] {
            let (g, _, b) = setup(p);
            let w = ElemSet::singleton(g, g.weyl_rep(&WeylElem::reflection(2, 1).unwrap()));
            let a = b.union(&product_many(&[&b, &w, &b]).unwrap());
            assert_eq!(a.len(), b.len() * (1 + p as usize));
            let rep = verify_growth(&a, &b).unwrap();
            assert_eq!(rep.size_ap, a.len() as u64);
            assert_eq!(rep.size_pa, a.len() as u64);
            assert!(rep.holds());
        }
    }

    #[test]
    fn apa_cases() {
        let (g, all, b) = setup(7);
        let one = ElemSet::singleton(g, g.identity());
        let rep = verify_apa(&one, &b).unwrap();
        assert_eq!(rep.size_apa, 42);
        assert!(rep.holds);
        let mut r = rng(13);
        for _ in 0..10 {
            assert!(verify_apa(&random_subset(&all, 30, &mut r), &b).unwrap().holds);
        }
        let x = all.iter().find(|x| !b.contains(x)).unwrap();
        let rep = verify_apa(&b.left_translate(x), &b).unwrap();
        assert_eq!(rep.sigma_left, 42 * 42);
        assert!(rep.holds);
    }

    #[test]
    fn pab_cases() {
        let (g, all, b) = setup(5);
        let w = ElemSet::singleton(g, g.weyl_rep(&WeylElem::reflection(2, 1).unwrap()));
        let rep = verify_pab(&w, &b, &b).unwrap();
        assert_eq!(rep.size_pab, 100);
        assert!(rep.holds);
        assert!(matches!(verify_pab(&b, &b, &b), Err(Error::Precondition(_))));
        let (g7, all7, b7) = setup(7);
        let x = *all7.iter().find(|x| !b7.contains(x)).unwrap();
        let rep = verify_pab(&ElemSet::singleton(g7, x), &b7, &b7).unwrap();
        assert!(rep.size_pab >= 7 * 42);
        let _ = all;
    }
}
