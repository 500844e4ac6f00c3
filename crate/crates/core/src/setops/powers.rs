use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{product, product_many, ElemSet};
use crate::error::{Error, Result};
use crate::matgrp::SlGroup;

/// Result of iterating `A, A², …` against a target set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerIntersect {
    /// Smallest `n` with `Aⁿ ∩ P ≠ ∅`.
    pub first: Option<u32>,
    /// `|A|, |A²|, …` up to the last power computed.
    pub sizes: Vec<u64>,
    /// Set when `A^{n+1} = Aⁿ` was observed before `n_max`.
    pub stabilized_at: Option<u32>,
}

pub fn power_intersect(a: &ElemSet, p: &ElemSet, n_max: u32) -> Result<PowerIntersect> {
    a.check_same(p)?;
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut out = PowerIntersect { first: None, sizes: Vec::new(), stabilized_at: None };
    if a.is_empty() {
        return Ok(out);
    }
    let mut cur = a.clone();
    for n in 1..=n_max {
        out.sizes.push(cur.len() as u64);
        if cur.intersects(p) {
            out.first = Some(n);
            break;
        }
        if n == n_max {
            break;
        }
        let next = product(&cur, a)?;
        if next == cur {
            out.stabilized_at = Some(n);
            break;
        }
        cur = next;
    }
    Ok(out)
}

/// Numeric side and brute-force side of the quasirandom intersection
/// criterion `q|X||P|³ d^{n+2} Π|Y_j| ≥ 4|G|^{n+4} ⇒ XY_1…Y_nX ∩ P ≠ ∅`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasirandomReport {
    pub n: u32,
    pub condition_holds: bool,
    pub intersection_nonempty: bool,
}

impl QuasirandomReport {
    pub fn implication_ok(&self) -> bool {
        !self.condition_holds || self.intersection_nonempty
    }
}

pub fn quasirandom_check(x: &ElemSet, ys: &[ElemSet], p: &ElemSet, d_min: u64) -> Result<QuasirandomReport> {
    for y in ys {
        x.check_same(y)?;
    }
    x.check_same(p)?;
    if x.intersects(p) {
        return Err(Error::Precondition("X meets P".into()));
    }
    if x.is_empty() || ys.iter().any(ElemSet::is_empty) {
        return Err(Error::Precondition("X and every Y_j must be nonempty".into()));
    }
    let grp = x.group();
    let n = ys.len() as u32;
    let big = |v: u128| BigUint::from(v);
    let mut lhs = big(grp.p() as u128) * big(x.len() as u128) * big(p.len() as u128).pow(3);
    lhs *= big(d_min as u128).pow(n + 2);
    for y in ys {
        lhs *= big(y.len() as u128);
    }
    let rhs = big(4) * big(grp.order()?).pow(n + 4);
    // XY_1…Y_nX meets P iff XY_1…Y_n meets PX⁻¹
    let mut chain = vec![x];
    chain.extend(ys.iter());
    let left = product_many(&chain)?;
    let right = product(p, &x.inverse())?;
    Ok(QuasirandomReport { n, condition_holds: lhs >= rhs, intersection_nonempty: left.intersects(&right) })
}

/// `|AA|/|A|` and `|AAA|/|A|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriplingStats {
    pub size_a: u64,
    pub size_aa: u64,
    pub size_aaa: u64,
    pub doubling: f64,
    pub tripling: f64,
}

pub fn tripling(a: &ElemSet, budget: u128) -> Result<TriplingStats> {
    if a.is_empty() {
        return Err(Error::Domain("empty set".into()));
    }
    let na = a.len() as u128;
    let needed = na * na.min(a.group().order()?) * 2;
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let aa = product(a, a)?;
    let aaa = product(&aa, a)?;
    let f = a.len() as f64;
    Ok(TriplingStats {
        size_a: a.len() as u64,
        size_aa: aa.len() as u64,
        size_aaa: aaa.len() as u64,
        doubling: aa.len() as f64 / f,
        tripling: aaa.len() as f64 / f,
    })
}

/// Upper-triangular, non-diagonal elements of `SL_2(F_p)` whose nonzero
/// entries are all quadratic residues; requires `p ≡ 3 (mod 4)`.
pub fn qr_fixture(p: u64) -> Result<ElemSet> {
    let grp = SlGroup::new(2, p)?;
    if p % 4 != 3 {
        return Err(Error::Precondition(format!("{p} is not 3 mod 4")));
    }
    let f = grp.field();
    let qr: Vec<_> = f.nonzero().filter(|&x| f.is_qr(x)).collect();
    let mut out = Vec::with_capacity(qr.len() * qr.len());
    for &lam in &qr {
        let li = f.inv(lam)?;
        for &u in &qr {
            out.push(grp.raw_elem(&[lam.value(), u.value(), 0, li.value()]));
        }
    }
    Ok(ElemSet::from_vec(grp, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::SubgroupKind;
    use crate::random::{random_subset, rng};
    use crate::DEFAULT_BUDGET;

    #[test]
    fn qr_fixture_properties() {
        for p in [7u64, 11] {
            let a = qr_fixture(p).unwrap();
            let g = a.group();
            let lower = g.subgroup(&SubgroupKind::LowerBorel, DEFAULT_BUDGET).unwrap();
            assert_eq!(a.len() as u64, ((p - 1) / 2).pow(2));
            assert!(!a.intersects(&lower));
            assert!(!product(&a, &a).unwrap().intersects(&lower));
            let pi = power_intersect(&a, &lower, 10).unwrap();
            assert!(pi.first.unwrap() >= 3);
        }
        assert!(matches!(qr_fixture(5), Err(Error::Precondition(_))));
    }

    #[test]
    fn power_intersect_trivial() {
        let g = SlGroup::new(2, 5).unwrap();
        let b = g.borel().unwrap();
        assert_eq!(power_intersect(&b, &b, 3).unwrap().first, Some(1));
        let u = g.subgroup(&SubgroupKind::Unipotent, DEFAULT_BUDGET).unwrap();
        let lower = g.subgroup(&SubgroupKind::LowerBorel, DEFAULT_BUDGET).unwrap();
        let shifted = u.difference(&ElemSet::singleton(g, g.identity()));
        let pi = power_intersect(&shifted, &lower, 10).unwrap();
        assert_eq!(pi.first, Some(2));
    }

    #[test]
    fn power_intersect_stabilizes() {
        let g = SlGroup::new(2, 7).unwrap();
        let u = g.subgroup(&SubgroupKind::Unipotent, DEFAULT_BUDGET).unwrap();
        let t = g.subgroup(&SubgroupKind::Torus, DEFAULT_BUDGET).unwrap();
        let target = t.difference(&ElemSet::singleton(g, g.identity()));
        let pi = power_intersect(&u, &target, 10).unwrap();
        assert_eq!(pi.first, None);
        assert_eq!(pi.stabilized_at, Some(1));
    }

    #[test]
    fn quasirandom_full_complement() {
        let g = SlGroup::new(2, 5).unwrap();
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let b = g.borel().unwrap();
        let x = all.difference(&b);
        // each extra factor Y = G gains d_min·|G| on the left and |G| on the right
        let rep = quasirandom_check(&x, &vec![all.clone(); 5], &b, 2).unwrap();
        assert!(!rep.condition_holds);
        let rep = quasirandom_check(&x, &vec![all.clone(); 6], &b, 2).unwrap();
        assert!(rep.condition_holds && rep.intersection_nonempty);
        let rep = quasirandom_check(&x, std::slice::from_ref(&all), &b, 2).unwrap();
        assert!(!rep.condition_holds && rep.intersection_nonempty);
        let tiny = random_subset(&x, 2, &mut rng(3));
        let rep = quasirandom_check(&tiny, std::slice::from_ref(&tiny), &b, 2).unwrap();
        assert!(!rep.condition_holds);
        assert!(quasirandom_check(&b, &[all], &b, 2).is_err());
    }

    #[test]
    fn tripling_cases() {
        let g = SlGroup::new(2, 11).unwrap();
        let b = g.borel().unwrap();
        let s = tripling(&b, DEFAULT_BUDGET).unwrap();
        assert_eq!((s.doubling, s.tripling), (1.0, 1.0));
        let all = g.enumerate(DEFAULT_BUDGET).unwrap();
        let a = random_subset(&all, 30, &mut rng(9));
        assert!(tripling(&a, DEFAULT_BUDGET).unwrap().tripling > 1.0);
        assert!(matches!(tripling(&a, 10), Err(Error::Budget { .. })));
    }
}
