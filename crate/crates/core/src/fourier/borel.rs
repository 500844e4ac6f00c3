use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use super::AffElem;
use crate::error::{Error, Result};
use crate::matgrp::{GroupElem, SlGroup};

/// `(λ u | 0 λ⁻¹) ↦ (λ², λu)`; the kernel is `±I`.
pub fn borel_embed(grp: &SlGroup, g: &GroupElem) -> Result<AffElem> {
    if grp.n() != 2 || g.dim() != 2 || !g.is_upper_triangular() {
        return Err(Error::Domain(format!("{g} is not in the upper Borel of SL_2")));
    }
    let f = grp.field();
    let lam = f.elem(g.get(0, 0) as i64);
    let u = f.elem(g.get(0, 1) as i64);
    Ok(AffElem { a: f.mul(lam, lam).value(), b: f.mul(lam, u).value() })
}

/// Conjugacy classes of the Borel of `SL_2(F_p)` counted by orbits,
/// alongside the representation dimensions `1^{p-1}, ((p-1)/2)^4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorelClassReport {
    pub p: u64,
    pub borel_order: u64,
    pub classes: u64,
    pub class_sizes: Vec<u64>,
    pub dims: Vec<u64>,
    /// `classes = p + 3`
    pub count_matches: bool,
    /// `Σ d² = |B|`
    pub dimension_identity: bool,
    /// `classes = number of dims`
    pub dims_match_classes: bool,
}

pub fn borel_rep_dimensions(p: u64) -> Vec<u64> {
    let mut d = vec![1; (p - 1) as usize];
    d.extend([(p - 1) / 2; 4]);
    d
}

pub fn borel_class_count(p: u64) -> Result<BorelClassReport> {
    if p == 2 {
        return Err(Error::Domain("p must be odd".into()));
    }
    let grp = SlGroup::new(2, p)?;
    let b = grp.borel()?;
    let mut seen: FxHashSet<GroupElem> = FxHashSet::default();
    let mut class_sizes = Vec::new();
    for x in b.iter() {
        if seen.contains(x) {
            continue;
        }
        let orbit: FxHashSet<GroupElem> = b.iter().map(|h| grp.conj(h, x)).collect();
        class_sizes.push(orbit.len() as u64);
        seen.extend(orbit);
    }
    let classes = class_sizes.len() as u64;
    let dims = borel_rep_dimensions(p);
    let borel_order = b.len() as u64;
    Ok(BorelClassReport {
        p,
        borel_order,
        classes,
        count_matches: classes == p + 3,
        dimension_identity: dims.iter().map(|d| d * d).sum::<u64>() == borel_order,
        dims_match_classes: dims.len() as u64 == classes,
        class_sizes,
        dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::AffGroup;

    #[test]
    fn embed_basics() {
        let grp = SlGroup::new(2, 7).unwrap();
        assert_eq!(borel_embed(&grp, &grp.identity()).unwrap(), AffElem { a: 1, b: 0 });
        let minus = grp.from_rows(&[[-1i64, 0], [0, -1]]).unwrap();
        assert_eq!(borel_embed(&grp, &minus).unwrap(), AffElem { a: 1, b: 0 });
        let lower = grp.from_rows(&[[1i64, 0], [1, 1]]).unwrap();
        assert!(borel_embed(&grp, &lower).is_err());
    }

    #[test]
    fn embed_is_a_homomorphism_with_kernel_pm1() {
        let grp = SlGroup::new(2, 7).unwrap();
        let aff = AffGroup::new(7).unwrap();
        let b = grp.borel().unwrap();
        for x in b.iter() {
            for y in b.iter() {
                let lhs = borel_embed(&grp, &grp.mul(x, y)).unwrap();
                let rhs = aff.mul(&borel_embed(&grp, x).unwrap(), &borel_embed(&grp, y).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        let kernel = b.iter().filter(|x| borel_embed(&grp, x).unwrap() == aff.identity()).count();
        assert_eq!(kernel, 2);
    }

    #[test]
    fn class_counts() {
        for p in [5u64, 7, 11, 13] {
            let r = borel_class_count(p).unwrap();
            assert_eq!(r.classes, p + 3);
            assert!(r.dimension_identity && r.dims_match_classes);
            assert_eq!(r.class_sizes.iter().sum::<u64>(), r.borel_order);
        }
        assert_eq!(borel_class_count(5).unwrap().classes, 8);
        assert!(borel_class_count(2).is_err());
    }
}
