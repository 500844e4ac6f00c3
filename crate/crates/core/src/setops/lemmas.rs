use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{product_many, ElemSet};
use crate::error::{Error, Result};
use crate::matgrp::GroupElem;

/// `max_x r_{PgP}(x)` against `2|P|/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RpgpReport {
    pub q: u64,
    pub size_p: u64,
    pub max_r: u64,
    /// `|P ∩ gPg⁻¹|`
    pub conj_intersection: u64,
    /// `q · max_r ≤ 2|P|`
    pub holds: bool,
    /// `q · max_r = |P|`
    pub sharp: bool,
}

fn rpgp_report(p: &ElemSet, g: &GroupElem, max_r: u64) -> RpgpReport {
    let grp = p.group();
    let conj = grp.conjugate(g, p);
    let q = grp.p() as u64;
    let np = p.len() as u64;
    RpgpReport {
        q,
        size_p: np,
        max_r,
        conj_intersection: p.intersection(&conj).len() as u64,
        holds: q as u128 * max_r as u128 <= 2 * np as u128,
        sharp: q as u128 * max_r as u128 == np as u128,
    }
}

/// Exact maximum of `r_{PgP}` by counting all `|P|²` products `(ag)b`.
pub fn check_r_pgp(p: &ElemSet, g: &GroupElem) -> Result<RpgpReport> {
    if p.contains(g) {
        return Err(Error::Precondition(format!("{g} lies in P")));
    }
    let grp = p.group();
    let pg = p.right_translate(g);
    let mut counts: FxHashMap<GroupElem, u64> = FxHashMap::default();
    for x in pg.iter() {
        for y in p.iter() {
            *counts.entry(grp.mul(x, y)).or_insert(0) += 1;
        }
    }
    let max_r = counts.values().copied().max().unwrap_or(0);
    Ok(rpgp_report(p, g, max_r))
}

/// One double coset `PgP` with `g ∉ P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCosetEntry {
    pub rep: GroupElem,
    pub size: u64,
    pub report: RpgpReport,
}

/// `r_{PgP}` depends on `g` only through `PgP`, so one exhaustive count per
/// double coset covers every `g ∉ P`.
pub fn r_pgp_census(p: &ElemSet, budget: u128) -> Result<Vec<DoubleCosetEntry>> {
    let grp = p.group();
    let all = grp.enumerate(budget)?;
    let mut covered = p.clone();
    let mut out = Vec::new();
    for g in all.iter() {
        if covered.contains(g) {
            continue;
        }
        let cell = product_many(&[p, &ElemSet::singleton(grp, *g), p])?;
        let report = check_r_pgp(p, g)?;
        out.push(DoubleCosetEntry { rep: *g, size: cell.len() as u64, report });
        covered = covered.union(&cell);
    }
    Ok(out)
}

/// Both claims about a pair of subgroups `Γ1, Γ2 ≤ G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub group_order: u64,
    pub size_1: u64,
    pub size_2: u64,
    /// `max_{x,y} |xΓ1 ∩ Γ2y|`
    pub max_pairs: u64,
    /// `max_x |xΓ1 ∩ Γ2x|`
    pub max_diagonal: u64,
    pub size_cap: u64,
    pub maxima_agree: bool,
    /// `|Γ1 ∩ Γ2| · |G| ≥ |Γ1||Γ2|`
    pub cap_bound: bool,
}

pub fn subgroup_intersection(g1: &ElemSet, g2: &ElemSet, budget: u128) -> Result<IntersectionReport> {
    g1.check_same(g2)?;
    for s in [g1, g2] {
        if !s.is_subgroup() {
            return Err(Error::Precondition("argument is not a subgroup".into()));
        }
    }
    let grp = g1.group();
    let all = grp.enumerate(budget)?;
    // right cosets of Γ2, labelled by discovery order
    let mut right_id: FxHashMap<GroupElem, usize> = FxHashMap::default();
    let mut n_right = 0;
    for x in all.iter() {
        if right_id.contains_key(x) {
            continue;
        }
        for h in g2.iter() {
            right_id.insert(grp.mul(h, x), n_right);
        }
        n_right += 1;
    }
    let mut seen_left: FxHashMap<GroupElem, ()> = FxHashMap::default();
    let mut max_pairs = 0u64;
    for x in all.iter() {
        if seen_left.contains_key(x) {
            continue;
        }
        let coset = g1.left_translate(x);
        let mut hist = vec![0u64; n_right];
        for c in coset.iter() {
            seen_left.insert(*c, ());
            hist[right_id[c]] += 1;
        }
        max_pairs = max_pairs.max(hist.into_iter().max().unwrap_or(0));
    }
    let max_diagonal = all
        .iter()
        .map(|x| g1.iter().filter(|h| g2.contains(&grp.conj(x, h))).count() as u64)
        .max()
        .unwrap_or(0);
    let size_cap = g1.intersection(g2).len() as u64;
    Ok(IntersectionReport {
        group_order: all.len() as u64,
        size_1: g1.len() as u64,
        size_2: g2.len() as u64,
        max_pairs,
        max_diagonal,
        size_cap,
        maxima_agree: max_pairs == max_diagonal,
        cap_bound: size_cap as u128 * all.len() as u128 >= g1.len() as u128 * g2.len() as u128,
    })
}
