use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{AffElem, AffGroup};
use crate::error::{Error, Result};

/// Numeric condition `|A|ⁿ|Γ|² > q^{n+2}(q-1)²` and the two brute-force
/// intersections `Aⁿ ∩ zΓ`, `Aⁿ ∩ Γz`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cor32Report {
    pub n: u32,
    pub size_a: u64,
    pub size_gamma: u64,
    pub condition: bool,
    pub meets_left_coset: bool,
    pub meets_right_coset: bool,
}

impl Cor32Report {
    pub fn implication_ok(&self) -> bool {
        !self.condition || (self.meets_left_coset && self.meets_right_coset)
    }
}

/// Every nontrivial character is nontrivial somewhere on `Γ`, i.e. the
/// `a`-coordinates of `Γ` generate `F_p^*`.
pub fn has_character_condition(g: &AffGroup, gamma: &[AffElem]) -> bool {
    let n = g.chars().group_order();
    let k = gamma.iter().fold(n, |acc, x| acc.gcd(&g.chars().dlog(g.field().elem(x.a as i64)).unwrap()));
    k == 1
}

fn is_subgroup(g: &AffGroup, set: &[AffElem]) -> bool {
    let mut member = vec![false; g.order()];
    for x in set {
        member[g.index(x)] = true;
    }
    !set.is_empty() && set.iter().all(|x| set.iter().all(|y| member[g.index(&g.mul(x, y))]))
}

pub fn cor32_verify(g: &AffGroup, a: &[AffElem], gamma: &[AffElem], z: &AffElem, n: u32) -> Result<Cor32Report> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !is_subgroup(g, gamma) {
        return Err(Error::Precondition("Γ is not a subgroup".into()));
    }
    if !has_character_condition(g, gamma) {
        return Err(Error::Precondition("some nontrivial character is trivial on Γ".into()));
    }
    let q = BigUint::from(g.p());
    let lhs = BigUint::from(a.len()).pow(n) * BigUint::from(gamma.len()).pow(2);
    let rhs = q.pow(n + 2) * (q - 1u32).pow(2);
    let condition = lhs > rhs;

    // Aⁿ as a membership table
    let mut power = vec![false; g.order()];
    for x in a {
        power[g.index(x)] = true;
    }
    for _ in 1..n {
        let mut next = vec![false; g.order()];
        for (i, _) in power.iter().enumerate().filter(|(_, &m)| m) {
            let x = g.from_index(i);
            for y in a {
                next[g.index(&g.mul(&x, y))] = true;
            }
        }
        power = next;
    }
    let meets_left_coset = gamma.iter().any(|h| power[g.index(&g.mul(z, h))]);
    let meets_right_coset = gamma.iter().any(|h| power[g.index(&g.mul(h, z))]);
    Ok(Cor32Report {
        n,
        size_a: a.len() as u64,
        size_gamma: gamma.len() as u64,
        condition,
        meets_left_coset,
        meets_right_coset,
    })
}
