use serde::{Deserialize, Serialize};

use super::{SlGroup, WeylElem};
use crate::error::{Error, Result};
use crate::setops::ElemSet;

/// A parabolic subgroup `P_J`, given by a subset `J` of the fundamental
/// reflection indices `{1..n-1}`. `J = ∅` is the Borel subgroup and the
/// full index set is the whole group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParabolicSpec {
    n: usize,
    j: Vec<usize>,
}

impl ParabolicSpec {
    pub fn new(n: usize, j: &[usize]) -> Result<Self> {
        let mut j = j.to_vec();
        j.sort_unstable();
        j.dedup();
        if let Some(&bad) = j.iter().find(|&&r| r == 0 || r >= n) {
            return Err(Error::Domain(format!("reflection index {bad} outside 1..{n}")));
        }
        Ok(Self { n, j })
    }

    pub fn borel(n: usize) -> Self {
        Self { n, j: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self { n, j: (1..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.j
    }

    /// Block id of each coordinate. Reflection `r` glues `r-1` and `r`.
    pub fn blocks(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        for k in 1..self.n {
            out[k] = if self.j.contains(&k) { out[k - 1] } else { out[k - 1] + 1 };
        }
        out
    }

    /// Block sizes, i.e. the composition of `n` induced by `J`.
    pub fn composition(&self) -> Vec<usize> {
        let blocks = self.blocks();
        let mut sizes = vec![0usize; blocks.last().map_or(0, |b| b + 1)];
        for b in blocks {
            sizes[b] += 1;
        }
        sizes
    }

    /// Support pattern of the block upper-triangular stabilizer.
    pub fn pattern(&self) -> Vec<Vec<bool>> {
        let b = self.blocks();
        (0..self.n).map(|i| (0..self.n).map(|j| b[i] <= b[j]).collect()).collect()
    }

    /// `W_J`
    pub fn weyl_subgroup(&self) -> Vec<WeylElem> {
        let b = self.blocks();
        WeylElem::all(self.n).into_iter().filter(|w| w.in_parabolic(&b)).collect()
    }

    /// `(q-1)^{n-1} q^{n(n-1)/2} Σ_{w ∈ W_J} q^{l(w)}`
    pub fn order(&self, q: u64) -> Result<u128> {
        parabolic_order(&self.j, self.n, q)
    }
}

/// Order of `P_J` in `SL_n(F_q)` from the Bruhat cell sizes.
pub fn parabolic_order(j: &[usize], n: usize, q: u64) -> Result<u128> {
    let spec = ParabolicSpec::new(n, j)?;
    let overflow = || Error::Domain(format!("order of P_J in SL_{n}(F_{q}) overflows u128"));
    let q = q as u128;
    let torus = (q - 1).checked_pow((n - 1) as u32).ok_or_else(overflow)?;
    let unip = q.checked_pow((n * (n - 1) / 2) as u32).ok_or_else(overflow)?;
    let mut poincare = 0u128;
    for w in spec.weyl_subgroup() {
        let t = q.checked_pow(w.length() as u32).ok_or_else(overflow)?;
        poincare = poincare.checked_add(t).ok_or_else(overflow)?;
    }
    torus
        .checked_mul(unip)
        .and_then(|x| x.checked_mul(poincare))
        .ok_or_else(overflow)
}

/// The standard subgroups that can be materialized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupKind {
    /// Upper-triangular.
    Borel,
    /// Lower-triangular, i.e. the opposite Borel.
    LowerBorel,
    /// Upper unitriangular.
    Unipotent,
    /// Diagonal.
    Torus,
    Parabolic(ParabolicSpec),
    Whole,
}

impl SlGroup {
    pub fn subgroup(&self, kind: &SubgroupKind, budget: u128) -> Result<ElemSet> {
        let n = self.n();
        match kind {
            SubgroupKind::Borel => self.enumerate_pattern(&ParabolicSpec::borel(n).pattern(), budget),
            SubgroupKind::LowerBorel => {
                let pat: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| j <= i).collect()).collect();
                self.enumerate_pattern(&pat, budget)
            }
            SubgroupKind::Unipotent => {
                let b = self.subgroup(&SubgroupKind::Borel, budget)?;
                Ok(b.filter(|g| g.is_unipotent_upper()))
            }
            SubgroupKind::Torus => {
                let pat: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
                self.enumerate_pattern(&pat, budget)
            }
            SubgroupKind::Parabolic(spec) => {
                if spec.n() != n {
                    return Err(Error::Domain(format!("parabolic spec for n={} used in {self}", spec.n())));
                }
                self.enumerate_pattern(&spec.pattern(), budget)
            }
            SubgroupKind::Whole => self.enumerate(budget),
        }
    }

    pub fn borel(&self) -> Result<ElemSet> {
        self.subgroup(&SubgroupKind::Borel, crate::DEFAULT_BUDGET)
    }

    pub fn parabolic(&self, j: &[usize]) -> Result<ElemSet> {
        let spec = ParabolicSpec::new(self.n(), j)?;
        self.subgroup(&SubgroupKind::Parabolic(spec), crate::DEFAULT_BUDGET)
    }
}
