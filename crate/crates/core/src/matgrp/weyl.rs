use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GroupElem, SlGroup};
use crate::error::{Error, Result};

/// An element of the Weyl group of type `A_{n-1}`, i.e. a permutation of
/// `{0..n}` in one-line notation: `perm[j]` is the image of `j`.
///
/// The signed permutation matrix of `w` has its nonzero in column `j` at
/// row `perm[j]`, so matrix multiplication corresponds to composition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylElem {
    perm: Vec<u8>,
}

impl WeylElem {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n as u8).collect() }
    }

    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in images {
            if i >= n || seen[i] {
                return Err(Error::Domain(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { perm: images.iter().map(|&i| i as u8).collect() })
    }

    /// The fundamental reflection `s_r` swapping `r-1` and `r` (0-based),
    /// for `r` in `1..n`.
    pub fn reflection(n: usize, r: usize) -> Result<Self> {
        if r == 0 || r >= n {
            return Err(Error::Domain(format!("reflection index {r} outside 1..{n}")));
        }
        let mut w = Self::identity(n);
        w.perm.swap(r - 1, r);
        Ok(w)
    }

    /// The reversal, of length `n(n-1)/2`.
    pub fn longest(n: usize) -> Self {
        Self { perm: (0..n as u8).rev().collect() }
    }

    /// All of `S_n`, lexicographic in one-line notation.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(Self { perm: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn image(&self, j: usize) -> usize {
        self.perm[j] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.perm.iter().map(|&x| x as usize).collect()
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        Self { perm: other.perm.iter().map(|&j| self.perm[j as usize]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.n()];
        for (j, &i) in self.perm.iter().enumerate() {
            inv[i as usize] = j as u8;
        }
        Self { perm: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &i)| j == i as usize)
    }

    /// Pairs `i < j` with `perm[i] > perm[j]`: the positive roots
    /// `e_i - e_j` sent negative.
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.perm[i] > self.perm[j])
            .collect()
    }

    pub fn length(&self) -> usize {
        self.inversions().len()
    }

    pub fn is_odd(&self) -> bool {
        self.length() % 2 == 1
    }

    /// Whether `w` lies in the parabolic subgroup `W_J`, i.e. preserves
    /// every block of the composition induced by `J`.
    pub fn in_parabolic(&self, blocks: &[usize]) -> bool {
        self.perm.iter().enumerate().all(|(j, &i)| blocks[j] == blocks[i as usize])
    }
}

pub fn weyl_length(w: &WeylElem) -> usize {
    w.length()
}

impl fmt::Debug for WeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WeylElem {
    /// 1-based one-line notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.perm.iter().map(|&i| (i + 1).to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl SlGroup {
    /// Fixed representative of `w` in `SL_n`: the permutation matrix, with
    /// the entry in the last row that `w` moves negated when `w` is odd.
    pub fn weyl_rep(&self, w: &WeylElem) -> GroupElem {
        let n = self.n();
        assert_eq!(w.n(), n, "Weyl element of the wrong rank");
        let mut g = self.blank();
        for j in 0..n {
            g.set(w.image(j), j, 1 % self.p());
        }
        if w.is_odd() {
            let row = (0..n).rev().find(|&r| w.image(r) != r).expect("odd => moves something");
            let col = w.inverse().image(row);
            g.set(row, col, self.p() - 1);
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert_eq!(WeylElem::identity(3).length(), 0);
        assert_eq!(WeylElem::longest(3).length(), 3);
        assert_eq!(WeylElem::reflection(3, 1).unwrap().length(), 1);
        assert_eq!(WeylElem::longest(4).length(), 6);
    }

    #[test]
    fn length_zero_iff_identity() {
        for n in 2..=4 {
            for w in WeylElem::all(n) {
                assert_eq!(w.length() == 0, w.is_identity());
            }
        }
    }

    #[test]
    fn all_permutations() {
        assert_eq!(WeylElem::all(3).len(), 6);
        assert_eq!(WeylElem::all(4).len(), 24);
        // length generating function of S_3 is 1 + 2q + 2q^2 + q^3
        let mut by_len = [0; 4];
        for w in WeylElem::all(3) {
            by_len[w.length()] += 1;
        }
        assert_eq!(by_len, [1, 2, 2, 1]);
    }

    #[test]
    fn composition_matches_matrices() {
        let g = SlGroup::new(3, 5).unwrap();
        for a in WeylElem::all(3) {
            for b in WeylElem::all(3) {
                let m = g.mul(&g.weyl_rep(&a), &g.weyl_rep(&b));
                // same permutation pattern as the composed element, up to signs
                let c = a.compose(&b);
                for j in 0..3 {
                    assert_ne!(m.get(c.image(j), j), 0);
                }
            }
        }
    }

    #[test]
    fn representatives_have_det_one() {
        for (n, p) in [(2usize, 5u64), (3, 3), (4, 7), (3, 2)] {
            let g = SlGroup::new(n, p).unwrap();
            for w in WeylElem::all(n) {
                assert_eq!(g.det_of(&g.weyl_rep(&w)), 1, "{w} in {g}");
            }
        }
        let g = SlGroup::new(2, 7).unwrap();
        let s = g.weyl_rep(&WeylElem::reflection(2, 1).unwrap());
        assert_eq!(s, g.from_rows(&[[0i64, 1], [-1, 0]]).unwrap());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(WeylElem::from_images(&[0, 0, 1]).is_err());
        assert!(WeylElem::reflection(3, 3).is_err());
    }
}
