use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GroupElem, SlGroup, WeylElem};
use crate::error::{Error, Result};
use crate::setops::ElemSet;

/// `g = b · ẇ · u` with `b ∈ B`, `ẇ` the fixed representative of `w`, and
/// `u ∈ U''_w` (supported on the inversions of `w`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruhatForm {
    pub b: GroupElem,
    pub w: WeylElem,
    pub u: GroupElem,
}

impl SlGroup {
    /// Whether `u` is upper unitriangular with off-diagonal support inside
    /// the inversion set of `w`.
    pub fn in_u_double_prime(&self, u: &GroupElem, w: &WeylElem) -> bool {
        if !u.is_unipotent_upper() {
            return false;
        }
        let n = self.n();
        (0..n).all(|i| (i + 1..n).all(|j| u.get(i, j) == 0 || w.image(i) > w.image(j)))
    }

    /// All of `U''_w`, which has `q^{l(w)}` elements.
    pub fn u_double_prime(&self, w: &WeylElem) -> ElemSet {
        let inv = w.inversions();
        let p = self.p();
        let total = (p as usize).pow(inv.len() as u32);
        let mut out = Vec::with_capacity(total);
        for mut code in 0..total {
            let mut u = self.identity();
            for &(i, j) in &inv {
                u.set(i, j, (code % p as usize) as u32);
                code /= p as usize;
            }
            out.push(u);
        }
        ElemSet::from_vec(*self, out)
    }

    /// Bruhat normal form by bottom-up row reduction.
    ///
    /// Adding multiples of lower rows to upper rows (left multiplication by
    /// `B`) clears every pivot column above its pivot; the pivot positions
    /// give `w`, and the reduced matrix, rescaled to the signs of `ẇ`, is
    /// `ẇ · u` with `u ∈ U''_w`.
    pub fn bruhat_decompose(&self, g: &GroupElem) -> BruhatForm {
        let n = self.n();
        let f = self.field;
        let mut m = g.rows();
        let mut pivot_col = vec![0usize; n];
        for r in (0..n).rev() {
            let c = (0..n).find(|&c| m[r][c] != 0).expect("rows of an invertible matrix are nonzero");
            pivot_col[r] = c;
            let pinv = f.inv(f.elem(m[r][c] as i64)).expect("nonzero pivot");
            for i in 0..r {
                if m[i][c] == 0 {
                    continue;
                }
                let factor = f.mul(f.elem(m[i][c] as i64), pinv);
                for k in 0..n {
                    let t = f.mul(factor, f.elem(m[r][k] as i64));
                    m[i][k] = f.sub(f.elem(m[i][k] as i64), t).value();
                }
            }
        }
        // pivot of row r sits in column c_r, so w(c_r) = r
        let mut images = vec![0usize; n];
        for (r, &c) in pivot_col.iter().enumerate() {
            images[c] = r;
        }
        let w = WeylElem::from_images(&images).expect("pivot columns are distinct");
        let wd = self.weyl_rep(&w);
        for r in 0..n {
            let c = pivot_col[r];
            let target = f.elem(wd.get(r, c) as i64);
            let scale = f.mul(target, f.inv(f.elem(m[r][c] as i64)).unwrap());
            for k in 0..n {
                m[r][k] = f.mul(scale, f.elem(m[r][k] as i64)).value();
            }
        }
        let reduced = self.elem_from_field_rows(&m);
        let u = self.mul(&self.inv(&wd), &reduced);
        let b = self.mul(g, &self.inv(&reduced));
        debug_assert!(b.is_upper_triangular());
        debug_assert!(self.in_u_double_prime(&u, &w));
        BruhatForm { b, w, u }
    }

    /// The Weyl element labelling the double coset `BwB` containing `g`.
    pub fn bruhat_cell(&self, g: &GroupElem) -> WeylElem {
        self.bruhat_decompose(g).w
    }

    /// Elements per Bruhat cell over the whole group.
    pub fn bruhat_cell_census(&self, budget: u128) -> Result<BTreeMap<WeylElem, u64>> {
        let all = self.enumerate(budget)?;
        let mut census: BTreeMap<WeylElem, u64> =
            WeylElem::all(self.n()).into_iter().map(|w| (w, 0)).collect();
        for g in all.iter() {
            *census.get_mut(&self.bruhat_cell(g)).unwrap() += 1;
        }
        Ok(census)
    }

    /// Checks `w_r B w ⊆ BwB ∪ B w_r w B` by walking all of `B`.
    pub fn check_inclusion_wrbw(&self, r: usize, w: &WeylElem) -> Result<bool> {
        if w.n() != self.n() {
            return Err(Error::Domain(format!("Weyl element {w} has the wrong rank for {self}")));
        }
        let sr = WeylElem::reflection(self.n(), r)?;
        let srw = sr.compose(w);
        let (srd, wd) = (self.weyl_rep(&sr), self.weyl_rep(w));
        let borel = self.borel()?;
        Ok(borel.iter().all(|b| {
            let cell = self.bruhat_cell(&self.mul3(&srd, b, &wd));
            cell == *w || cell == srw
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    #[test]
    fn upper_triangular_is_its_own_b() {
        let g = SlGroup::new(3, 5).unwrap();
        let x = g.from_rows(&[[2i64, 1, 4], [0, 3, 1], [0, 0, 1]]).unwrap();
        let f = g.bruhat_decompose(&x);
        assert_eq!(f.b, x);
        assert!(f.w.is_identity());
        assert_eq!(f.u, g.identity());
    }

    #[test]
    fn weyl_representative_decomposes_trivially() {
        let g = SlGroup::new(2, 7).unwrap();
        let x = g.from_rows(&[[0i64, 1], [-1, 0]]).unwrap();
        let f = g.bruhat_decompose(&x);
        assert_eq!(f.b, g.identity());
        assert_eq!(f.w, WeylElem::reflection(2, 1).unwrap());
        assert_eq!(f.u, g.identity());
    }

    #[test]
    fn small_example_matches_exhaustive_search() {
        let g = SlGroup::new(2, 5).unwrap();
        let x = g.from_rows(&[[0i64, 1], [4, 1]]).unwrap();
        let w = WeylElem::reflection(2, 1).unwrap();
        let wd = g.weyl_rep(&w);
        // exhaustive: all (b, u) in B x U''_w with b w u = x
        let borel = g.borel().unwrap();
        let hits: Vec<(GroupElem, GroupElem)> = borel
            .iter()
            .flat_map(|b| g.u_double_prime(&w).iter().map(move |u| (*b, *u)).collect::<Vec<_>>())
            .filter(|(b, u)| g.mul3(b, &wd, u) == x)
            .collect();
        assert_eq!(hits.len(), 1);
        let f = g.bruhat_decompose(&x);
        assert_eq!((f.b, f.u), hits[0]);
        assert_eq!(f.u, g.from_rows(&[[1i64, 4], [0, 1]]).unwrap());
        assert_eq!(f.b, g.identity());
    }

    #[test]
    fn round_trip_small_groups() {
        for (n, p) in [(2usize, 3u64), (2, 5), (2, 7), (3, 2), (3, 3), (4, 2)] {
            let g = SlGroup::new(n, p).unwrap();
            for x in g.enumerate(DEFAULT_BUDGET).unwrap().iter() {
                let f = g.bruhat_decompose(x);
                assert!(f.b.is_upper_triangular());
                assert!(g.in_u_double_prime(&f.u, &f.w));
                assert_eq!(g.mul3(&f.b, &g.weyl_rep(&f.w), &f.u), *x);
            }
        }
    }

    #[test]
    fn cells_have_expected_sizes() {
        let g = SlGroup::new(2, 3).unwrap();
        let c: Vec<u64> = g.bruhat_cell_census(DEFAULT_BUDGET).unwrap().into_values().collect();
        assert_eq!(c, vec![6, 18]);
        let g = SlGroup::new(2, 5).unwrap();
        let c: Vec<u64> = g.bruhat_cell_census(DEFAULT_BUDGET).unwrap().into_values().collect();
        assert_eq!(c, vec![20, 100]);
        let g = SlGroup::new(3, 2).unwrap();
        let census = g.bruhat_cell_census(DEFAULT_BUDGET).unwrap();
        assert_eq!(census.len(), 6);
        for (w, c) in &census {
            assert_eq!(*c, 8 << w.length());
        }
        assert_eq!(census.values().sum::<u64>(), 168);
    }

    #[test]
    fn inclusion_holds() {
        let g = SlGroup::new(2, 3).unwrap();
        assert!(g.check_inclusion_wrbw(1, &WeylElem::identity(2)).unwrap());
        let g = SlGroup::new(2, 5).unwrap();
        assert!(g.check_inclusion_wrbw(1, &WeylElem::reflection(2, 1).unwrap()).unwrap());
        let g = SlGroup::new(3, 2).unwrap();
        for r in 1..3 {
            for w in WeylElem::all(3) {
                assert!(g.check_inclusion_wrbw(r, &w).unwrap());
            }
        }
    }

    #[test]
    fn u_double_prime_sizes() {
        let g = SlGroup::new(3, 3).unwrap();
        for w in WeylElem::all(3) {
            let u = g.u_double_prime(&w);
            assert_eq!(u.len(), 3usize.pow(w.length() as u32));
            assert!(u.iter().all(|x| g.in_u_double_prime(x, &w)));
        }
    }
}
