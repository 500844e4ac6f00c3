//! `SL_n(F_p)` for `2 <= n <= 4`: elements, the standard subgroups, the
//! type-A Weyl group and Bruhat normal forms.

mod bruhat;
mod subgroups;
mod weyl;

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::setops::ElemSet;

pub use bruhat::BruhatForm;
pub use subgroups::{parabolic_order, ParabolicSpec, SubgroupKind};
pub use weyl::{weyl_length, WeylElem};

pub const MAX_DIM: usize = 4;

/// An `n x n` matrix with determinant 1, entries stored canonically in
/// `[0, p)`, row-major in the first `n*n` slots. The modulus lives in the
/// [`SlGroup`] that produced the element.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem {
    n: u8,
    e: [u16; MAX_DIM * MAX_DIM],
}

impl GroupElem {
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.n as usize + j] as u32
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: u32) {
        self.e[i * self.n as usize + j] = v as u16;
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn is_lower_triangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == 0))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_upper_triangular() && self.is_lower_triangular()
    }

    pub fn is_unipotent_upper(&self) -> bool {
        self.is_upper_triangular() && (0..self.dim()).all(|i| self.get(i, i) == 1)
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "({})", rows.join(" | "))
    }
}

impl Serialize for GroupElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.rows();
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in &rows {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for GroupElem {
    /// Reads the nested-rows form. Entries are taken as given; pass the
    /// result through [`SlGroup::from_rows`] to validate against a modulus.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<u32>> = Vec::deserialize(d)?;
        let n = rows.len();
        if !(2..=MAX_DIM).contains(&n) || rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("expected a square matrix of size 2..=4"));
        }
        let mut g = GroupElem { n: n as u8, e: [0; MAX_DIM * MAX_DIM] };
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                let v = u16::try_from(v).map_err(serde::de::Error::custom)?;
                g.e[i * n + j] = v;
            }
        }
        Ok(g)
    }
}

/// The group `SL_n(F_p)` as an arithmetic context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlGroup {
    n: u8,
    field: PrimeField,
}

impl fmt::Display for SlGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SL_{}(F_{})", self.n, self.field.p())
    }
}

impl SlGroup {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Dimension(n));
        }
        let field = PrimeField::new(p)?;
        if p > u16::MAX as u64 {
            return Err(Error::Domain(format!("modulus {p} too large for matrix storage")));
        }
        Ok(Self { n: n as u8, field })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    fn blank(&self) -> GroupElem {
        GroupElem { n: self.n, e: [0; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(&self) -> GroupElem {
        let mut g = self.blank();
        for i in 0..self.n() {
            g.set(i, i, 1 % self.p());
        }
        g
    }

    /// Builds an element from integer rows, reducing mod p and checking
    /// that the determinant is 1.
    pub fn from_rows<R: AsRef<[i64]>>(&self, rows: &[R]) -> Result<GroupElem> {
        let n = self.n();
        if rows.len() != n || rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(Error::Domain(format!("expected a {n}x{n} matrix")));
        }
        let mut g = self.blank();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.as_ref().iter().enumerate() {
                g.set(i, j, self.field.elem(v).value());
            }
        }
        let d = self.det_of(&g);
        if d != 1 % self.p() {
            return Err(Error::Domain(format!("determinant is {d}, not 1")));
        }
        Ok(g)
    }

    /// Re-validates an element read from elsewhere (e.g. JSON).
    pub fn validate(&self, g: &GroupElem) -> Result<GroupElem> {
        let rows: Vec<Vec<i64>> =
            g.rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect();
        self.from_rows(&rows)
    }

    /// Packs raw entries without a determinant check. Callers guarantee det 1.
    pub(crate) fn raw_elem(&self, vals: &[u32]) -> GroupElem {
        let mut g = self.blank();
        for (k, &v) in vals.iter().enumerate() {
            g.e[k] = (v % self.p()) as u16;
        }
        g
    }

    #[inline]
    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        let p = self.p() as u64;
        let mut c = self.blank();
        if self.n == 2 {
            let (a0, a1, a2, a3) = (a.e[0] as u64, a.e[1] as u64, a.e[2] as u64, a.e[3] as u64);
            let (b0, b1, b2, b3) = (b.e[0] as u64, b.e[1] as u64, b.e[2] as u64, b.e[3] as u64);
            c.e[0] = ((a0 * b0 + a1 * b2) % p) as u16;
            c.e[1] = ((a0 * b1 + a1 * b3) % p) as u16;
            c.e[2] = ((a2 * b0 + a3 * b2) % p) as u16;
            c.e[3] = ((a2 * b1 + a3 * b3) % p) as u16;
            return c;
        }
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u64;
                for k in 0..n {
                    s += a.e[i * n + k] as u64 * b.e[k * n + j] as u64;
                }
                c.e[i * n + j] = (s % p) as u16;
            }
        }
        c
    }

    pub fn mul3(&self, a: &GroupElem, b: &GroupElem, c: &GroupElem) -> GroupElem {
        self.mul(&self.mul(a, b), c)
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        let p = self.p();
        if self.n == 2 {
            let mut c = self.blank();
            c.e[0] = a.e[3];
            c.e[1] = ((p - a.e[1] as u32) % p) as u16;
            c.e[2] = ((p - a.e[2] as u32) % p) as u16;
            c.e[3] = a.e[0];
            return c;
        }
        let rows = self.field_rows(a);
        let inv = invert_rows(self.field, rows).expect("elements of SL_n are invertible");
        self.elem_from_field_rows(&inv)
    }

    pub fn pow(&self, a: &GroupElem, mut e: u64) -> GroupElem {
        let mut acc = self.identity();
        let mut base = *a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `g x g^{-1}`
    pub fn conj(&self, g: &GroupElem, x: &GroupElem) -> GroupElem {
        self.mul3(g, x, &self.inv(g))
    }

    pub fn det_of(&self, g: &GroupElem) -> u32 {
        det_rows(self.field, self.field_rows(g))
    }

    fn field_rows(&self, g: &GroupElem) -> Vec<Vec<u32>> {
        g.rows()
    }

    fn elem_from_field_rows(&self, rows: &[Vec<u32>]) -> GroupElem {
        let mut g = self.blank();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                g.set(i, j, v);
            }
        }
        g
    }

    /// `|SL_n(F_p)|` from the order formula.
    pub fn order(&self) -> Result<u128> {
        ParabolicSpec::full(self.n()).order(self.p() as u64)
    }

    /// Every determinant-1 matrix, exactly once.
    ///
    /// This is a direct enumeration (rows chosen freely, last row solved
    /// from the cofactor equation), deliberately independent of the Bruhat
    /// machinery so it can serve as an oracle for the order formula.
    pub fn enumerate(&self, budget: u128) -> Result<ElemSet> {
        let n = self.n();
        self.enumerate_pattern(&vec![vec![true; n]; n], budget)
    }

    /// All det-1 matrices whose support lies inside `allowed`.
    pub(crate) fn enumerate_pattern(&self, allowed: &[Vec<bool>], budget: u128) -> Result<ElemSet> {
        let n = self.n();
        let p = self.p();
        let free: Vec<(usize, usize)> = (0..n - 1)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| allowed[i][j])
            .collect();
        let last: Vec<usize> = (0..n).filter(|&j| allowed[n - 1][j]).collect();
        if last.is_empty() {
            return Ok(ElemSet::empty(*self));
        }
        let work = (p as u128)
            .checked_pow((free.len() + last.len() - 1) as u32)
            .unwrap_or(u128::MAX);
        if work > budget {
            return Err(Error::Budget { needed: work, budget });
        }

        let mut out = Vec::new();
        let mut m = vec![vec![0u32; n]; n];
        let mut odo = vec![0u32; free.len()];
        loop {
            for (k, &(i, j)) in free.iter().enumerate() {
                m[i][j] = odo[k];
            }
            // Cofactors of the last row.
            let cof: Vec<u32> = (0..n)
                .map(|j| {
                    if !allowed[n - 1][j] {
                        return 0;
                    }
                    let minor: Vec<Vec<u32>> = (0..n - 1)
                        .map(|i| (0..n).filter(|&c| c != j).map(|c| m[i][c]).collect())
                        .collect();
                    let d = det_rows(self.field, minor);
                    if (n - 1 + j) % 2 == 1 {
                        self.field.neg(self.field.elem(d as i64)).value()
                    } else {
                        d
                    }
                })
                .collect();
            if let Some(&j0) = last.iter().find(|&&j| cof[j] != 0) {
                let others: Vec<usize> = last.iter().copied().filter(|&j| j != j0).collect();
                let c0_inv = self.field.inv(self.field.elem(cof[j0] as i64))?;
                let mut odo2 = vec![0u32; others.len()];
                loop {
                    let mut rhs = 1i64;
                    for (k, &j) in others.iter().enumerate() {
                        m[n - 1][j] = odo2[k];
                        rhs -= cof[j] as i64 * odo2[k] as i64;
                    }
                    let x = self.field.mul(self.field.elem(rhs), c0_inv);
                    m[n - 1][j0] = x.value();
                    for j in 0..n {
                        if !allowed[n - 1][j] {
                            m[n - 1][j] = 0;
                        }
                    }
                    out.push(self.elem_from_field_rows(&m));
                    if !advance(&mut odo2, p) {
                        break;
                    }
                }
            }
            if !advance(&mut odo, p) {
                break;
            }
        }
        Ok(ElemSet::from_vec(*self, out))
    }

    /// `{g s g^{-1} : s in S}`
    pub fn conjugate(&self, g: &GroupElem, set: &ElemSet) -> ElemSet {
        let gi = self.inv(g);
        ElemSet::from_iter(*self, set.iter().map(|s| self.mul3(g, s, &gi)))
    }
}

/// Odometer step over `[0, base)^k`; false once it wraps around.
fn advance(odo: &mut [u32], base: u32) -> bool {
    for d in odo.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Determinant of a square matrix over F_p by elimination.
pub(crate) fn det_rows(field: PrimeField, mut m: Vec<Vec<u32>>) -> u32 {
    let n = m.len();
    let mut det = field.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(piv, col);
            det = field.neg(det);
        }
        let pv = field.elem(m[col][col] as i64);
        det = field.mul(det, pv);
        let pinv = field.inv(pv).expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let factor = field.mul(field.elem(m[r][col] as i64), pinv);
            for c in col..n {
                let sub = field.mul(factor, field.elem(m[col][c] as i64));
                m[r][c] = field.sub(field.elem(m[r][c] as i64), sub).value();
            }
        }
    }
    det.value()
}

/// Gauss-Jordan inverse over F_p; `None` if singular.
pub(crate) fn invert_rows(field: PrimeField, mut m: Vec<Vec<u32>>) -> Option<Vec<Vec<u32>>> {
    let n = m.len();
    let mut inv: Vec<Vec<u32>> =
        (0..n).map(|i| (0..n).map(|j| u32::from(i == j) % field.p()).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(piv, col);
        inv.swap(piv, col);
        let pinv = field.inv(field.elem(m[col][col] as i64)).ok()?;
        for c in 0..n {
            m[col][c] = field.mul(field.elem(m[col][c] as i64), pinv).value();
            inv[col][c] = field.mul(field.elem(inv[col][c] as i64), pinv).value();
        }
        for r in 0..n {
            if r == col || m[r][col] == 0 {
                continue;
            }
            let f = field.elem(m[r][col] as i64);
            for c in 0..n {
                let a = field.mul(f, field.elem(m[col][c] as i64));
                m[r][c] = field.sub(field.elem(m[r][c] as i64), a).value();
                let b = field.mul(f, field.elem(inv[col][c] as i64));
                inv[r][c] = field.sub(field.elem(inv[r][c] as i64), b).value();
            }
        }
    }
    Some(inv)
}
