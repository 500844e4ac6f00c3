//! Fourier analysis on the affine group `Aff(F_p) = {x ↦ ax + b : a ≠ 0}`.
//!
//! The unitary dual is `p - 1` characters `(a, b) ↦ χ_j(a)` together with one
//! representation `π` of dimension `p - 1`, realised on functions on
//! `F_p^*` by `(π(a, b) f)(x) = e(bx/p) f(ax)`.

mod borel;
mod cor32;
mod transform;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{root_of_unity, CharTable, PrimeField};

pub use borel::{borel_class_count, borel_embed, borel_rep_dimensions, BorelClassReport};
pub use cor32::{cor32_verify, has_character_condition, Cor32Report};
pub use transform::{op_norm, CheckOutcome, FourierData};

pub type CMatrix = DMatrix<Complex64>;

/// `x ↦ ax + b`, stored as raw residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffElem {
    pub a: u32,
    pub b: u32,
}

impl fmt::Display for AffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} | 0 1)", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RepLabel {
    OneDim(u32),
    Big,
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepLabel::OneDim(j) => write!(f, "chi_{j}"),
            RepLabel::Big => write!(f, "pi"),
        }
    }
}

/// `Aff(F_p)` for an odd or even prime `p` (the cap keeps `π` at most
/// `MAX_P - 1` square).
#[derive(Clone, Debug)]
pub struct AffGroup {
    field: PrimeField,
    chars: CharTable,
    // roots[k] = e(k/p)
    roots: Vec<Complex64>,
}

pub const MAX_P: u64 = 211;

impl AffGroup {
    pub fn new(p: u64) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if p > MAX_P {
            return Err(Error::Domain(format!("p = {p} exceeds the cap {MAX_P} for dense representations")));
        }
        let chars = CharTable::new(field)?;
        let roots = (0..p).map(|k| root_of_unity(k, p)).collect();
        Ok(Self { field, chars, roots })
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn order(&self) -> usize {
        let p = self.p() as usize;
        p * (p - 1)
    }

    pub fn elem(&self, a: i64, b: i64) -> Result<AffElem> {
        let a = self.field.elem(a).value();
        if a == 0 {
            return Err(Error::Domain("affine map with a = 0".into()));
        }
        Ok(AffElem { a, b: self.field.elem(b).value() })
    }

    pub fn identity(&self) -> AffElem {
        AffElem { a: 1, b: 0 }
    }

    /// `(a, b)(a', b') = (aa', ab' + b)`
    pub fn mul(&self, g: &AffElem, h: &AffElem) -> AffElem {
        let p = self.p() as u64;
        AffElem {
            a: ((g.a as u64 * h.a as u64) % p) as u32,
            b: ((g.a as u64 * h.b as u64 + g.b as u64) % p) as u32,
        }
    }

    pub fn inv(&self, g: &AffElem) -> AffElem {
        let f = self.field;
        let ai = f.inv(f.elem(g.a as i64)).expect("a is nonzero");
        let b = f.neg(f.mul(ai, f.elem(g.b as i64)));
        AffElem { a: ai.value(), b: b.value() }
    }

    /// Position of `g` in a function table.
    pub fn index(&self, g: &AffElem) -> usize {
        (g.a as usize - 1) * self.p() as usize + g.b as usize
    }

    pub fn from_index(&self, i: usize) -> AffElem {
        let p = self.p() as usize;
        AffElem { a: (i / p + 1) as u32, b: (i % p) as u32 }
    }

    /// All elements in table order.
    pub fn elements(&self) -> impl Iterator<Item = AffElem> + '_ {
        (0..self.order()).map(|i| self.from_index(i))
    }

    /// `χ_0 … χ_{p-2}` then `π`.
    pub fn labels(&self) -> Vec<RepLabel> {
        (0..self.p() - 1).map(RepLabel::OneDim).chain(std::iter::once(RepLabel::Big)).collect()
    }

    pub fn dim(&self, label: RepLabel) -> usize {
        match label {
            RepLabel::OneDim(_) => 1,
            RepLabel::Big => self.p() as usize - 1,
        }
    }

    pub(crate) fn chars(&self) -> &CharTable {
        &self.chars
    }

    /// `e(k/p)`
    pub(crate) fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.p() as u64) as usize]
    }

    pub(crate) fn character(&self, j: u32, a: u32) -> Complex64 {
        let n = self.chars.group_order() as u64;
        let phase = self.chars.character_phase(j, self.field.elem(a as i64)).expect("valid index and a ≠ 0");
        root_of_unity(phase as u64, n)
    }

    /// `ρ(g)` as a dense matrix. For `π`, row and column `x - 1` stand for
    /// `x ∈ F_p^*` and the only nonzero entry of row `x` is `e(bx/p)` in
    /// column `ax`.
    pub fn rep_eval(&self, label: RepLabel, g: &AffElem) -> Result<CMatrix> {
        match label {
            RepLabel::OneDim(j) => {
                if j >= self.p() - 1 {
                    return Err(Error::Domain(format!("no character with index {j}")));
                }
                Ok(CMatrix::from_element(1, 1, self.character(j, g.a)))
            }
            RepLabel::Big => {
                let d = self.p() as usize - 1;
                let mut m = CMatrix::zeros(d, d);
                for x in 1..=d as u64 {
                    let y = (g.a as u64 * x) % self.p() as u64;
                    m[(x as usize - 1, y as usize - 1)] = self.root(g.b as u64 * x);
                }
                Ok(m)
            }
        }
    }

    /// Indicator table of a set.
    pub fn indicator<'a>(&self, set: impl IntoIterator<Item = &'a AffElem>) -> Vec<Complex64> {
        let mut f = vec![Complex64::new(0.0, 0.0); self.order()];
        for g in set {
            f[self.index(g)] = Complex64::new(1.0, 0.0);
        }
        f
    }

    /// Point mass at `g`.
    pub fn delta(&self, g: &AffElem) -> Vec<Complex64> {
        self.indicator(std::iter::once(g))
    }

    /// The subgroup generated by `gens`, by closure.
    pub fn generated(&self, gens: &[AffElem]) -> Vec<AffElem> {
        let mut seen = vec![false; self.order()];
        let mut out = vec![self.identity()];
        seen[self.index(&self.identity())] = true;
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for g in gens {
                let y = self.mul(&x, g);
                let k = self.index(&y);
                if !seen[k] {
                    seen[k] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// `{(a, 0)}`
    pub fn torus(&self) -> Vec<AffElem> {
        (1..self.p()).map(|a| AffElem { a, b: 0 }).collect()
    }

    /// `{(1, b)}`
    pub fn unipotent(&self) -> Vec<AffElem> {
        (0..self.p()).map(|b| AffElem { a: 1, b }).collect()
    }

    pub fn whole(&self) -> Vec<AffElem> {
        self.elements().collect()
    }
}
