use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AffElem, AffGroup, CMatrix, RepLabel};
use crate::error::{Error, Result};

const TOL: f64 = 1e-9;
const POWER_TOL: f64 = 1e-12;
const POWER_CAP: usize = 100_000;

/// `f̂(ρ)` for every `ρ`, in the order of [`AffGroup::labels`].
#[derive(Clone, Debug, PartialEq)]
pub struct FourierData {
    pub blocks: Vec<(RepLabel, CMatrix)>,
}

impl FourierData {
    pub fn get(&self, label: RepLabel) -> Option<&CMatrix> {
        self.blocks.iter().find(|(l, _)| *l == label).map(|(_, m)| m)
    }

    pub fn zeros(g: &AffGroup) -> Self {
        Self { blocks: g.labels().into_iter().map(|l| (l, CMatrix::zeros(g.dim(l), g.dim(l)))).collect() }
    }
}

/// `lhs`/`rhs` of an identity with its verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * a.abs().max(b.abs())
}

impl AffGroup {
    fn check_table(&self, f: &[Complex64]) -> Result<()> {
        if f.len() != self.order() {
            return Err(Error::Domain(format!("function table has {} entries, expected {}", f.len(), self.order())));
        }
        Ok(())
    }

    /// `f̂(ρ) = Σ_g f(g) ρ(g)`.
    pub fn fourier(&self, f: &[Complex64]) -> Result<FourierData> {
        self.check_table(f)?;
        let p = self.p() as u64;
        let blocks = self
            .labels()
            .into_par_iter()
            .map(|label| {
                let m = match label {
                    RepLabel::OneDim(j) => {
                        let s: Complex64 =
                            self.elements().zip(f).map(|(g, &v)| v * self.character(j, g.a)).sum();
                        CMatrix::from_element(1, 1, s)
                    }
                    RepLabel::Big => {
                        let d = p as usize - 1;
                        let mut m = CMatrix::zeros(d, d);
                        for (g, &v) in self.elements().zip(f) {
                            if v == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            for x in 1..p {
                                let y = (g.a as u64 * x) % p;
                                m[(x as usize - 1, y as usize - 1)] += v * self.root(g.b as u64 * x);
                            }
                        }
                        m
                    }
                };
                (label, m)
            })
            .collect();
        Ok(FourierData { blocks })
    }

    /// `f(g) = (1/|G|) Σ_ρ d_ρ tr(f̂(ρ) ρ(g⁻¹))`.
    pub fn inverse(&self, data: &FourierData) -> Result<Vec<Complex64>> {
        let p = self.p() as u64;
        for (l, m) in &data.blocks {
            let d = self.dim(*l);
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Domain(format!("block {l} has shape {}x{}", m.nrows(), m.ncols())));
            }
        }
        let n = self.order() as f64;
        let out = (0..self.order())
            .into_par_iter()
            .map(|i| {
                let gi = self.inv(&self.from_index(i));
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, m) in &data.blocks {
                    match *l {
                        RepLabel::OneDim(j) => acc += m[(0, 0)] * self.character(j, gi.a),
                        RepLabel::Big => {
                            // tr(F R) with R[x][ax] = e(bx/p): Σ_x F[ax][x] e(bx/p)
                            let d = p as usize - 1;
                            let mut tr = Complex64::new(0.0, 0.0);
                            for x in 1..p {
                                let y = (gi.a as u64 * x) % p;
                                tr += m[(y as usize - 1, x as usize - 1)] * self.root(gi.b as u64 * x);
                            }
                            acc += tr * d as f64;
                        }
                    }
                }
                acc / n
            })
            .collect();
        Ok(out)
    }

    /// `Σ_g |f(g)|²` against `(1/|G|) Σ_ρ d_ρ ‖f̂(ρ)‖²`.
    pub fn parseval_check(&self, f: &[Complex64]) -> Result<CheckOutcome> {
        let data = self.fourier(f)?;
        let lhs: f64 = f.iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = data.blocks.iter().map(|(l, m)| self.dim(*l) as f64 * m.norm_squared()).sum::<f64>()
            / self.order() as f64;
        Ok(CheckOutcome { lhs, rhs, pass: rel_close(lhs, rhs) })
    }

    /// Max pointwise error of `inverse(fourier(f))` relative to `max |f|`.
    pub fn inversion_check(&self, f: &[Complex64]) -> Result<CheckOutcome> {
        let back = self.inverse(&self.fourier(f)?)?;
        let err = f.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(CheckOutcome { lhs: err, rhs: scale, pass: err <= TOL * scale.max(1.0) })
    }

    /// `(f ∗ g)(x) = Σ_y f(y) g(y⁻¹x)`.
    pub fn convolve(&self, f: &[Complex64], g: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_table(f)?;
        self.check_table(g)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.order()];
        for (y, &fy) in self.elements().zip(f) {
            if fy == Complex64::new(0.0, 0.0) {
                continue;
            }
            // x = yz
            for (z, &gz) in self.elements().zip(g) {
                out[self.index(&self.mul(&y, &z))] += fy * gz;
            }
        }
        Ok(out)
    }

    /// Worst `‖(f∗g)^(ρ) − f̂(ρ)ĝ(ρ)‖ / (‖f̂(ρ)‖‖ĝ(ρ)‖)` over `ρ`.
    pub fn convolution_check(&self, f: &[Complex64], g: &[Complex64]) -> Result<CheckOutcome> {
        let conv = self.fourier(&self.convolve(f, g)?)?;
        let (ff, gg) = (self.fourier(f)?, self.fourier(g)?);
        let mut worst: f64 = 0.0;
        for ((_, c), ((_, a), (_, b))) in conv.blocks.iter().zip(ff.blocks.iter().zip(&gg.blocks)) {
            let prod = a * b;
            let scale = prod.norm().max(a.norm() * b.norm());
            let err = (c - &prod).norm();
            let rel = if scale == 0.0 { err } else { err / scale };
            worst = worst.max(rel);
        }
        Ok(CheckOutcome { lhs: worst, rhs: TOL, pass: worst <= TOL })
    }

    /// `‖f‖_W = (1/|G|) Σ_ρ d_ρ ‖f̂(ρ)‖` with the Hilbert–Schmidt norm.
    pub fn wiener_norm(&self, f: &[Complex64]) -> Result<f64> {
        let data = self.fourier(f)?;
        Ok(data.blocks.iter().map(|(l, m)| self.dim(*l) as f64 * m.norm()).sum::<f64>() / self.order() as f64)
    }

    pub fn wiener_norm_of_set(&self, set: &[AffElem]) -> Result<f64> {
        self.wiener_norm(&self.indicator(set))
    }
}

/// Largest singular value of `m`, by power iteration on `M*M`.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    if m.norm() == 0.0 {
        return Ok(0.0);
    }
    let a = m.adjoint() * m;
    // deterministic start with no special alignment
    let mut v = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618_033_988_7).fract(), 0.3 * (i as f64).sin()));
    v /= Complex64::from(v.norm());
    let mut lambda = 0.0f64;
    for _ in 0..POWER_CAP {
        let w = &a * &v;
        let wn = w.norm();
        if wn == 0.0 {
            return Err(Error::Numeric("power iteration collapsed to the kernel".into()));
        }
        let next_lambda = v.dotc(&w).re;
        v = w / Complex64::from(wn);
        if (next_lambda - lambda).abs() <= POWER_TOL * next_lambda.abs() {
            return Ok(next_lambda.max(0.0).sqrt());
        }
        lambda = next_lambda;
    }
    Err(Error::Numeric(format!("power iteration did not converge in {POWER_CAP} steps")))
}

impl FourierData {
    pub fn op_norm(&self, label: RepLabel) -> Result<f64> {
        let m = self.get(label).ok_or_else(|| Error::Domain(format!("no block {label}")))?;
        op_norm(m)
    }
}
