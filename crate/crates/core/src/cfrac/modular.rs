use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use super::{for_each_f, Alphabet};
use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::matgrp::{GroupElem, SlGroup};
use crate::setops::{energy, product, ElemSet};

/// Parity of the length `s` of the digit string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    Both,
}

impl Parity {
    fn admits(self, s: usize) -> bool {
        match self {
            Parity::Even => s.is_multiple_of(2),
            Parity::Odd => s % 2 == 1,
            Parity::Both => true,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            "both" => Ok(Parity::Both),
            _ => Err(Error::Domain(format!("unknown parity {s:?}"))),
        }
    }
}

/// Continuants of `F_𝒜(Q)` reduced mod `p` as raw row-major `GL_2` entries,
/// sorted and deduplicated. Odd strings have determinant `-1`.
pub fn matrix_tuples_mod_p(alphabet: &Alphabet, q_max: u64, p: u64, parity: Parity) -> Result<Vec<[u32; 4]>> {
    PrimeField::new(p)?;
    let mut out = Vec::new();
    for_each_f(alphabet, q_max, |d, u, v| {
        if parity.admits(d.len()) {
            // (p_{s-1}, q_{s-1}) is the fraction with the last digit removed
            let (pp, qp) = previous_convergent(d);
            out.push([(pp % p) as u32, (u % p) as u32, (qp % p) as u32, (v % p) as u32]);
        }
    });
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `(p_{s-1}, q_{s-1})` for the string `d`.
fn previous_convergent(d: &[u64]) -> (u64, u64) {
    let Some((_, head)) = d.split_last() else {
        // the identity: p_{-1} = 1, q_{-1} = 0
        return (1, 0);
    };
    let (mut p0, mut p1, mut q0, mut q1) = (1u64, 0u64, 0u64, 1u64);
    for &b in head {
        (p0, p1) = (p1, p0 + b * p1);
        (q0, q1) = (q1, q0 + b * q1);
    }
    (p1, q1)
}

/// The even-length continuants of `F_𝒜(Q)` mod `p`, a subset of `SL_2(F_p)`.
pub fn matrix_set_mod_p(alphabet: &Alphabet, q_max: u64, p: u64, parity: Parity) -> Result<ElemSet> {
    if parity != Parity::Even {
        return Err(Error::Domain(
            "odd-length continuants have determinant -1; use matrix_tuples_mod_p for GL_2 entries".into(),
        ));
    }
    let grp = SlGroup::new(2, p)?;
    let tuples = matrix_tuples_mod_p(alphabet, q_max, p, parity)?;
    Ok(ElemSet::from_vec(grp, tuples.iter().map(|t| grp.raw_elem(t)).collect()))
}

/// Sizes of the even and odd parts of `F_𝒜(Q)`.
pub fn parity_counts(alphabet: &Alphabet, q_max: u64) -> (u64, u64) {
    let mut c = [0u64; 2];
    for_each_f(alphabet, q_max, |d, _, _| c[d.len() % 2] += 1);
    (c[0], c[1])
}

fn integer_root(x: u64, k: u32) -> u64 {
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > x) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= x) {
        r += 1;
    }
    r
}

/// `Λ_k`: the construction of [`matrix_set_mod_p`] with `Q = ⌊(p-1)^{1/k}⌋`.
pub fn lambda_set(p: u64, alphabet: &Alphabet, k: u32) -> Result<ElemSet> {
    if k < 2 {
        return Err(Error::Domain("k must be at least 2".into()));
    }
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    matrix_set_mod_p(alphabet, integer_root(p - 1, k), p, Parity::Even)
}

/// Whether `Λ² ⊆ A` for `Λ = Λ_2` and `A` built with `Q = p - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaSquareReport {
    pub p: u64,
    pub size_lambda: usize,
    pub size_square: usize,
    pub size_a: usize,
    /// Elements of `Λ²` outside `A`.
    pub violations: usize,
}

impl LambdaSquareReport {
    pub fn contained(&self) -> bool {
        self.violations == 0
    }
}

pub fn lambda_square_check(p: u64, alphabet: &Alphabet) -> Result<LambdaSquareReport> {
    let lambda = lambda_set(p, alphabet, 2)?;
    let a = matrix_set_mod_p(alphabet, p - 1, p, Parity::Even)?;
    let sq = product(&lambda, &lambda)?;
    Ok(LambdaSquareReport {
        p,
        size_lambda: lambda.len(),
        size_square: sq.len(),
        size_a: a.len(),
        violations: sq.difference(&a).len(),
    })
}

/// Index of a point of `P^1(F_p)`: `[x : 1] ↦ x`, `[1 : 0] ↦ p`.
fn point(f: &PrimeField, x: u32, y: u32) -> u32 {
    if y == 0 {
        f.p()
    } else {
        f.mul(f.elem(x as i64), f.inv(f.elem(y as i64)).expect("nonzero")).value()
    }
}

/// `g · ∞`, the first column.
fn image_of_infinity(f: &PrimeField, g: &GroupElem) -> u32 {
    point(f, g.get(0, 0), g.get(1, 0))
}

/// `g · ξ` for a point index `ξ`.
fn act(f: &PrimeField, g: &GroupElem, xi: u32) -> u32 {
    let (x, y) = if xi == f.p() { (1, 0) } else { (xi as u64, 1) };
    let p = f.p() as u64;
    let nx = (g.get(0, 0) as u64 * x + g.get(0, 1) as u64 * y) % p;
    let ny = (g.get(1, 0) as u64 * x + g.get(1, 1) as u64 * y) % p;
    point(f, nx as u32, ny as u32)
}

fn histogram(n: usize, keys: impl Iterator<Item = u32>) -> Vec<u64> {
    let mut h = vec![0u64; n];
    for k in keys {
        h[k as usize] += 1;
    }
    h
}

/// Coset statistics of `A` against the upper Borel `B` of `SL_2(F_p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub p: u64,
    pub m: u64,
    pub size_a: u64,
    /// `σ_B(A, A^{-1})`
    pub sigma_a_ainv: u64,
    /// `σ_B(A^{-1}, A)`
    pub sigma_ainv_a: u64,
    /// `max_g |A ∩ gB|`
    pub max_left: u64,
    /// `max_g |A ∩ Bg|`
    pub max_right: u64,
    /// `max_{g,h} |A ∩ gBh|`
    pub max_double: u64,
    /// `σ_B(A, A^{-1}) ≤ p|A|`
    pub bound_a_ainv: bool,
    /// `σ_B(A^{-1}, A) ≤ M²p|A|`
    pub bound_ainv_a: bool,
    /// The sharper `σ_B(A^{-1}, A) ≤ Mp|A|`, recorded only.
    pub bound_ainv_a_sharp: bool,
    /// `max(max_left, max_right) ≤ Mp`
    pub bound_cosets: bool,
    /// `max_double / |A|`, recorded only.
    pub double_ratio: f64,
}

impl SigmaReport {
    pub fn holds(&self) -> bool {
        self.bound_a_ainv && self.bound_ainv_a && self.bound_cosets
    }
}

/// `B` is the stabiliser of `∞`, so `xy ∈ B` iff `y∞ = x^{-1}∞`, `A ∩ gB`
/// is the fibre of `a ↦ a∞` over `g∞` and `A ∩ Bg` the fibre of
/// `a ↦ a^{-1}∞`; `A ∩ gBh` is the set of `a` taking `h^{-1}∞` to `g∞`.
pub fn verify_sigma_bounds(a: &ElemSet, m: u64) -> Result<SigmaReport> {
    let grp = a.group();
    if grp.n() != 2 {
        return Err(Error::Dimension(grp.n()));
    }
    let f = grp.field();
    let p = grp.p() as u64;
    let n = p as usize + 1;
    let fwd = histogram(n, a.iter().map(|x| image_of_infinity(&f, x)));
    let bwd = histogram(n, a.iter().map(|x| image_of_infinity(&f, &grp.inv(x))));
    let sq = |h: &[u64]| h.iter().map(|c| c * c).sum::<u64>();
    let sigma_a_ainv = sq(&bwd);
    let sigma_ainv_a = sq(&fwd);
    let max_left = fwd.iter().copied().max().unwrap_or(0);
    let max_right = bwd.iter().copied().max().unwrap_or(0);
    let max_double = (0..=p as u32)
        .map(|xi| histogram(n, a.iter().map(|x| act(&f, x, xi))).into_iter().max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let size_a = a.len() as u64;
    Ok(SigmaReport {
        p,
        m,
        size_a,
        sigma_a_ainv,
        sigma_ainv_a,
        max_left,
        max_right,
        max_double,
        bound_a_ainv: sigma_a_ainv <= p * size_a,
        bound_ainv_a: sigma_ainv_a <= m * m * p * size_a,
        bound_ainv_a_sharp: sigma_ainv_a <= m * p * size_a,
        bound_cosets: max_left.max(max_right) <= m * p,
        double_ratio: if size_a == 0 { 0.0 } else { max_double as f64 / size_a as f64 },
    })
}

/// Energy and product-size statistics of `Λ` against `X ⊆ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaEnergyReport {
    pub m: u64,
    pub size_lambda: u64,
    pub size_x: u64,
    /// `E(Λ, X)`
    pub energy: u128,
    /// `E(Λ^{-1}, X)`
    pub energy_inv: u128,
    pub size_b_lambda: u64,
    pub size_lambda_b: u64,
    pub borel_order: u64,
    /// `E(Λ, X) = |Λ||X|`
    pub energy_exact: bool,
    /// `E(Λ^{-1}, X) ≤ M⁴|Λ||X|`
    pub energy_inv_bound: bool,
    /// `|BΛ| = |B||Λ|`
    pub b_lambda_exact: bool,
    /// `M⁴|ΛB| ≥ |B||Λ|`
    pub lambda_b_bound: bool,
}

impl LambdaEnergyReport {
    pub fn holds(&self) -> bool {
        self.energy_exact && self.energy_inv_bound && self.b_lambda_exact && self.lambda_b_bound
    }
}

pub fn lambda_energy_check(lambda: &ElemSet, x: &ElemSet, m: u64) -> Result<LambdaEnergyReport> {
    let grp = lambda.group();
    if grp.n() != 2 {
        return Err(Error::Dimension(grp.n()));
    }
    if !x.iter().all(|g| g.is_upper_triangular()) {
        return Err(Error::Precondition("X must lie in the upper Borel".into()));
    }
    let b = grp.borel()?;
    let (sl, sx, sb) = (lambda.len() as u64, x.len() as u64, b.len() as u64);
    let e = energy(lambda, x)?;
    let e_inv = energy(&lambda.inverse(), x)?;
    let size_b_lambda = product(&b, lambda)?.len() as u64;
    let size_lambda_b = product(lambda, &b)?.len() as u64;
    let m4 = (m as u128).pow(4);
    Ok(LambdaEnergyReport {
        m,
        size_lambda: sl,
        size_x: sx,
        energy: e,
        energy_inv: e_inv,
        size_b_lambda,
        size_lambda_b,
        borel_order: sb,
        energy_exact: e == (sl * sx) as u128,
        energy_inv_bound: e_inv <= m4 * (sl * sx) as u128,
        b_lambda_exact: size_b_lambda == sb * sl,
        lambda_b_bound: m4 * size_lambda_b as u128 >= (sb * sl) as u128,
    })
}

/// `|ABA|` and `|A^{-1}BA^{-1}|` relative to `p³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbaReport {
    pub p: u64,
    pub size_aba: u64,
    pub size_ainv_b_ainv: u64,
    pub ratio_aba: f64,
    pub ratio_ainv_b_ainv: f64,
}

/// For `B` the upper Borel, `x ∈ ABA` iff `x` maps some `a^{-1}∞` to some
/// `a∞`, which is tested for each `x ∈ SL_2(F_p)` (`budget` caps
/// `p³ - p`). Any other `B` is multiplied out, with `|A|²|B|` capped.
pub fn aba_size(a: &ElemSet, b: &ElemSet, budget: u128) -> Result<AbaReport> {
    let grp = a.group();
    if grp.n() != 2 {
        return Err(Error::Dimension(grp.n()));
    }
    let p = grp.p() as u64;
    let borel_order = p * (p - 1);
    let is_borel = b.len() as u64 == borel_order && b.iter().all(|g| g.is_upper_triangular());
    let (s1, s2) = if is_borel {
        let needed = (p * p * p - p) as u128;
        if needed > budget {
            return Err(Error::Budget { needed, budget });
        }
        let f = grp.field();
        let fwd: FxHashSet<u32> = a.iter().map(|x| image_of_infinity(&f, x)).collect();
        let bwd: FxHashSet<u32> = a.iter().map(|x| image_of_infinity(&f, &grp.inv(x))).collect();
        // A^{-1}BA^{-1} = (ABA)^{-1}; both are counted as a cross-check
        (hits(&grp, &bwd, &fwd), hits(&grp, &fwd, &bwd))
    } else {
        let needed = (a.len() as u128).pow(2) * b.len() as u128;
        if needed > budget {
            return Err(Error::Budget { needed, budget });
        }
        let ai = a.inverse();
        (product(&product(a, b)?, a)?.len() as u64, product(&product(&ai, b)?, &ai)?.len() as u64)
    };
    let p3 = (p * p * p) as f64;
    Ok(AbaReport { p, size_aba: s1, size_ainv_b_ainv: s2, ratio_aba: s1 as f64 / p3, ratio_ainv_b_ainv: s2 as f64 / p3 })
}

/// `#{x ∈ SL_2(F_p) : x(from) ∩ to ≠ ∅}`.
fn hits(grp: &SlGroup, from: &FxHashSet<u32>, to: &FxHashSet<u32>) -> u64 {
    use rayon::prelude::*;
    let f = grp.field();
    let p = grp.p();
    let mut to_mask = vec![false; p as usize + 1];
    for &t in to {
        to_mask[t as usize] = true;
    }
    let from: Vec<u32> = {
        let mut v: Vec<u32> = from.iter().copied().collect();
        v.sort_unstable();
        v
    };
    (0..p)
        .into_par_iter()
        .map(|a| {
            let mut n = 0u64;
            for b in 0..p {
                for c in 0..p {
                    let d = if a != 0 {
                        // d = (1 + bc) / a
                        let num = f.add(f.one(), f.mul(f.elem(b as i64), f.elem(c as i64)));
                        Some(f.mul(num, f.inv(f.elem(a as i64)).unwrap()).value())
                    } else {
                        None
                    };
                    let mut count = |d: u32| {
                        let x = grp.raw_elem(&[a, b, c, d]);
                        if from.iter().any(|&xi| to_mask[act(&f, &x, xi) as usize]) {
                            n += 1;
                        }
                    };
                    match d {
                        Some(d) => count(d),
                        // a = 0 forces bc = -1
                        None if c != 0 && f.mul(f.elem(b as i64), f.elem(c as i64)) == f.elem(-1) => {
                            (0..p).for_each(&mut count)
                        }
                        None => {}
                    }
                }
            }
            n
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::super::enumerate_f;
    use super::*;
    use crate::setops::{right_coset_counts, sigma};
    use crate::DEFAULT_BUDGET;

    fn five() -> Alphabet {
        Alphabet::up_to(5).unwrap()
    }

    #[test]
    fn even_parity_lands_in_sl2() {
        let a = matrix_set_mod_p(&five(), 100, 101, Parity::Even).unwrap();
        let grp = a.group();
        assert!(a.iter().all(|g| grp.det_of(g) == 1));
        let evens = enumerate_f(&five(), 100).iter().filter(|x| x.digits.len() % 2 == 0).count();
        // entries are below p, so reduction is injective
        assert_eq!(a.len(), evens);
        assert_eq!(parity_counts(&five(), 100).0 as usize, evens);
        for t in matrix_tuples_mod_p(&five(), 100, 101, Parity::Odd).unwrap() {
            let det = (t[0] as i64 * t[3] as i64 - t[1] as i64 * t[2] as i64).rem_euclid(101);
            assert_eq!(det, 100);
        }
        assert!(matrix_set_mod_p(&five(), 100, 101, Parity::Odd).is_err());
        assert!(matrix_set_mod_p(&five(), 0, 101, Parity::Even).unwrap().is_empty());
    }

    #[test]
    fn tuples_match_continuants() {
        let t = matrix_tuples_mod_p(&five(), 30, 31, Parity::Both).unwrap();
        let mut expect: Vec<[u32; 4]> = enumerate_f(&five(), 30)
            .iter()
            .map(|x| {
                let c = super::super::continuant(&x.digits).unwrap();
                let e: Vec<u32> = c.entries.iter().map(|v| u32::try_from(v % 31u32).unwrap()).collect();
                [e[0], e[1], e[2], e[3]]
            })
            .collect();
        expect.sort_unstable();
        expect.dedup();
        assert_eq!(t, expect);
    }

    #[test]
    fn lambda_construction() {
        let lam = lambda_set(101, &five(), 2).unwrap();
        assert!(lam.iter().all(|g| (0..2).all(|i| (0..2).all(|j| g.get(i, j) <= 10))));
        let a = matrix_set_mod_p(&five(), 100, 101, Parity::Even).unwrap();
        assert!(lam.is_subset(&a));
        assert_eq!(integer_root(100, 2), 10);
        assert_eq!(integer_root(99, 2), 9);
        assert_eq!(integer_root(1000, 3), 10);
        assert!(lambda_set(101, &five(), 1).is_err());
    }

    #[test]
    fn projective_statistics_match_brute_force() {
        for (p, m) in [(13u64, 3u64), (17, 2)] {
            let alpha = Alphabet::up_to(m).unwrap();
            let a = matrix_set_mod_p(&alpha, p - 1, p, Parity::Even).unwrap();
            let grp = a.group();
            let b = grp.borel().unwrap();
            let r = verify_sigma_bounds(&a, m).unwrap();
            assert_eq!(r.sigma_a_ainv, sigma(&b, &a, &a.inverse()).unwrap());
            assert_eq!(r.sigma_ainv_a, sigma(&b, &a.inverse(), &a).unwrap());
            let whole = grp.enumerate(DEFAULT_BUDGET).unwrap();
            let left = whole.iter().map(|g| a.intersection(&b.left_translate(g)).len() as u64).max().unwrap();
            let right = whole.iter().map(|g| a.intersection(&b.right_translate(g)).len() as u64).max().unwrap();
            assert_eq!((r.max_left, r.max_right), (left, right));
            if p == 13 {
                // max over g of the largest right-coset slice of g^{-1}A
                let double = whole
                    .iter()
                    .map(|g| {
                        let shifted = a.left_translate(&grp.inv(g));
                        right_coset_counts(&shifted, &b).into_iter().map(|(_, c)| c as u64).max().unwrap()
                    })
                    .max()
                    .unwrap();
                assert_eq!(r.max_double, double);
            }
        }
    }

    #[test]
    fn empty_set_statistics() {
        let grp = SlGroup::new(2, 11).unwrap();
        let r = verify_sigma_bounds(&ElemSet::empty(grp), 3).unwrap();
        assert_eq!((r.sigma_a_ainv, r.sigma_ainv_a, r.max_left, r.max_right, r.max_double), (0, 0, 0, 0, 0));
        assert!(r.holds());
    }

    #[test]
    fn energy_of_lambda_against_borel_subsets() {
        let lam = lambda_set(101, &five(), 2).unwrap();
        let grp = lam.group();
        let b = grp.borel().unwrap();
        let torus = b.filter(|g| g.is_diagonal());
        for x in [&torus, &b] {
            let r = lambda_energy_check(&lam, x, 5).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        let one = ElemSet::singleton(grp, grp.identity());
        let r = lambda_energy_check(&one, &torus, 5).unwrap();
        assert_eq!(r.energy, torus.len() as u128);
        let lower = ElemSet::singleton(grp, grp.from_rows(&[[1i64, 0], [1, 1]]).unwrap());
        assert!(lambda_energy_check(&lam, &lower, 5).is_err());
    }

    #[test]
    fn aba_fast_path_matches_products() {
        let p = 11;
        let alpha = Alphabet::up_to(3).unwrap();
        let a = matrix_set_mod_p(&alpha, p - 1, p, Parity::Even).unwrap();
        let grp = a.group();
        let b = grp.borel().unwrap();
        let fast = aba_size(&a, &b, DEFAULT_BUDGET).unwrap();
        let slow_aba = product(&product(&a, &b).unwrap(), &a).unwrap().len() as u64;
        let ai = a.inverse();
        let slow_inv = product(&product(&ai, &b).unwrap(), &ai).unwrap().len() as u64;
        assert_eq!((fast.size_aba, fast.size_ainv_b_ainv), (slow_aba, slow_inv));

        let one = ElemSet::singleton(grp, grp.identity());
        let r = aba_size(&one, &b, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.size_aba, b.len() as u64);
        assert!((r.ratio_aba - b.len() as f64 / 1331.0).abs() < 1e-12);
        let torus = b.filter(|g| g.is_diagonal());
        let r = aba_size(&a, &torus, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.size_aba, product(&product(&a, &torus).unwrap(), &a).unwrap().len() as u64);
        assert!(matches!(aba_size(&a, &b, 10), Err(Error::Budget { .. })));
    }
}
