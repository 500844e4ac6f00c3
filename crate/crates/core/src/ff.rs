//! Prime-field arithmetic, primitive roots, discrete logs and characters.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial-division primality test. Inputs are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in `lo..=hi`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A residue modulo the field's prime, always in `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem(u32);

impl FieldElem {
    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field F_p. The modulus lives here, not in each element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = u32::try_from(p).map_err(|_| Error::Domain(format!("modulus {p} too large")))?;
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Reduces any integer into the field.
    #[inline]
    pub fn elem(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1 % self.p)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a.0 + b.0;
        FieldElem(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let p = self.p as u64;
        let mut base = a.0 as u64 % p;
        let mut acc = 1u64 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        FieldElem(acc as u32)
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.0 == 0 {
            return Err(Error::Domain("0 has no multiplicative inverse".into()));
        }
        // Extended Euclid on (a, p).
        let (mut r0, mut r1) = (self.p as i64, a.0 as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.elem(t0))
    }

    /// Euler's criterion. Zero is not a residue here.
    pub fn is_qr(&self, a: FieldElem) -> bool {
        if a.0 == 0 {
            return false;
        }
        if self.p == 2 {
            return true;
        }
        self.pow(a, (self.p as u64 - 1) / 2).0 == 1
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElem) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::Domain("0 has no multiplicative order".into()));
        }
        let n = self.p as u64 - 1;
        let mut ord = n;
        for f in prime_factors(n) {
            while ord.is_multiple_of(f) && self.pow(a, ord / f).0 == 1 {
                ord /= f;
            }
        }
        Ok(ord)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.p).map(FieldElem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.p).map(FieldElem)
    }
}

/// Smallest generator of F_p^*.
pub fn primitive_root(p: u64) -> Result<FieldElem> {
    let field = PrimeField::new(p)?;
    if p == 2 {
        return Ok(field.one());
    }
    let n = p - 1;
    let factors = prime_factors(n);
    field
        .nonzero()
        .skip(1)
        .find(|&g| factors.iter().all(|&f| field.pow(g, n / f).0 != 1))
        .ok_or_else(|| Error::Domain(format!("no primitive root mod {p}")))
}

/// Discrete-log table for F_p^* and the multiplicative characters built on it.
#[derive(Clone, Debug)]
pub struct CharTable {
    field: PrimeField,
    generator: FieldElem,
    // dlog[x] = k with g^k = x; dlog[0] unused
    dlog: Vec<u32>,
    powers: Vec<FieldElem>,
}

impl CharTable {
    pub fn new(field: PrimeField) -> Result<Self> {
        let p = field.p();
        let generator = primitive_root(p as u64)?;
        let order = (p - 1) as usize;
        let mut dlog = vec![0u32; p as usize];
        let mut powers = Vec::with_capacity(order);
        let mut x = field.one();
        for k in 0..order {
            powers.push(x);
            dlog[x.value() as usize] = k as u32;
            x = field.mul(x, generator);
        }
        Ok(Self { field, generator, dlog, powers })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    /// Order of F_p^*, i.e. p - 1.
    pub fn group_order(&self) -> u32 {
        self.field.p() - 1
    }

    pub fn dlog(&self, x: FieldElem) -> Result<u32> {
        if x.is_zero() {
            return Err(Error::Domain("discrete log of 0".into()));
        }
        Ok(self.dlog[x.value() as usize])
    }

    pub fn gen_pow(&self, k: u64) -> FieldElem {
        self.powers[(k % self.powers.len() as u64) as usize]
    }

    /// `j * dlog(x) mod (p-1)`: the exponent of the character value as a
    /// multiple of 2*pi/(p-1). Zero exactly when chi_j(x) = 1.
    pub fn character_phase(&self, j: u32, x: FieldElem) -> Result<u32> {
        let n = self.group_order() as u64;
        if j as u64 >= n {
            return Err(Error::Domain(format!("character index {j} out of range [0, {n})")));
        }
        Ok(((j as u64 * self.dlog(x)? as u64) % n) as u32)
    }

    /// chi_j(x) = exp(2 pi i j dlog(x) / (p-1)).
    pub fn mult_character(&self, j: u32, x: FieldElem) -> Result<Complex64> {
        let phase = self.character_phase(j, x)?;
        Ok(Complex64::from_polar(1.0, TAU * phase as f64 / self.group_order() as f64))
    }
}

/// exp(2 pi i k / m)
#[inline]
pub(crate) fn root_of_unity(k: u64, m: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (k % m) as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn basic_ops() {
        let f7 = f(7);
        assert_eq!(f7.inv(f7.elem(3)).unwrap().value(), 5);
        assert_eq!(f7.mul(f7.elem(4), f7.elem(5)).value(), 6);
        assert_eq!(f7.neg(f7.zero()).value(), 0);
        assert_eq!(f7.sub(f7.elem(2), f7.elem(5)).value(), 4);
        assert_eq!(f7.elem(-1).value(), 6);
        assert!(matches!(f7.inv(f7.zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(matches!(PrimeField::new(4), Err(Error::NotPrime(4))));
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn inverse_and_negation_laws() {
        for p in [2u64, 3, 5, 7, 11, 101, 211] {
            let fp = f(p);
            for a in fp.elements() {
                assert!(fp.add(a, fp.neg(a)).is_zero());
                if !a.is_zero() {
                    assert_eq!(fp.mul(a, fp.inv(a).unwrap()), fp.one());
                }
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7).unwrap().value(), 3);
        assert_eq!(primitive_root(5).unwrap().value(), 2);
        assert_eq!(primitive_root(3).unwrap().value(), 2);
        for p in primes_in(3, 400) {
            let fp = f(p);
            let g = primitive_root(p).unwrap();
            assert_eq!(fp.order(g).unwrap(), p - 1, "p = {p}");
            // and it is the smallest such element
            for c in 2..g.value() {
                assert!(fp.order(fp.elem(c as i64)).unwrap() < p - 1);
            }
        }
    }

    #[test]
    fn dlog_table_is_a_bijection() {
        let t = CharTable::new(f(13)).unwrap();
        let mut seen = [false; 13];
        for k in 0..12 {
            let x = t.gen_pow(k);
            assert!(!seen[x.value() as usize]);
            seen[x.value() as usize] = true;
            assert_eq!(t.dlog(x).unwrap() as u64, k);
        }
    }

    #[test]
    fn character_values() {
        let t = CharTable::new(f(5)).unwrap();
        let four = t.field().elem(4);
        assert!((t.mult_character(2, four).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((t.mult_character(1, four).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        for x in t.field().nonzero() {
            assert!((t.mult_character(0, x).unwrap() - 1.0).norm() < 1e-12);
        }
        assert!(t.mult_character(1, t.field().zero()).is_err());
        assert!(t.mult_character(4, four).is_err());
    }

    #[test]
    fn character_orthogonality() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let t = CharTable::new(f(p)).unwrap();
            for j in 0..(p - 1) as u32 {
                let s: Complex64 = t.field().nonzero().map(|x| t.mult_character(j, x).unwrap()).sum();
                let expect = if j == 0 { (p - 1) as f64 } else { 0.0 };
                assert!((s - expect).norm() < 1e-9, "p={p} j={j} sum={s}");
            }
        }
    }

    #[test]
    fn quadratic_residues() {
        let f7 = f(7);
        let qr: Vec<u32> = f7.nonzero().filter(|&a| f7.is_qr(a)).map(|a| a.value()).collect();
        assert_eq!(qr, vec![1, 2, 4]);
        assert!(!f7.is_qr(f7.zero()));
    }
}
