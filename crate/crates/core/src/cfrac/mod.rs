//! Regular continued fractions `[0; b_1, …, b_s]` with `b_s ≥ 2`, their
//! continuant matrices, enumeration of fractions with partial quotients in
//! a finite alphabet, and the matrix sets they induce in `SL_2(F_p)`.

mod enumerate;
mod modular;
mod zaremba;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use enumerate::{count_f, dimension_estimate, enumerate_f, for_each_f, DimensionFit, Fraction};
pub use modular::{
    aba_size, lambda_energy_check, lambda_square_check, lambda_set, matrix_set_mod_p, matrix_tuples_mod_p,
    parity_counts, verify_sigma_bounds, AbaReport, LambdaEnergyReport, LambdaSquareReport, Parity, SigmaReport,
};
pub use zaremba::{zaremba_search, zaremba_search_with, Strategy, ZarembaResult};

/// A finite set of allowed partial quotients, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Alphabet(Vec<u64>);

impl Alphabet {
    pub fn new(mut digits: Vec<u64>) -> Result<Self> {
        digits.sort_unstable();
        digits.dedup();
        if digits.is_empty() {
            return Err(Error::Domain("alphabet must be nonempty".into()));
        }
        if digits[0] == 0 {
            return Err(Error::Domain("partial quotients are positive".into()));
        }
        Ok(Self(digits))
    }

    /// `{1, …, m}`
    pub fn up_to(m: u64) -> Result<Self> {
        Self::new((1..=m).collect())
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    pub fn contains(&self, b: u64) -> bool {
        self.0.binary_search(&b).is_ok()
    }

    pub fn max(&self) -> u64 {
        *self.0.last().unwrap()
    }
}

impl TryFrom<Vec<u64>> for Alphabet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Alphabet> for Vec<u64> {
    fn from(a: Alphabet) -> Self {
        a.0
    }
}

impl std::str::FromStr for Alphabet {
    type Err = Error;

    /// `"1,2,5"` or a range `"1..5"` (inclusive).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse alphabet {s:?}"));
        if let Some((lo, hi)) = s.split_once("..") {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
            return Self::new((lo..=hi).collect());
        }
        let digits = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(digits)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

/// `u/v = [0; b_1, …, b_s]` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFExpansion {
    pub digits: Vec<u64>,
    pub num: BigUint,
    pub den: BigUint,
}

impl CFExpansion {
    /// Validates the digit convention and evaluates the fraction.
    pub fn from_digits(digits: Vec<u64>) -> Result<Self> {
        if digits.last().is_some_and(|&b| b < 2) {
            return Err(Error::Domain("last partial quotient must be at least 2".into()));
        }
        let c = continuant(&digits)?;
        let [_, num, _, den] = c.entries;
        Ok(Self { digits, num, den })
    }
}

/// Expansion of `a/q` by the Euclidean algorithm.
pub fn expand(a: u64, q: u64) -> Result<CFExpansion> {
    if q == 0 || a > q {
        return Err(Error::Domain(format!("need 0 <= a <= q and q >= 1, got {a}/{q}")));
    }
    if a.gcd(&q) != 1 {
        return Err(Error::Domain(format!("{a}/{q} is not reduced")));
    }
    if a == q {
        // 1/1 would be [0; 1], which breaks the b_s >= 2 convention
        return Err(Error::Domain("1/1 has no expansion with last partial quotient >= 2".into()));
    }
    let digits = euclid_digits(a, q);
    Ok(CFExpansion { digits, num: BigUint::from(a), den: BigUint::from(q) })
}

/// Partial quotients of `a/q` for `0 ≤ a < q`, stopping early (returning
/// `None`) at the first digit rejected by `keep`.
pub(crate) fn euclid_digits_filtered(mut a: u64, mut q: u64, keep: impl Fn(u64) -> bool) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    while a != 0 {
        let b = q / a;
        if !keep(b) {
            return None;
        }
        out.push(b);
        (a, q) = (q - b * a, a);
    }
    Some(out)
}

fn euclid_digits(a: u64, q: u64) -> Vec<u64> {
    euclid_digits_filtered(a, q, |_| true).unwrap()
}

/// `(0 1 | 1 b_1) ⋯ (0 1 | 1 b_s) = (p_{s-1} p_s | q_{s-1} q_s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Continuant {
    /// Row-major.
    pub entries: [BigUint; 4],
    pub len: usize,
}

impl Continuant {
    pub fn p_prev(&self) -> &BigUint {
        &self.entries[0]
    }

    pub fn p_last(&self) -> &BigUint {
        &self.entries[1]
    }

    pub fn q_prev(&self) -> &BigUint {
        &self.entries[2]
    }

    pub fn q_last(&self) -> &BigUint {
        &self.entries[3]
    }

    /// `p_{s-1} q_s - p_s q_{s-1}`
    pub fn det(&self) -> BigInt {
        let [a, b, c, d] = &self.entries;
        BigInt::from(a * d) - BigInt::from(b * c)
    }

    /// `p_s / q_s` reduced.
    pub fn value(&self) -> (BigUint, BigUint) {
        let g = self.p_last().gcd(self.q_last());
        (self.p_last() / &g, self.q_last() / &g)
    }
}

/// One factor of the continuant product in machine integers:
/// `m · (0 1 | 1 b)`, or `None` on overflow. `m` is row-major.
#[inline]
pub fn continuant_step(m: [u64; 4], b: u64) -> Option<[u64; 4]> {
    let [p0, p1, q0, q1] = m;
    let np = p1.checked_mul(b)?.checked_add(p0)?;
    let nq = q1.checked_mul(b)?.checked_add(q0)?;
    Some([p1, np, q1, nq])
}

/// `p_{s-1} q_s - p_s q_{s-1}` of a machine-integer continuant.
#[inline]
pub fn continuant_det(m: [u64; 4]) -> i128 {
    m[0] as i128 * m[3] as i128 - m[1] as i128 * m[2] as i128
}

pub fn continuant(digits: &[u64]) -> Result<Continuant> {
    let mut m = [BigUint::one(), BigUint::zero(), BigUint::zero(), BigUint::one()];
    for &b in digits {
        if b == 0 {
            return Err(Error::Domain("partial quotients are positive".into()));
        }
        let [p0, p1, q0, q1] = m;
        let np = &p0 + &p1 * b;
        let nq = &q0 + &q1 * b;
        m = [p1, np, q1, nq];
    }
    Ok(Continuant { entries: m, len: digits.len() })
}
