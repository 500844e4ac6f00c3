use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{descend, ROOT};
use super::{euclid_digits_filtered, Alphabet};
use crate::error::{Error, Result};
use crate::ff::is_prime;

/// `a/q = [0; digits]` with `p | q` and every digit in the alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZarembaResult {
    pub p: u64,
    pub q: u64,
    pub a: u64,
    pub digits: Vec<u64>,
    /// `q / p`
    pub multiple_index: u64,
    /// `log q / log p`
    pub exponent: f64,
}

impl ZarembaResult {
    fn new(p: u64, q: u64, a: u64, digits: Vec<u64>) -> Self {
        Self { p, q, a, digits, multiple_index: q / p, exponent: (q as f64).ln() / (p as f64).ln() }
    }

    /// Re-expands `a/q` and checks every invariant of the record.
    pub fn is_valid(&self, alphabet: &Alphabet) -> bool {
        self.q.is_multiple_of(self.p)
            && self.multiple_index * self.p == self.q
            && self.a.gcd(&self.q) == 1
            && self.digits.iter().all(|&b| alphabet.contains(b))
            && euclid_digits_filtered(self.a, self.q, |_| true).as_ref() == Some(&self.digits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Walk `F_𝒜(kp)` once per band of multiples `k`, doubling the band.
    DigitDfs,
    /// For each `q = kp`, try `a = 1, 2, …` through Euclid.
    NumeratorScan,
}

/// Smallest multiple `q = kp`, `k ≤ multiple_limit`, admitting `a/q` with
/// all partial quotients in `alphabet`; among those `a` is smallest.
pub fn zaremba_search(p: u64, alphabet: &Alphabet, multiple_limit: u64) -> Result<Option<ZarembaResult>> {
    zaremba_search_with(p, alphabet, multiple_limit, Strategy::DigitDfs)
}

pub fn zaremba_search_with(
    p: u64,
    alphabet: &Alphabet,
    multiple_limit: u64,
    strategy: Strategy,
) -> Result<Option<ZarembaResult>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if multiple_limit == 0 {
        return Err(Error::Domain("multiple limit must be at least 1".into()));
    }
    p.checked_mul(multiple_limit)
        .ok_or_else(|| Error::Domain(format!("{multiple_limit}·{p} overflows")))?;
    Ok(match strategy {
        Strategy::DigitDfs => dfs_search(p, alphabet, multiple_limit),
        Strategy::NumeratorScan => scan_search(p, alphabet, multiple_limit),
    })
}

fn scan_search(p: u64, alphabet: &Alphabet, limit: u64) -> Option<ZarembaResult> {
    (1..=limit).find_map(|k| {
        let q = k * p;
        (1..q).filter(|a| a.gcd(&q) == 1).find_map(|a| {
            euclid_digits_filtered(a, q, |b| alphabet.contains(b)).map(|d| ZarembaResult::new(p, q, a, d))
        })
    })
}

/// Best hit so far, ordered by `(q, a)`.
type Hit = (u64, u64, Vec<u64>);

fn dfs_search(p: u64, alphabet: &Alphabet, limit: u64) -> Option<ZarembaResult> {
    let (mut lo, mut hi) = (0u64, 1u64);
    loop {
        let hi_c = hi.min(limit);
        let band = |v: u64| v.is_multiple_of(p) && v / p > lo && v / p <= hi_c;
        let best = alphabet
            .digits()
            .par_iter()
            .filter_map(|&b| {
                let mut best: Option<Hit> = None;
                let mut digits = Vec::new();
                descend(alphabet, hi_c * p, ROOT, b, &mut digits, &mut |d, u, v| {
                    if band(v) && best.as_ref().is_none_or(|h| (v, u) < (h.0, h.1)) {
                        best = Some((v, u, d.to_vec()));
                    }
                });
                best
            })
            .min_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        if let Some((q, a, d)) = best {
            return Some(ZarembaResult::new(p, q, a, d));
        }
        if hi_c == limit {
            return None;
        }
        lo = hi_c;
        hi = hi_c.saturating_mul(2);
    }
}
