use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{continuant_step, Alphabet};
use crate::error::{Error, Result};

/// A member `u/v = [0; digits]` of `F_𝒜(Q)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fraction {
    pub u: u64,
    pub v: u64,
    pub digits: Vec<u64>,
}

pub(super) const ROOT: [u64; 4] = [1, 0, 0, 1];

/// Depth-first walk over digit strings in `alphabet` whose continuant
/// denominator stays `≤ q_max`. `visit(digits, u, v)` sees every member of
/// `F_𝒜(Q)` exactly once: `0/1` first, then each string ending in a digit
/// `≥ 2`. Strings ending in `1` are walked through but not reported.
pub fn for_each_f(alphabet: &Alphabet, q_max: u64, mut visit: impl FnMut(&[u64], u64, u64)) {
    if q_max == 0 {
        return;
    }
    visit(&[], 0, 1);
    let mut digits = Vec::new();
    for &b in alphabet.digits() {
        if !descend(alphabet, q_max, ROOT, b, &mut digits, &mut visit) {
            break;
        }
    }
}

/// Appends `b` and walks the subtree; returns `false` when `b` already
/// overshoots, so larger siblings can be skipped.
pub(super) fn descend(
    alphabet: &Alphabet,
    q_max: u64,
    m: [u64; 4],
    b: u64,
    digits: &mut Vec<u64>,
    visit: &mut impl FnMut(&[u64], u64, u64),
) -> bool {
    let Some(next) = continuant_step(m, b).filter(|n| n[3] <= q_max) else {
        return false;
    };
    debug_assert!(next[3] > m[3] || (digits.is_empty() && next[3] >= m[3]));
    digits.push(b);
    if b >= 2 {
        visit(digits, next[1], next[3]);
    }
    for &c in alphabet.digits() {
        if !descend(alphabet, q_max, next, c, digits, visit) {
            break;
        }
    }
    digits.pop();
    true
}

pub fn enumerate_f(alphabet: &Alphabet, q_max: u64) -> Vec<Fraction> {
    let mut out = Vec::new();
    for_each_f(alphabet, q_max, |d, u, v| out.push(Fraction { u, v, digits: d.to_vec() }));
    out
}

/// `|F_𝒜(Q)|` without storing members; subtrees under distinct first
/// digits are counted in parallel.
pub fn count_f(alphabet: &Alphabet, q_max: u64) -> u64 {
    if q_max == 0 {
        return 0;
    }
    let below: u64 = alphabet
        .digits()
        .par_iter()
        .map(|&b| {
            let mut n = 0u64;
            let mut digits = Vec::new();
            descend(alphabet, q_max, ROOT, b, &mut digits, &mut |_: &[u64], _, _| n += 1);
            n
        })
        .sum();
    below + 1
}

/// Least-squares fit of `log |F_𝒜(Q)|` against `log Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub alphabet: Alphabet,
    pub slope: f64,
    pub intercept: f64,
    /// `(Q, |F_𝒜(Q)|)`
    pub table: Vec<(u64, u64)>,
}

impl DimensionFit {
    /// The slope estimates twice the dimension of the limit set.
    pub fn dimension(&self) -> f64 {
        self.slope / 2.0
    }
}

pub fn dimension_estimate(alphabet: &Alphabet, qs: &[u64]) -> Result<DimensionFit> {
    if qs.len() < 2 {
        return Err(Error::Insufficient("need at least 2 values of Q".into()));
    }
    if qs[0] == 0 || qs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("Q values must be positive and strictly increasing".into()));
    }
    let table: Vec<(u64, u64)> = qs.iter().map(|&q| (q, count_f(alphabet, q))).collect();
    if table.iter().all(|&(_, c)| c == table[0].1) {
        return Err(Error::Insufficient("counts do not change over the Q range".into()));
    }
    let pts: Vec<(f64, f64)> = table.iter().map(|&(q, c)| ((q as f64).ln(), (c as f64).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(DimensionFit { alphabet: alphabet.clone(), slope, intercept: my - slope * mx, table })
}

#[cfg(test)]
mod tests {
    use super::super::euclid_digits_filtered;
    use super::*;
    use num_integer::Integer;

    fn alpha(d: &[u64]) -> Alphabet {
        Alphabet::new(d.to_vec()).unwrap()
    }

    /// Every reduced `u/v` with `v ≤ Q`, `u < v`, kept when Euclid's digits
    /// all lie in the alphabet.
    fn brute(alphabet: &Alphabet, q_max: u64) -> Vec<Fraction> {
        let mut out = Vec::new();
        for v in 1..=q_max {
            for u in 0..v {
                if u.gcd(&v) != 1 {
                    continue;
                }
                if let Some(digits) = euclid_digits_filtered(u, v, |b| alphabet.contains(b)) {
                    out.push(Fraction { u, v, digits });
                }
            }
        }
        out.sort();
        out
    }

    fn sorted(mut v: Vec<Fraction>) -> Vec<Fraction> {
        v.sort();
        v
    }

    #[test]
    fn matches_euclid_filter() {
        for a in [alpha(&[1, 2]), Alphabet::up_to(5).unwrap(), alpha(&[2, 3, 7]), alpha(&[1])] {
            let got = sorted(enumerate_f(&a, 100));
            assert_eq!(got, brute(&a, 100), "alphabet {a}");
            assert_eq!(count_f(&a, 100), got.len() as u64);
        }
    }

    #[test]
    fn small_cases() {
        let f = |a: &Alphabet, q| enumerate_f(a, q).into_iter().map(|x| (x.u, x.v)).collect::<Vec<_>>();
        assert_eq!(f(&alpha(&[2]), 2), vec![(0, 1), (1, 2)]);
        let mut got = f(&alpha(&[1, 2]), 3);
        got.sort();
        assert_eq!(got, vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(count_f(&alpha(&[2]), 2), 2);
        assert_eq!(count_f(&alpha(&[2]), 0), 0);
        assert_eq!(f(&alpha(&[1]), 10), vec![(0, 1)]);
    }

    #[test]
    fn no_duplicates_and_values_agree() {
        let a = Alphabet::up_to(3).unwrap();
        let all = enumerate_f(&a, 1000);
        let mut keys: Vec<(u64, u64)> = all.iter().map(|x| (x.u, x.v)).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), all.len());
        for x in &all {
            assert_eq!(super::super::continuant(&x.digits).unwrap().value(), (x.u.into(), x.v.into()));
        }
        assert_eq!(count_f(&alpha(&[1, 2]), 1000), enumerate_f(&alpha(&[1, 2]), 1000).len() as u64);
    }

    #[test]
    fn counts_are_monotone() {
        let a2 = alpha(&[1, 2]);
        let a3 = Alphabet::up_to(3).unwrap();
        let mut last = 0;
        for q in (10..=400).step_by(10) {
            let c = count_f(&a2, q);
            assert!(c >= last);
            assert!(count_f(&a3, q) >= c);
            last = c;
        }
    }

    #[test]
    fn dimension_fit() {
        let qs = [100, 1000, 10_000];
        let s2 = dimension_estimate(&alpha(&[1, 2]), &qs).unwrap().slope;
        let s3 = dimension_estimate(&Alphabet::up_to(3).unwrap(), &qs).unwrap().slope;
        let s4 = dimension_estimate(&Alphabet::up_to(4).unwrap(), &qs).unwrap().slope;
        assert!(s2 < s3 && s3 < s4, "{s2} {s3} {s4}");
        assert!(s4 < 2.0);
        assert!(matches!(dimension_estimate(&alpha(&[1, 2]), &[100]), Err(Error::Insufficient(_))));
        assert!(matches!(dimension_estimate(&alpha(&[1, 2]), &[100, 100]), Err(Error::Domain(_))));
        assert!(matches!(dimension_estimate(&alpha(&[1]), &[10, 100]), Err(Error::Insufficient(_))));
    }
}
