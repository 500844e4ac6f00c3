//! One function per acceptance criterion. Each returns a [`CheckRecord`]
//! whose payload depends only on the parameters and the seed.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pargrowth::cfrac::{
    continuant, continuant_det, continuant_step, count_f, dimension_estimate, enumerate_f, expand, lambda_energy_check,
    lambda_set, lambda_square_check, matrix_set_mod_p, verify_sigma_bounds, zaremba_search, Alphabet, Parity,
};
use pargrowth::ff::{primes_in, primitive_root};
use pargrowth::fourier::{borel_class_count, cor32_verify, AffElem, AffGroup, RepLabel};
use pargrowth::matgrp::{ParabolicSpec, SubgroupKind};
use pargrowth::random::{derive_seed, random_subset, rng, Rng};
use pargrowth::setops::{power_intersect, product, product_many, qr_fixture, r_pgp_census, verify_growth};
use pargrowth::{ElemSet, SlGroup, WeylElem, DEFAULT_BUDGET};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{self, CheckSpec};
use crate::CliError;

/// Twice the dimension of the set of irrationals with partial quotients in `{1, 2}`.
pub const TWO_W2: f64 = 2.0 * 0.531_280_506_277_205_1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub criterion: u32,
    pub check: String,
    pub pass: bool,
    pub items: u64,
    pub failures: u64,
    /// First failing item, if any.
    pub witness: Option<String>,
    pub detail: Value,
}

#[derive(Default)]
struct Tally {
    items: u64,
    failures: u64,
    witness: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.items += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(what());
            }
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.items += other.items;
        self.failures += other.failures;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }

    fn finish(self, criterion: u32, check: &str, detail: Value) -> CheckRecord {
        CheckRecord {
            criterion,
            check: check.into(),
            pass: self.failures == 0 && self.items > 0,
            items: self.items,
            failures: self.failures,
            witness: self.witness,
            detail,
        }
    }
}

type Res<T> = Result<T, CliError>;

pub fn criterion_of(spec: &CheckSpec) -> u32 {
    match spec {
        CheckSpec::GroupOrders(_) => 1,
        CheckSpec::Bruhat(_) => 2,
        CheckSpec::DoubleCosets(_) => 3,
        CheckSpec::Growth(_) => 4,
        CheckSpec::Fourier(_) => 5,
        CheckSpec::BorelClasses(_) => 6,
        CheckSpec::ContinuedFractions(_) => 7,
        CheckSpec::Dimension(_) => 8,
        CheckSpec::Zaremba(_) => 9,
        CheckSpec::Modular(_) => 10,
        CheckSpec::QrExample(_) => 11,
    }
}

pub fn run_check(spec: &CheckSpec, seed: u64) -> Res<CheckRecord> {
    let id = criterion_of(spec);
    let (tally, detail) = match spec {
        CheckSpec::GroupOrders(c) => group_orders(c)?,
        CheckSpec::Bruhat(c) => bruhat(c)?,
        CheckSpec::DoubleCosets(c) => double_cosets(c)?,
        CheckSpec::Growth(c) => growth(c, seed)?,
        CheckSpec::Fourier(c) => fourier(c, seed)?,
        CheckSpec::BorelClasses(c) => borel_classes(c)?,
        CheckSpec::ContinuedFractions(c) => continued_fractions(c)?,
        CheckSpec::Dimension(c) => dimension(c)?,
        CheckSpec::Zaremba(c) => zaremba(c)?,
        CheckSpec::Modular(c) => modular(c)?,
        CheckSpec::QrExample(c) => qr_example(c)?,
    };
    Ok(tally.finish(id, spec.name(), detail))
}

fn group_orders(c: &config::GroupOrders) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for &(n, p) in &c.cases {
        let g = SlGroup::new(n, p)?;
        let enumerated = g.enumerate(DEFAULT_BUDGET)?.len() as u128;
        let formula = ParabolicSpec::full(n).order(p)?;
        t.check(enumerated == formula && formula == g.order()?, || {
            format!("SL_{n}(F_{p}): enumerated {enumerated}, formula {formula}")
        });
        if (n, p) == (3, 2) {
            t.check(enumerated == 168, || format!("|SL_3(F_2)| = {enumerated}"));
        }
        rows.push(json!({"n": n, "p": p, "enumerated": enumerated as u64, "formula": formula as u64}));
    }
    Ok((t, json!({ "groups": rows })))
}

fn bruhat(c: &config::Bruhat) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for &(n, p) in &c.groups {
        let g = SlGroup::new(n, p)?;
        let all = g.enumerate(DEFAULT_BUDGET)?;
        let borel = g.borel()?.len() as u64;
        let reps: BTreeMap<WeylElem, _> = WeylElem::all(n).into_iter().map(|w| (w.clone(), g.weyl_rep(&w))).collect();
        let forms: Vec<_> = all.as_slice().par_iter().map(|x| (*x, g.bruhat_decompose(x))).collect();
        let mut census: BTreeMap<WeylElem, u64> = reps.keys().map(|w| (w.clone(), 0)).collect();
        for (x, f) in &forms {
            let back = g.mul3(&f.b, &reps[&f.w], &f.u);
            t.check(f.b.is_upper_triangular() && g.in_u_double_prime(&f.u, &f.w) && back == *x, || {
                format!("SL_{n}(F_{p}): {x} does not round-trip")
            });
            *census.get_mut(&f.w).unwrap() += 1;
        }
        // |B||U''_w| = |BwB| for every w makes (b, u) ↦ b·ẇ·u a bijection onto the cell
        let mut cells = Vec::new();
        for (w, &count) in &census {
            let expect = borel * p.pow(w.length() as u32);
            let u_size = g.u_double_prime(w).len() as u64;
            t.check(count == expect && u_size == p.pow(w.length() as u32), || {
                format!("SL_{n}(F_{p}): cell {w} has {count}, expected {expect}, |U''_w| = {u_size}")
            });
            cells.push(json!({"w": w.to_string(), "size": count}));
        }
        rows.push(json!({"n": n, "p": p, "cells": cells}));
    }
    let mut incl = Vec::new();
    for &(n, p) in &c.inclusion {
        let g = SlGroup::new(n, p)?;
        for r in 1..n {
            for w in WeylElem::all(n) {
                let ok = g.check_inclusion_wrbw(r, &w)?;
                t.check(ok, || format!("SL_{n}(F_{p}): w_{r} B {w} escapes"));
            }
        }
        incl.push(json!({"n": n, "p": p}));
    }
    Ok((t, json!({"groups": rows, "inclusion": incl})))
}

fn double_cosets(c: &config::DoubleCosets) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    let mut run = |t: &mut Tally, g: &SlGroup, p_set: &ElemSet, label: String, exact: bool| -> Res<()> {
        let census = r_pgp_census(p_set, DEFAULT_BUDGET)?;
        let q = g.p() as u64;
        let np = p_set.len() as u64;
        let mut covered = np;
        for e in &census {
            let r = &e.report;
            let ok = r.holds && (!exact || r.sharp) && r.conj_intersection == r.max_r;
            t.check(ok, || format!("{label}: g = {} gives max r = {} with |P| = {np}, q = {q}", e.rep, r.max_r));
            covered += e.size;
        }
        // every g outside P lies in exactly one listed double coset
        t.check(covered as u128 == g.order()?, || format!("{label}: double cosets cover {covered}"));
        rows.push(json!({
            "subgroup": label,
            "order": np,
            "double_cosets": census.iter().map(|e| json!({"size": e.size, "max_r": e.report.max_r})).collect::<Vec<_>>(),
        }));
        Ok(())
    };
    for &p in &c.borel_primes {
        let g = SlGroup::new(2, p)?;
        run(&mut t, &g, &g.borel()?, format!("B < SL_2(F_{p})"), true)?;
    }
    let (n, p) = c.parabolic_group;
    let g = SlGroup::new(n, p)?;
    for r in 1..n {
        let mut j: Vec<usize> = (1..n).collect();
        j.retain(|&x| x != r);
        let ps = g.parabolic(&j)?;
        run(&mut t, &g, &ps, format!("P_{j:?} < SL_{n}(F_{p})"), false)?;
    }
    Ok((t, json!({ "subgroups": rows })))
}

fn log_uniform_size(r: &mut Rng, n: usize) -> usize {
    let k = (r.gen::<f64>() * (n as f64).ln()).exp().round() as usize;
    k.clamp(1, n)
}

fn growth(c: &config::Growth, seed: u64) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for &p in &c.primes {
        let g = SlGroup::new(2, p)?;
        let all = g.enumerate(DEFAULT_BUDGET)?;
        let b = g.borel()?;
        let mut r = rng(derive_seed(seed, p));
        let mut sets: Vec<(String, ElemSet)> = Vec::new();
        for i in 0..c.trials {
            let k = log_uniform_size(&mut r, all.len());
            sets.push((format!("random #{i}"), random_subset(&all, k, &mut r)));
        }
        for i in 0..c.fixtures {
            let x = all.as_slice()[r.gen_range(0..all.len())];
            let (name, set) = match i % 5 {
                0 => ("subset of xB", random_subset(&b.left_translate(&x), r.gen_range(1..=b.len()), &mut r)),
                1 => ("subset of Bx", random_subset(&b.right_translate(&x), r.gen_range(1..=b.len()), &mut r)),
                2 | 3 => {
                    let k = r.gen_range(1..=p as usize);
                    let left = i % 5 == 2;
                    let mut u = ElemSet::empty(g);
                    for _ in 0..k {
                        let y = all.as_slice()[r.gen_range(0..all.len())];
                        u = u.union(&if left { b.left_translate(&y) } else { b.right_translate(&y) });
                    }
                    (if left { "union of left cosets" } else { "union of right cosets" }, u)
                }
                _ => ("subset of B", random_subset(&b, r.gen_range(1..=b.len()), &mut r)),
            };
            sets.push((format!("{name} #{i}"), set));
        }
        let reports: Vec<_> = sets.par_iter().map(|(_, a)| verify_growth(a, &b)).collect::<Result<_, _>>()?;
        for ((name, a), rep) in sets.iter().zip(&reports) {
            t.check(rep.holds(), || format!("SL_2(F_{p}), {name} (|A| = {}): {rep:?}", a.len()));
        }

        // A = B ∪ BwB is all of SL_2, the extreme case AB = BA = A
        let w = g.weyl_rep(&WeylElem::longest(2));
        let tight = b.union(&product_many(&[&b, &ElemSet::singleton(g, w), &b])?);
        let (ab, ba) = (product(&tight, &b)?, product(&b, &tight)?);
        let size_ok = tight.len() as u64 == b.len() as u64 * (1 + p);
        t.check(size_ok && ab == tight && ba == tight, || format!("SL_2(F_{p}): tightness set has size {}", tight.len()));
        let rep = verify_growth(&tight, &b)?;
        t.check(rep.holds(), || format!("SL_2(F_{p}): tightness set {rep:?}"));

        let small = reports.iter().filter(|r| r.alt_small).count();
        rows.push(json!({
            "p": p,
            "sets": sets.len() + 1,
            "alt_small": small,
            "alt_growth_only": reports.iter().filter(|r| !r.alt_small && r.alt_growth).count(),
            "tightness": {"size": tight.len(), "ap": ab.len(), "pa": ba.len()},
        }));
    }
    Ok((t, json!({ "primes": rows })))
}

fn random_function(r: &mut Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}

fn random_elems(r: &mut Rng, g: &AffGroup, k: usize) -> Vec<AffElem> {
    rand::seq::index::sample(r, g.order(), k).into_iter().map(|i| g.from_index(i)).collect()
}

fn fourier(c: &config::Fourier, seed: u64) -> Res<(Tally, Value)> {
    let per_p: Vec<(u64, Tally, Value)> = c
        .primes
        .par_iter()
        .map(|&p| fourier_one(c, p, derive_seed(seed, p)).map(|(t, v)| (p, t, v)))
        .collect::<Res<_>>()?;
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for (_, tp, v) in per_p {
        t.absorb(tp);
        rows.push(v);
    }
    Ok((t, json!({ "primes": rows })))
}

fn fourier_one(c: &config::Fourier, p: u64, seed: u64) -> Res<(Tally, Value)> {
    let g = AffGroup::new(p)?;
    let n = g.order();
    let mut r = rng(seed);
    let mut t = Tally::default();
    let mut worst = [0.0f64; 3];
    for i in 0..c.trials {
        let f = random_function(&mut r, n);
        let h = random_function(&mut r, n);
        let pc = g.parseval_check(&f)?;
        let ic = g.inversion_check(&f)?;
        let cc = g.convolution_check(&f, &h)?;
        worst[0] = worst[0].max((pc.lhs - pc.rhs).abs() / pc.lhs.abs().max(pc.rhs.abs()));
        worst[1] = worst[1].max(ic.lhs / ic.rhs.max(1.0));
        worst[2] = worst[2].max(cc.lhs);
        t.check(pc.pass, || format!("p = {p}: Parseval fails on function #{i}: {pc:?}"));
        t.check(ic.pass, || format!("p = {p}: inversion fails on function #{i}: {ic:?}"));
        t.check(cc.pass, || format!("p = {p}: convolution fails on pair #{i}: {cc:?}"));
    }

    let mut subgroups = vec![("torus", g.torus()), ("unipotent", g.unipotent()), ("whole", g.whole())];
    subgroups.push(("trivial", vec![g.identity()]));
    for _ in 0..20 {
        let x = g.from_index(r.gen_range(0..n));
        subgroups.push(("cyclic", g.generated(&[x])));
    }
    let mut max_wiener: f64 = 0.0;
    for (name, s) in &subgroups {
        let w = g.wiener_norm_of_set(s)?;
        max_wiener = max_wiener.max(w);
        t.check(w <= 1.0 + 1e-9, || format!("p = {p}: Wiener norm of {name} subgroup (order {}) is {w}", s.len()));
    }

    let mut max_ratio: f64 = 0.0;
    for i in 0..c.trials {
        let k = r.gen_range(1..n);
        let a = random_elems(&mut r, &g, k);
        let norm = g.fourier(&g.indicator(&a))?.op_norm(RepLabel::Big)?;
        let bound = ((k as u64 * p) as f64).sqrt();
        max_ratio = max_ratio.max(norm / bound);
        t.check(norm < bound, || format!("p = {p}: set #{i} of size {k} has ‖Â(π)‖ = {norm} ≥ {bound}"));
    }

    let gen = primitive_root(p)?.value();
    let mut fired = 0u64;
    for i in 0..c.cor32_trials {
        let gamma = match i % 3 {
            0 => g.torus(),
            1 => g.whole(),
            _ => g.generated(&[AffElem { a: gen, b: r.gen_range(0..p as u32) }]),
        };
        let k = r.gen_range(1..=n);
        let a = random_elems(&mut r, &g, k);
        let z = g.from_index(r.gen_range(0..n));
        let rep = cor32_verify(&g, &a, &gamma, &z, 1 + (i % 3) as u32)?;
        fired += rep.condition as u64;
        t.check(rep.implication_ok(), || format!("p = {p}: coset-hitting trial #{i} {rep:?}"));
    }
    let detail = json!({
        "p": p,
        "parseval_rel_err": worst[0],
        "inversion_rel_err": worst[1],
        "convolution_rel_err": worst[2],
        "max_wiener_norm": max_wiener,
        "max_big_block_ratio": max_ratio,
        "cor32_condition_fired": fired,
    });
    Ok((t, detail))
}

fn borel_classes(c: &config::BorelClasses) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for &p in &c.primes {
        let rep = borel_class_count(p)?;
        let arithmetic = (p - 1) + 4 * ((p - 1) / 2).pow(2) == p * (p - 1);
        t.check(rep.classes == p + 3 && rep.borel_order == p * (p - 1), || format!("p = {p}: {} classes", rep.classes));
        t.check(arithmetic && rep.dimension_identity && rep.dims_match_classes, || format!("p = {p}: {rep:?}"));
        rows.push(json!({"p": p, "classes": rep.classes, "borel_order": rep.borel_order}));
    }
    Ok((t, json!({ "primes": rows })))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `[0; b_1, …, b_s]` from the inside out.
fn eval_cf(digits: &[u64]) -> (u128, u128) {
    digits.iter().rev().fold((0u128, 1u128), |(num, den), &b| (den, b as u128 * den + num))
}

/// Euclid's partial quotients, or `None` once one falls outside `keep`.
fn euclid(mut a: u64, mut q: u64, keep: &dyn Fn(u64) -> bool) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    while a != 0 {
        let b = q / a;
        if !keep(b) {
            return None;
        }
        out.push(b);
        (a, q) = (q % a, a);
    }
    Some(out)
}

fn continued_fractions(c: &config::ContinuedFractions) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut pairs = 0u64;
    for q in 1..=c.round_trip_max {
        for a in 0..q {
            if gcd(a, q) != 1 {
                continue;
            }
            pairs += 1;
            let e = expand(a, q)?;
            let value = continuant(&e.digits)?.value();
            let ok = eval_cf(&e.digits) == (a as u128, q as u128)
                && value == (a.into(), q.into())
                && e.digits.last().is_none_or(|&b| b >= 2);
            t.check(ok, || format!("{a}/{q} expands to {:?}", e.digits));
        }
    }

    let alphabet: Vec<u64> = (1..=c.det_alphabet).collect();
    let mut det = Tally::default();
    // short strings one at a time, then one parallel task per string of the split length
    let split = c.det_max_len.min(2);
    let mut level: Vec<(Vec<u64>, [u64; 4])> = vec![(Vec::new(), [1, 0, 0, 1])];
    for _ in 0..split {
        let mut next = Vec::new();
        for (d, m) in &level {
            det_node(&mut det, d, *m);
            for &b in &alphabet {
                let mut e = d.clone();
                e.push(b);
                next.push((e, continuant_step(*m, b).expect("short strings fit")));
            }
        }
        level = next;
    }
    let parts: Vec<Tally> = level
        .par_iter()
        .map(|(d, m)| {
            let mut tp = Tally::default();
            det_walk(&mut tp, &mut d.clone(), *m, c.det_max_len, &alphabet);
            tp
        })
        .collect();
    for tp in parts {
        det.absorb(tp);
    }
    let det_strings = det.items;
    t.absorb(det);

    let mut enums = Vec::new();
    for (digits, q_max) in &c.enumeration {
        let alpha = Alphabet::new(digits.clone())?;
        let mut got: Vec<(u64, u64, Vec<u64>)> =
            enumerate_f(&alpha, *q_max).into_iter().map(|f| (f.u, f.v, f.digits)).collect();
        got.sort();
        let mut oracle = Vec::new();
        for v in 1..=*q_max {
            for u in 0..v {
                if gcd(u, v) == 1 {
                    if let Some(d) = euclid(u, v, &|b| digits.contains(&b)) {
                        oracle.push((u, v, d));
                    }
                }
            }
        }
        oracle.sort();
        let count = count_f(&alpha, *q_max);
        t.check(got == oracle && count == oracle.len() as u64, || {
            format!("alphabet {alpha}, Q = {q_max}: {} enumerated, {} expected", got.len(), oracle.len())
        });
        enums.push(json!({"alphabet": digits, "Q": q_max, "size": oracle.len()}));
    }
    Ok((t, json!({"round_trip_pairs": pairs, "determinant_strings": det_strings, "enumeration": enums})))
}

/// `det = (-1)^s` in machine integers; strings of length ≤ 6 are also
/// compared with the arbitrary-precision continuant.
fn det_node(t: &mut Tally, digits: &[u64], m: [u64; 4]) {
    let sign: i128 = if digits.len().is_multiple_of(2) { 1 } else { -1 };
    let mut ok = continuant_det(m) == sign;
    if digits.len() <= 6 {
        let c = continuant(digits).expect("positive digits");
        ok &= c.det() == sign.into() && c.entries.iter().zip(m).all(|(x, y)| *x == y.into());
    }
    t.check(ok, || format!("determinant identity fails at {digits:?}"));
}

/// [`det_node`] at `digits` and every extension up to `max_len`. The last
/// level is checked inline since it holds most of the strings.
fn det_walk(t: &mut Tally, digits: &mut Vec<u64>, m: [u64; 4], max_len: usize, alphabet: &[u64]) {
    det_node(t, digits, m);
    if digits.len() >= max_len {
        return;
    }
    if digits.len() + 1 == max_len && max_len > 6 {
        // children have length max_len, so the sign flips once
        let sign: i128 = if max_len.is_multiple_of(2) { 1 } else { -1 };
        let mut bad = None;
        for &b in alphabet {
            match continuant_step(m, b) {
                Some(next) if continuant_det(next) == sign => {}
                _ => bad = bad.or(Some(b)),
            }
        }
        t.items += alphabet.len() as u64;
        if let Some(b) = bad {
            t.failures += alphabet.iter().filter(|&&c| continuant_step(m, c).map(continuant_det) != Some(sign)).count() as u64;
            if t.witness.is_none() {
                t.witness = Some(format!("determinant identity fails at {digits:?} + [{b}]"));
            }
        }
        return;
    }
    for &b in alphabet {
        let next = continuant_step(m, b).expect("no overflow at this length");
        digits.push(b);
        det_walk(t, digits, next, max_len, alphabet);
        digits.pop();
    }
}

fn dimension(c: &config::Dimension) -> Res<(Tally, Value)> {
    let alpha = Alphabet::new(c.alphabet.clone())?;
    let fit = dimension_estimate(&alpha, &c.qs)?;
    let mut t = Tally::default();
    t.check(fit.slope >= c.lo && fit.slope <= c.hi, || format!("slope {} outside [{}, {}]", fit.slope, c.lo, c.hi));
    let detail = json!({
        "alphabet": c.alphabet,
        "slope": fit.slope,
        "window": [c.lo, c.hi],
        "two_w2": TWO_W2,
        "table": fit.table,
    });
    Ok((t, detail))
}

fn zaremba(c: &config::Zaremba) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for run in &c.runs {
        let alpha = Alphabet::new(run.alphabet.clone())?;
        let primes = primes_in(2, run.p_max);
        let results: Vec<_> = primes
            .par_iter()
            .map(|&p| zaremba_search(p, &alpha, p.pow(run.max_exponent - 1)).map(|r| (p, r)))
            .collect::<Result<_, _>>()?;
        let mut max_exp: f64 = 0.0;
        let mut at_p = 0u64;
        let mut max_index = 0u64;
        for (p, res) in &results {
            let Some(r) = res else {
                t.check(false, || format!("alphabet {alpha}: no hit for p = {p}"));
                continue;
            };
            let ok = r.is_valid(&alpha)
                && r.q % p == 0
                && (r.q as u128) <= (*p as u128).pow(run.max_exponent)
                && gcd(r.a, r.q) == 1
                && eval_cf(&r.digits) == (r.a as u128, r.q as u128)
                && r.digits.iter().all(|b| run.alphabet.contains(b));
            t.check(ok, || format!("alphabet {alpha}: bad record {r:?}"));
            max_exp = max_exp.max(r.exponent);
            max_index = max_index.max(r.multiple_index);
            at_p += (r.q == *p) as u64;
        }
        rows.push(json!({
            "alphabet": run.alphabet,
            "p_max": run.p_max,
            "primes": primes.len(),
            "hits_at_q_equal_p": at_p,
            "max_exponent": max_exp,
            "max_multiple_index": max_index,
        }));
    }
    Ok((t, json!({ "runs": rows })))
}

fn modular(c: &config::Modular) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for &(p, m) in &c.cases {
        let alpha = Alphabet::up_to(m)?;
        let a = matrix_set_mod_p(&alpha, p - 1, p, Parity::Even)?;
        let s = verify_sigma_bounds(&a, m)?;
        t.check(s.holds(), || format!("p = {p}, M = {m}: {s:?}"));
        let lam = lambda_set(p, &alpha, 2)?;
        let grp = a.group();
        let b = grp.borel()?;
        let torus = grp.subgroup(&SubgroupKind::Torus, DEFAULT_BUDGET)?;
        let mut energies = Vec::new();
        for (name, x) in [("torus", &torus), ("borel", &b)] {
            let e = lambda_energy_check(&lam, x, m)?;
            t.check(e.energy_exact && e.energy_inv_bound, || format!("p = {p}, M = {m}, X = {name}: {e:?}"));
            energies.push(json!({
                "x": name,
                "energy": e.energy as u64,
                "energy_inv": e.energy_inv as u64,
                "b_lambda_exact": e.b_lambda_exact,
                "lambda_b_bound": e.lambda_b_bound,
            }));
        }
        let sq = lambda_square_check(p, &alpha)?;
        rows.push(json!({
            "p": p,
            "m": m,
            "size_a": s.size_a,
            "sigma_a_ainv": s.sigma_a_ainv,
            "sigma_ainv_a": s.sigma_ainv_a,
            "sharper_bound_holds": s.bound_ainv_a_sharp,
            "max_left": s.max_left,
            "max_right": s.max_right,
            "max_double": s.max_double,
            "size_lambda": lam.len(),
            "energies": energies,
            "lambda_square_outside_a": sq.violations,
        }));
    }
    Ok((t, json!({ "cases": rows })))
}

fn qr_example(c: &config::QrExample) -> Res<(Tally, Value)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for &p in &c.primes {
        let a = qr_fixture(p)?;
        let g = a.group();
        let lower = g.subgroup(&SubgroupKind::LowerBorel, DEFAULT_BUDGET)?;
        let a2 = product(&a, &a)?;
        t.check(!a.intersects(&lower) && !a2.intersects(&lower), || format!("p = {p}: A or A² meets B⁻"));
        let pi = power_intersect(&a, &lower, c.n_max)?;
        t.check(pi.first.is_none_or(|n| n >= 3), || format!("p = {p}: first power meeting B⁻ is {:?}", pi.first));
        rows.push(json!({"p": p, "size_a": a.len(), "first": pi.first, "sizes": pi.sizes}));
    }
    Ok((t, json!({ "primes": rows })))
}
