//! Subcommands. Each one builds a [`Report`] (per-item rows, a summary
//! object and a failure tally) which [`render`] turns into an aligned table,
//! JSON lines or CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pargrowth::cfrac::{
    aba_size, continuant, expand, lambda_energy_check, lambda_set, lambda_square_check, matrix_set_mod_p,
    matrix_tuples_mod_p, parity_counts, verify_sigma_bounds, zaremba_search_with, Alphabet, CFExpansion, Parity,
    Strategy,
};
use pargrowth::ff::{is_prime, primes_in};
use pargrowth::fourier::{cor32_verify, AffElem, AffGroup, RepLabel};
use pargrowth::matgrp::{ParabolicSpec, SubgroupKind};
use pargrowth::random::{derive_seed, random_subset, rng, Rng};
use pargrowth::setops::{power_intersect, product, product_many, qr_fixture, verify_growth};
use pargrowth::{ElemSet, SlGroup, WeylElem, DEFAULT_BUDGET};
use rand::Rng as _;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::checks::run_check;
use crate::config::{self, CheckSpec, ExperimentConfig, Format};
use crate::record::{run_config, summary_line};
use crate::CliError;

pub const OUT_DIR_ENV: &str = "PARGROWTH_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "pargrowth", version, about = "Growth in parabolic subgroups, Fourier analysis on Aff(F_p), bounded continued fractions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads. Never changes the output.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file; for `experiment`, where the run record goes.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Default directory for output files when `--out` is absent.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    /// JSON lines: one object per item, then `{"summary": …}`.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// CSV rows; the summary goes to stderr.
    #[arg(long, global = true)]
    pub csv: bool,
}

impl Global {
    pub fn format(&self) -> Format {
        match (self.json, self.csv) {
            (true, _) => Format::Json,
            (_, true) => Format::Csv,
            _ => Format::Table,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Orders of SL_n(F_p) and its standard subgroups, with the Bruhat census.
    GroupStats(GroupArgs),
    /// Round-trips every element through its Bruhat normal form.
    Bruhat(BruhatArgs),
    /// Checks the product-set growth bounds against a parabolic subgroup.
    #[command(alias = "growth")]
    GrowthVerify(GrowthArgs),
    /// Fourier identities and estimates on Aff(F_p).
    #[command(alias = "fourier")]
    FourierCheck(FourierArgs),
    /// Smallest multiple q of p with a/q having partial quotients in the alphabet.
    Zaremba(ZarembaArgs),
    /// Growth exponent of |F_A(Q)| from counts at several Q.
    Dimension(DimensionArgs),
    /// Continued fraction expansion and continuant of a/q.
    CfExpand(CfArgs),
    /// Continuant matrices reduced mod p and their coset statistics.
    ModularSet(ModularArgs),
    /// Runs a batch config and persists the run record.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    #[arg(short = 'n', default_value_t = 2)]
    pub n: usize,
    #[arg(short = 'p')]
    pub p: u64,
}

#[derive(Args, Debug)]
pub struct BruhatArgs {
    #[arg(short = 'n', default_value_t = 2)]
    pub n: usize,
    #[arg(short = 'p')]
    pub p: u64,
    /// Also check w_r B w ⊆ BwB ∪ Bw_r wB for every r and w.
    #[arg(long)]
    pub inclusion: bool,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[arg(short = 'n', default_value_t = 2)]
    pub n: usize,
    #[arg(short = 'p')]
    pub p: u64,
    /// Simple-root indices J of the parabolic P_J; empty is the Borel.
    #[arg(long, value_delimiter = ',')]
    pub parabolic: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Fixed |A|; log-uniform in [1, |G|] when absent.
    #[arg(long)]
    pub size: Option<usize>,
    /// Use A = P ∪ Pw₀P, for which AP = PA = A.
    #[arg(long, conflicts_with = "qr_example")]
    pub tightness: bool,
    /// Use the quadratic-residue set and find the first power meeting B⁻.
    #[arg(long)]
    pub qr_example: bool,
    #[arg(long, default_value_t = 8)]
    pub n_max: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FourierCheck {
    Parseval,
    Inverse,
    Conv,
    Wiener,
    /// `‖Â(π)‖ < √(|A|p)` on the big representation.
    Bound,
    Cor32,
}

#[derive(Args, Debug)]
pub struct FourierArgs {
    #[arg(short = 'p')]
    pub p: u64,
    #[arg(long, value_enum)]
    pub check: FourierCheck,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Dfs,
    Scan,
}

#[derive(Args, Debug)]
pub struct ZarembaArgs {
    /// A single prime; overrides the range.
    #[arg(short = 'p')]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 2)]
    pub p_min: u64,
    #[arg(long, default_value_t = 100)]
    pub p_max: u64,
    /// Digits, e.g. `1,2,5` or `1..5`.
    #[arg(long, default_value = "1..5", value_parser = parse_alphabet)]
    pub alphabet: Alphabet,
    /// Largest multiple index q/p tried; defaults to p, i.e. q ≤ p².
    #[arg(long)]
    pub limit: Option<u64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Dfs)]
    pub strategy: StrategyArg,
}

#[derive(Args, Debug)]
pub struct DimensionArgs {
    #[arg(long, default_value = "1,2", value_parser = parse_alphabet)]
    pub alphabet: Alphabet,
    #[arg(long = "Q", value_delimiter = ',', default_value = "100,1000,10000,100000")]
    pub qs: Vec<u64>,
}

#[derive(Args, Debug)]
pub struct CfArgs {
    #[arg(required_unless_present = "digits")]
    pub a: Option<u64>,
    #[arg(required_unless_present = "digits")]
    pub q: Option<u64>,
    /// Evaluate `[0; b_1, …, b_s]` instead.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["a", "q"])]
    pub digits: Option<Vec<u64>>,
    /// Report whether every partial quotient lies in this alphabet.
    #[arg(long, value_parser = parse_alphabet)]
    pub alphabet: Option<Alphabet>,
}

#[derive(Args, Debug)]
pub struct ModularArgs {
    #[arg(short = 'p')]
    pub p: u64,
    #[arg(long, default_value = "1..5", value_parser = parse_alphabet)]
    pub alphabet: Alphabet,
    /// Denominator bound; defaults to p - 1.
    #[arg(long = "Q")]
    pub q_max: Option<u64>,
    #[arg(long, default_value = "even")]
    pub parity: Parity,
    /// Coset statistics against the upper Borel.
    #[arg(long)]
    pub sigma: bool,
    /// Energies of Λ (Q = √(p-1)) against the torus and the Borel.
    #[arg(long)]
    pub lambda: bool,
    /// |ABA| and |A⁻¹BA⁻¹| against p³.
    #[arg(long)]
    pub aba: bool,
    /// Emit every matrix (a, b, c, d) as an item.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(required_unless_present = "template")]
    pub config: Option<PathBuf>,
    /// Print the full acceptance config for `--seed` and exit.
    #[arg(long)]
    pub template: bool,
}

/// Comma-separated digits; `a..b` expands to the inclusive range.
pub fn parse_alphabet(s: &str) -> Result<Alphabet, String> {
    let mut digits = Vec::new();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().map_err(|e| format!("{part}: {e}"))?;
            let hi: u64 = hi.trim().parse().map_err(|e| format!("{part}: {e}"))?;
            digits.extend(lo..=hi);
        } else {
            digits.push(part.parse().map_err(|e| format!("{part}: {e}"))?);
        }
    }
    Alphabet::new(digits).map_err(|e| e.to_string())
}

/// Rows, a summary and the failure tally of one command.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub items: Vec<Value>,
    /// `Null` suppresses the summary line.
    pub summary: Value,
    pub failures: u64,
    pub witness: Option<String>,
}

impl Report {
    fn fail(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(what());
            }
        }
    }
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let g = &cli.global;
    if g.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if let Command::Experiment(a) = &cli.command {
        return experiment(a, g);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = g.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start workers: {e}")))?;
    let report = pool.install(|| execute(&cli.command, g.seed))?;
    let format = g.format();
    let text = render(&report, format)?;
    match output_path(g, command_name(&cli.command), format) {
        Some(path) => {
            write_file(&path, &text)?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(finish(&report))
}

fn finish(report: &Report) -> i32 {
    if report.failures == 0 {
        return 0;
    }
    eprintln!("{} verification failure(s)", report.failures);
    if let Some(w) = &report.witness {
        eprintln!("first failure: {w}");
    }
    1
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::GroupStats(_) => "group-stats",
        Command::Bruhat(_) => "bruhat",
        Command::GrowthVerify(_) => "growth-verify",
        Command::FourierCheck(_) => "fourier-check",
        Command::Zaremba(_) => "zaremba",
        Command::Dimension(_) => "dimension",
        Command::CfExpand(_) => "cf-expand",
        Command::ModularSet(_) => "modular-set",
        Command::Experiment(_) => "experiment",
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Table => "txt",
        Format::Json => "jsonl",
        Format::Csv => "csv",
    }
}

fn output_path(g: &Global, name: &str, format: Format) -> Option<PathBuf> {
    g.out.clone().or_else(|| g.out_dir.as_ref().map(|d| d.join(format!("{name}.{}", extension(format)))))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs a single-shot command on the current rayon pool.
pub fn execute(command: &Command, seed: u64) -> Result<Report, CliError> {
    match command {
        Command::GroupStats(a) => group_stats(a),
        Command::Bruhat(a) => bruhat(a, seed),
        Command::GrowthVerify(a) => growth(a, seed),
        Command::FourierCheck(a) => fourier(a, seed),
        Command::Zaremba(a) => zaremba(a),
        Command::Dimension(a) => dimension(a),
        Command::CfExpand(a) => cf_expand(a),
        Command::ModularSet(a) => modular(a),
        Command::Experiment(_) => Err(CliError::Usage("experiment runs through `run`".into())),
    }
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    let mut out = String::new();
    match format {
        Format::Json => {
            for item in &report.items {
                out += &serde_json::to_string(item).expect("values serialize");
                out.push('\n');
            }
            if !report.summary.is_null() {
                out += &serde_json::to_string(&json!({ "summary": report.summary })).expect("values serialize");
                out.push('\n');
            }
        }
        Format::Csv => {
            // plot-ready rows only; the summary goes to stderr
            let cols = columns(&report.items);
            if !cols.is_empty() {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&cols).map_err(|e| CliError::Io(e.into()))?;
                for item in &report.items {
                    w.write_record(cols.iter().map(|c| cell(item.get(c)))).map_err(|e| CliError::Io(e.into()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
                out = String::from_utf8(bytes).expect("csv is utf-8");
            }
            if !report.summary.is_null() {
                eprintln!("{}", serde_json::to_string(&report.summary).expect("values serialize"));
            }
        }
        Format::Table => {
            let cols = columns(&report.items);
            if !cols.is_empty() {
                let rows: Vec<Vec<String>> =
                    report.items.iter().map(|it| cols.iter().map(|c| cell(it.get(c))).collect()).collect();
                let widths: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .map(|(i, c)| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0).max(c.len()))
                    .collect();
                let line = |cells: &[String]| {
                    let mut s = String::new();
                    for (c, w) in cells.iter().zip(&widths) {
                        s += &format!("{c:>w$}  ");
                    }
                    s.trim_end().to_string() + "\n"
                };
                out += &line(&cols);
                for r in &rows {
                    out += &line(r);
                }
            }
            if let Value::Object(m) = &report.summary {
                if !cols.is_empty() {
                    out.push('\n');
                }
                for (k, v) in m {
                    out += &format!("{k}: {}\n", cell(Some(v)));
                }
            }
        }
    }
    Ok(out)
}

/// Keys of the items in first-seen order.
fn columns(items: &[Value]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for it in items {
        if let Value::Object(m) = it {
            for k in m.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    cols
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(a)) => a.iter().map(|x| cell(Some(x))).collect::<Vec<_>>().join(" "),
        Some(other) => other.to_string(),
    }
}

fn group_stats(a: &GroupArgs) -> Result<Report, CliError> {
    let g = SlGroup::new(a.n, a.p)?;
    let order = g.order()?;
    let borel = g.borel()?.len() as u64;
    let unipotent = g.subgroup(&SubgroupKind::Unipotent, DEFAULT_BUDGET)?.len();
    let torus = g.subgroup(&SubgroupKind::Torus, DEFAULT_BUDGET)?.len();
    let census = g.bruhat_cell_census(DEFAULT_BUDGET)?;
    let mut rep = Report::default();
    let mut total = 0u64;
    for (w, &size) in &census {
        let expected = borel * a.p.pow(w.length() as u32);
        rep.fail(size == expected, || format!("cell {w} has {size} elements, expected {expected}"));
        total += size;
        rep.items.push(json!({"w": w.to_string(), "length": w.length(), "size": size, "expected": expected}));
    }
    rep.fail(total as u128 == order, || format!("cells cover {total} of {order} elements"));
    let maximal: Vec<Value> = (1..a.n)
        .map(|r| {
            let j: Vec<usize> = (1..a.n).filter(|&x| x != r).collect();
            ParabolicSpec::new(a.n, &j)?.order(a.p).map(|o| json!({"J": j, "order": o as u64}))
        })
        .collect::<Result<_, _>>()?;
    rep.summary = json!({
        "n": a.n,
        "p": a.p,
        "order": order as u64,
        "borel": borel,
        "unipotent": unipotent,
        "torus": torus,
        "maximal_parabolics": maximal,
        "cells": census.len(),
    });
    Ok(rep)
}

fn from_check(spec: CheckSpec, seed: u64, items_key: &str) -> Result<Report, CliError> {
    let rec = run_check(&spec, seed)?;
    let mut detail = rec.detail;
    let items = match detail.get_mut(items_key).map(Value::take) {
        Some(Value::Array(v)) => v,
        _ => Vec::new(),
    };
    Ok(Report {
        items,
        summary: json!({"check": rec.check, "items": rec.items, "failures": rec.failures}),
        failures: rec.failures,
        witness: rec.witness,
    })
}

fn bruhat(a: &BruhatArgs, seed: u64) -> Result<Report, CliError> {
    let inclusion = if a.inclusion { vec![(a.n, a.p)] } else { Vec::new() };
    let spec = CheckSpec::Bruhat(config::Bruhat { groups: vec![(a.n, a.p)], inclusion });
    let mut rep = from_check(spec, seed, "groups")?;
    // flatten the single group into one row per cell
    let cells = rep.items.pop().and_then(|mut g| g.get_mut("cells").map(Value::take));
    if let Some(Value::Array(cells)) = cells {
        rep.items = cells;
    }
    Ok(rep)
}

fn log_uniform(r: &mut Rng, n: usize) -> usize {
    let k = (r.gen::<f64>() * (n as f64).ln()).exp().round() as usize;
    k.clamp(1, n)
}

fn growth(a: &GrowthArgs, seed: u64) -> Result<Report, CliError> {
    let g = SlGroup::new(a.n, a.p)?;
    if a.qr_example {
        return qr_example(a);
    }
    let spec = ParabolicSpec::new(a.n, &a.parabolic)?;
    let p_set = g.subgroup(&SubgroupKind::Parabolic(spec), DEFAULT_BUDGET)?;
    let mut rep = Report::default();
    if a.tightness {
        let w = g.weyl_rep(&WeylElem::longest(a.n));
        let set = p_set.union(&product_many(&[&p_set, &ElemSet::singleton(g, w), &p_set])?);
        let (ap, pa) = (product(&set, &p_set)?, product(&p_set, &set)?);
        let r = verify_growth(&set, &p_set)?;
        rep.fail(ap == set && pa == set, || format!("AP has {}, PA has {}, A has {}", ap.len(), pa.len(), set.len()));
        rep.fail(r.holds(), || format!("{r:?}"));
        let mut s = growth_row(&r);
        s.insert("ap_equals_a".into(), json!(ap == set));
        s.insert("pa_equals_a".into(), json!(pa == set));
        if a.n == 2 {
            s.insert("p_times_one_plus_q".into(), json!(p_set.len() as u64 * (1 + a.p)));
        }
        rep.summary = Value::Object(s);
        return Ok(rep);
    }
    let all = g.enumerate(DEFAULT_BUDGET)?;
    let rows: Vec<_> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(derive_seed(seed, i));
            let k = a.size.unwrap_or_else(|| log_uniform(&mut r, all.len()));
            verify_growth(&random_subset(&all, k, &mut r), &p_set)
        })
        .collect::<Result<_, _>>()?;
    let mut held = 0u64;
    for (i, r) in rows.iter().enumerate() {
        rep.fail(r.holds(), || format!("trial {i}: {r:?}"));
        held += r.holds() as u64;
        let mut row = Map::new();
        row.insert("trial".into(), json!(i));
        row.extend(growth_row(r));
        rep.items.push(Value::Object(row));
    }
    rep.summary = json!({
        "n": a.n,
        "p": a.p,
        "parabolic": a.parabolic,
        "size_p": p_set.len(),
        "trials": a.trials,
        "held": held,
        "seed": seed,
    });
    Ok(rep)
}

fn growth_row(r: &pargrowth::setops::GrowthReport) -> Map<String, Value> {
    let v = json!({
        "size_a": r.size_a,
        "size_ap": r.size_ap,
        "size_pa": r.size_pa,
        "size_a_cap_p": r.size_a_cap_p,
        "delta": r.delta,
        "alt_small": r.alt_small,
        "alt_growth": r.alt_growth,
        "max_bound": r.max_bound,
        "coset_bound": r.coset_bound,
        "holds": r.holds(),
    });
    match v {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

fn qr_example(a: &GrowthArgs) -> Result<Report, CliError> {
    let set = qr_fixture(a.p)?;
    let g = set.group();
    let lower = g.subgroup(&SubgroupKind::LowerBorel, DEFAULT_BUDGET)?;
    let pi = power_intersect(&set, &lower, a.n_max)?;
    let mut rep = Report::default();
    rep.fail(pi.first.is_none_or(|n| n >= 3), || format!("A^{} meets B⁻", pi.first.unwrap_or(0)));
    for (i, s) in pi.sizes.iter().enumerate() {
        let n = i as u32 + 1;
        rep.items.push(json!({"power": n, "size": s, "meets_lower_borel": pi.first == Some(n)}));
    }
    rep.summary = json!({
        "p": a.p,
        "size_a": set.len(),
        "first": pi.first,
        "stabilized_at": pi.stabilized_at,
        "n_max": a.n_max,
    });
    Ok(rep)
}

fn random_function(r: &mut Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}

fn random_elems(r: &mut Rng, g: &AffGroup, k: usize) -> Vec<AffElem> {
    rand::seq::index::sample(r, g.order(), k).into_iter().map(|i| g.from_index(i)).collect()
}

fn fourier(a: &FourierArgs, seed: u64) -> Result<Report, CliError> {
    if !is_prime(a.p) {
        return Err(pargrowth::Error::NotPrime(a.p).into());
    }
    if a.p.is_multiple_of(2) {
        return Err(CliError::Usage(format!("p must be an odd prime, got {}", a.p)));
    }
    let g = AffGroup::new(a.p)?;
    let n = g.order();
    let gen = pargrowth::ff::primitive_root(a.p)?.value();
    let rows: Vec<(bool, Value)> = (0..a.trials)
        .into_par_iter()
        .map(|i| -> Result<(bool, Value), CliError> {
            let mut r = rng(derive_seed(seed, i));
            Ok(match a.check {
                FourierCheck::Parseval | FourierCheck::Inverse | FourierCheck::Conv => {
                    let f = random_function(&mut r, n);
                    let o = match a.check {
                        FourierCheck::Parseval => g.parseval_check(&f)?,
                        FourierCheck::Inverse => g.inversion_check(&f)?,
                        _ => g.convolution_check(&f, &random_function(&mut r, n))?,
                    };
                    (o.pass, json!({"trial": i, "lhs": o.lhs, "rhs": o.rhs, "pass": o.pass}))
                }
                FourierCheck::Wiener => {
                    let gens: Vec<AffElem> = (0..r.gen_range(1..=2)).map(|_| g.from_index(r.gen_range(0..n))).collect();
                    let s = g.generated(&gens);
                    let w = g.wiener_norm_of_set(&s)?;
                    let ok = w <= 1.0 + 1e-9;
                    (ok, json!({"trial": i, "order": s.len(), "wiener_norm": w, "pass": ok}))
                }
                FourierCheck::Bound => {
                    let k = r.gen_range(1..n);
                    let set = random_elems(&mut r, &g, k);
                    let norm = g.fourier(&g.indicator(&set))?.op_norm(RepLabel::Big)?;
                    let bound = ((k as u64 * a.p) as f64).sqrt();
                    (norm < bound, json!({"trial": i, "size": k, "norm": norm, "bound": bound, "pass": norm < bound}))
                }
                FourierCheck::Cor32 => {
                    let gamma = match i % 3 {
                        0 => g.torus(),
                        1 => g.whole(),
                        _ => g.generated(&[AffElem { a: gen, b: r.gen_range(0..a.p as u32) }]),
                    };
                    let k = r.gen_range(1..=n);
                    let set = random_elems(&mut r, &g, k);
                    let z = g.from_index(r.gen_range(0..n));
                    let c = cor32_verify(&g, &set, &gamma, &z, 1 + (i % 3) as u32)?;
                    let ok = c.implication_ok();
                    (ok, json!({
                        "trial": i,
                        "n": c.n,
                        "size_a": c.size_a,
                        "size_gamma": c.size_gamma,
                        "condition": c.condition,
                        "meets_left_coset": c.meets_left_coset,
                        "meets_right_coset": c.meets_right_coset,
                        "pass": ok,
                    }))
                }
            })
        })
        .collect::<Result<_, _>>()?;
    let mut rep = Report::default();
    let mut passes = 0u64;
    for (ok, row) in rows {
        rep.fail(ok, || row.to_string());
        passes += ok as u64;
        rep.items.push(row);
    }
    let check = format!("{:?}", a.check).to_lowercase();
    rep.summary = json!({"p": a.p, "check": check, "trials": a.trials, "passes": passes, "seed": seed});
    Ok(rep)
}

fn zaremba(a: &ZarembaArgs) -> Result<Report, CliError> {
    let primes = match a.p {
        Some(p) if !is_prime(p) => return Err(pargrowth::Error::NotPrime(p).into()),
        Some(p) => vec![p],
        None => primes_in(a.p_min, a.p_max),
    };
    if primes.is_empty() {
        return Ok(Report { summary: Value::Null, ..Report::default() });
    }
    let strategy = match a.strategy {
        StrategyArg::Dfs => Strategy::DigitDfs,
        StrategyArg::Scan => Strategy::NumeratorScan,
    };
    let results: Vec<_> = primes
        .par_iter()
        .map(|&p| zaremba_search_with(p, &a.alphabet, a.limit.unwrap_or(p), strategy))
        .collect::<Result<_, _>>()?;
    let mut rep = Report::default();
    let (mut max_exp, mut sum_exp, mut found, mut at_p, mut max_index) = (0.0f64, 0.0f64, 0u64, 0u64, 0u64);
    for (&p, res) in primes.iter().zip(&results) {
        match res {
            Some(r) => {
                rep.fail(r.is_valid(&a.alphabet), || format!("invalid record {r:?}"));
                found += 1;
                max_exp = max_exp.max(r.exponent);
                sum_exp += r.exponent;
                at_p += (r.q == p) as u64;
                max_index = max_index.max(r.multiple_index);
                rep.items.push(json!({
                    "p": p, "q": r.q, "a": r.a, "digits": r.digits,
                    "multiple_index": r.multiple_index, "exponent": r.exponent,
                }));
            }
            None => {
                rep.fail(false, || format!("no a/q with p = {p} within the multiple limit"));
                rep.items.push(json!({
                    "p": p, "q": null, "a": null, "digits": [], "multiple_index": null, "exponent": null,
                }));
            }
        }
    }
    rep.summary = json!({
        "alphabet": a.alphabet.digits(),
        "primes": primes.len(),
        "found": found,
        "misses": primes.len() as u64 - found,
        "hits_at_q_equal_p": at_p,
        "max_multiple_index": max_index,
        "max_exponent": if found > 0 { json!(max_exp) } else { Value::Null },
        "mean_exponent": if found > 0 { json!(sum_exp / found as f64) } else { Value::Null },
    });
    Ok(rep)
}

fn dimension(a: &DimensionArgs) -> Result<Report, CliError> {
    if a.qs.len() < 2 {
        return Err(CliError::Usage("need ≥ 2 points".into()));
    }
    let fit = pargrowth::cfrac::dimension_estimate(&a.alphabet, &a.qs)?;
    let items = fit
        .table
        .iter()
        .map(|&(q, c)| json!({"Q": q, "count": c, "log_Q": (q as f64).ln(), "log_count": (c as f64).ln()}))
        .collect();
    let summary = json!({
        "alphabet": a.alphabet.digits(),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "dimension": fit.dimension(),
    });
    Ok(Report { items, summary, ..Report::default() })
}

fn cf_expand(a: &CfArgs) -> Result<Report, CliError> {
    let e = match (&a.digits, a.a, a.q) {
        (Some(d), _, _) => CFExpansion::from_digits(d.clone())?,
        (None, Some(x), Some(q)) => expand(x, q)?,
        _ => return Err(CliError::Usage("give a and q, or --digits".into())),
    };
    let c = continuant(&e.digits)?;
    let mut summary = json!({
        "a": e.num.to_string(),
        "q": e.den.to_string(),
        "digits": e.digits,
        "continuant": c.entries.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "det": c.det().to_string(),
    });
    if let Some(alpha) = &a.alphabet {
        summary["in_alphabet"] = json!(e.digits.iter().all(|&b| alpha.contains(b)));
    }
    Ok(Report { summary, ..Report::default() })
}

fn modular(a: &ModularArgs) -> Result<Report, CliError> {
    if !is_prime(a.p) {
        return Err(pargrowth::Error::NotPrime(a.p).into());
    }
    let q_max = a.q_max.unwrap_or(a.p - 1);
    let (even, odd) = parity_counts(&a.alphabet, q_max);
    let tuples = matrix_tuples_mod_p(&a.alphabet, q_max, a.p, a.parity)?;
    let mut rep = Report::default();
    if a.list {
        rep.items = tuples.iter().map(|t| json!({"a": t[0], "b": t[1], "c": t[2], "d": t[3]})).collect();
    }
    let parity = match a.parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Both => "both",
    };
    let mut summary = json!({
        "p": a.p,
        "alphabet": a.alphabet.digits(),
        "Q": q_max,
        "parity": parity,
        "even_strings": even,
        "odd_strings": odd,
        "size": tuples.len(),
    });
    let m = a.alphabet.max();
    if a.sigma || a.aba {
        if a.parity != Parity::Even {
            return Err(CliError::Usage("--sigma and --aba need --parity even".into()));
        }
        let set = matrix_set_mod_p(&a.alphabet, q_max, a.p, Parity::Even)?;
        if a.sigma {
            let s = verify_sigma_bounds(&set, m)?;
            rep.fail(s.holds(), || format!("{s:?}"));
            summary["sigma"] = serde_json::to_value(&s).expect("reports serialize");
        }
        if a.aba {
            let b = set.group().borel()?;
            summary["aba"] = serde_json::to_value(aba_size(&set, &b, DEFAULT_BUDGET)?).expect("reports serialize");
        }
    }
    if a.lambda {
        let lam = lambda_set(a.p, &a.alphabet, 2)?;
        let grp = lam.group();
        let mut energies = Vec::new();
        for (name, kind) in [("torus", SubgroupKind::Torus), ("borel", SubgroupKind::Borel)] {
            let x = grp.subgroup(&kind, DEFAULT_BUDGET)?;
            let e = lambda_energy_check(&lam, &x, m)?;
            rep.fail(e.energy_exact && e.energy_inv_bound, || format!("X = {name}: {e:?}"));
            let mut v = serde_json::to_value(&e).expect("reports serialize");
            v["x"] = json!(name);
            energies.push(v);
        }
        let sq = lambda_square_check(a.p, &a.alphabet)?;
        summary["lambda"] = json!({
            "size": lam.len(),
            "energies": energies,
            "square": serde_json::to_value(&sq).expect("reports serialize"),
        });
    }
    rep.summary = summary;
    Ok(rep)
}

fn experiment(a: &ExperimentArgs, g: &Global) -> Result<i32, CliError> {
    if a.template {
        let cfg = ExperimentConfig::acceptance(g.seed);
        println!("{}", serde_json::to_string_pretty(&cfg).expect("configs serialize"));
        return Ok(0);
    }
    let cfg = ExperimentConfig::load(a.config.as_deref().expect("clap enforces a config path"))?;
    let jobs = g.jobs.unwrap_or_else(rayon::current_num_threads);
    let format = g.format();
    let record = run_config(&cfg, jobs, |r, ms| {
        if format == Format::Table {
            println!("{}", summary_line(r, ms));
        }
    })?;
    let path = g
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .or_else(|| g.out_dir.as_ref().map(|d| d.join(format!("{}.json", cfg.name))))
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", cfg.name)));
    record.write(&path, Format::Json)?;
    match format {
        Format::Table => println!("{} passed, {} failed; record in {}", record.passed, record.failed, path.display()),
        Format::Csv => print!("{}", record.csv()?),
        Format::Json => {
            for r in &record.results {
                println!("{}", serde_json::to_string(r).expect("records serialize"));
            }
            let summary = json!({"summary": {"passed": record.passed, "failed": record.failed, "record": path}});
            println!("{summary}");
        }
    }
    let first = record.results.iter().find(|r| !r.pass);
    Ok(finish(&Report {
        failures: record.failed,
        witness: first.map(|r| format!("{}: {}", r.check, r.witness.as_deref().unwrap_or("no items checked"))),
        ..Report::default()
    }))
}
