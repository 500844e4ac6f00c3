//! Batch configuration: one JSON document with a `version` field, a master
//! seed and a list of checks. Unknown fields are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    pub checks: Vec<CheckSpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Every acceptance criterion with its default parameters.
    pub fn acceptance(seed: u64) -> Self {
        Self {
            version: CONFIG_VERSION,
            name: "acceptance".into(),
            seed,
            out: None,
            format: Format::Json,
            checks: vec![
                CheckSpec::GroupOrders(Default::default()),
                CheckSpec::Bruhat(Default::default()),
                CheckSpec::DoubleCosets(Default::default()),
                CheckSpec::Growth(Default::default()),
                CheckSpec::Fourier(Default::default()),
                CheckSpec::BorelClasses(Default::default()),
                CheckSpec::ContinuedFractions(Default::default()),
                CheckSpec::Dimension(Default::default()),
                CheckSpec::Zaremba(Default::default()),
                CheckSpec::Modular(Default::default()),
                CheckSpec::QrExample(Default::default()),
            ],
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != CONFIG_VERSION {
            return Err(CliError::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.checks.is_empty() {
            return Err(CliError::Config("checks: list is empty".into()));
        }
        for (i, c) in self.checks.iter().enumerate() {
            c.validate().map_err(|m| CliError::Config(format!("checks[{i}] ({}): {m}", c.name())))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum CheckSpec {
    GroupOrders(GroupOrders),
    Bruhat(Bruhat),
    DoubleCosets(DoubleCosets),
    Growth(Growth),
    Fourier(Fourier),
    BorelClasses(BorelClasses),
    ContinuedFractions(ContinuedFractions),
    Dimension(Dimension),
    Zaremba(Zaremba),
    Modular(Modular),
    QrExample(QrExample),
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::GroupOrders(_) => "group-orders",
            CheckSpec::Bruhat(_) => "bruhat",
            CheckSpec::DoubleCosets(_) => "double-cosets",
            CheckSpec::Growth(_) => "growth",
            CheckSpec::Fourier(_) => "fourier",
            CheckSpec::BorelClasses(_) => "borel-classes",
            CheckSpec::ContinuedFractions(_) => "continued-fractions",
            CheckSpec::Dimension(_) => "dimension",
            CheckSpec::Zaremba(_) => "zaremba",
            CheckSpec::Modular(_) => "modular",
            CheckSpec::QrExample(_) => "qr-example",
        }
    }

    fn validate(&self) -> Result<(), String> {
        let groups = |gs: &[(usize, u64)]| {
            gs.iter().try_for_each(|&(n, p)| {
                if !(2..=4).contains(&n) {
                    return Err(format!("n = {n} outside 2..=4"));
                }
                if !pargrowth::ff::is_prime(p) {
                    return Err(format!("modulus must be prime, got {p}"));
                }
                Ok(())
            })
        };
        let primes = |ps: &[u64]| match ps.iter().find(|&&p| !pargrowth::ff::is_prime(p)) {
            Some(p) => Err(format!("modulus must be prime, got {p}")),
            None => Ok(()),
        };
        match self {
            CheckSpec::GroupOrders(c) => groups(&c.cases),
            CheckSpec::Bruhat(c) => groups(&c.groups).and(groups(&c.inclusion)),
            CheckSpec::DoubleCosets(c) => primes(&c.borel_primes).and(groups(&[c.parabolic_group])),
            CheckSpec::Growth(c) => primes(&c.primes),
            CheckSpec::Fourier(c) => {
                primes(&c.primes)?;
                match c.primes.iter().find(|&&p| p == 2 || p > pargrowth::fourier::MAX_P) {
                    Some(p) => Err(format!("p = {p} outside the supported odd range")),
                    None => Ok(()),
                }
            }
            CheckSpec::BorelClasses(c) => primes(&c.primes),
            CheckSpec::ContinuedFractions(c) => {
                if c.det_max_len > 14 {
                    Err("det_max_len above 14 is out of desk scale".into())
                } else {
                    Ok(())
                }
            }
            CheckSpec::Dimension(c) => {
                if c.qs.len() < 2 {
                    Err("need >= 2 points".into())
                } else if c.lo > c.hi {
                    Err("empty slope window".into())
                } else {
                    Ok(())
                }
            }
            CheckSpec::Zaremba(c) => {
                if c.runs.is_empty() {
                    Err("no runs".into())
                } else {
                    Ok(())
                }
            }
            CheckSpec::Modular(c) => primes(&c.cases.iter().map(|x| x.0).collect::<Vec<_>>()),
            CheckSpec::QrExample(c) => match c.primes.iter().find(|&&p| p % 4 != 3) {
                Some(p) => Err(format!("{p} is not 3 mod 4")),
                None => primes(&c.primes),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupOrders {
    /// `(n, p)`
    pub cases: Vec<(usize, u64)>,
}

impl Default for GroupOrders {
    fn default() -> Self {
        Self { cases: vec![(2, 3), (2, 5), (2, 7), (2, 11), (3, 2), (3, 3)] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bruhat {
    /// Groups checked element by element.
    pub groups: Vec<(usize, u64)>,
    /// Groups where `w_r B w ⊆ BwB ∪ B w_r w B` is checked for all `r, w`.
    pub inclusion: Vec<(usize, u64)>,
}

impl Default for Bruhat {
    fn default() -> Self {
        Self { groups: vec![(2, 5), (2, 7), (3, 3)], inclusion: vec![(3, 2)] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleCosets {
    /// `SL_2(F_q)` with the Borel: the maximum must equal `|B|/q`.
    pub borel_primes: Vec<u64>,
    /// Group whose maximal parabolics must satisfy `max ≤ 2|P|/q`.
    pub parabolic_group: (usize, u64),
}

impl Default for DoubleCosets {
    fn default() -> Self {
        Self { borel_primes: vec![5, 7, 11], parabolic_group: (3, 3) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Growth {
    pub primes: Vec<u64>,
    /// Random sets per prime.
    pub trials: usize,
    /// Coset-shaped fixtures per prime.
    pub fixtures: usize,
}

impl Default for Growth {
    fn default() -> Self {
        Self { primes: vec![7, 11], trials: 1000, fixtures: 60 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fourier {
    pub primes: Vec<u64>,
    /// Random functions (and random sets) per prime.
    pub trials: usize,
    /// Random instances of the coset-hitting implication per prime.
    pub cor32_trials: usize,
}

impl Default for Fourier {
    fn default() -> Self {
        Self { primes: vec![5, 7, 11, 13], trials: 100, cor32_trials: 500 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BorelClasses {
    pub primes: Vec<u64>,
}

impl Default for BorelClasses {
    fn default() -> Self {
        Self { primes: vec![5, 7, 11, 13] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuedFractions {
    /// Round trip for all `0 < a < q ≤ round_trip_max`.
    pub round_trip_max: u64,
    /// Determinant identity for all strings over `{1..det_alphabet}` up to
    /// this length.
    pub det_max_len: usize,
    pub det_alphabet: u64,
    /// `(alphabet, Q)` compared against the Euclid filter.
    pub enumeration: Vec<(Vec<u64>, u64)>,
}

impl Default for ContinuedFractions {
    fn default() -> Self {
        Self {
            round_trip_max: 500,
            det_max_len: 12,
            det_alphabet: 5,
            enumeration: vec![(vec![1, 2], 100), (vec![1, 2, 3, 4, 5], 100)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Dimension {
    pub alphabet: Vec<u64>,
    pub qs: Vec<u64>,
    pub lo: f64,
    pub hi: f64,
}

impl Default for Dimension {
    fn default() -> Self {
        Self { alphabet: vec![1, 2], qs: vec![100, 1000, 10_000, 100_000], lo: 1.0126, hi: 1.1126 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZarembaRun {
    pub alphabet: Vec<u64>,
    pub p_max: u64,
    /// A hit must satisfy `q ≤ p^max_exponent`; the search limit follows.
    pub max_exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Zaremba {
    pub runs: Vec<ZarembaRun>,
}

impl Default for Zaremba {
    fn default() -> Self {
        Self {
            runs: vec![
                ZarembaRun { alphabet: vec![1, 2, 3, 4, 5], p_max: 2000, max_exponent: 2 },
                ZarembaRun { alphabet: vec![1, 2], p_max: 500, max_exponent: 2 },
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Modular {
    /// `(p, M)` with alphabet `{1..M}`.
    pub cases: Vec<(u64, u64)>,
}

impl Default for Modular {
    fn default() -> Self {
        Self { cases: vec![(101, 5), (211, 3)] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QrExample {
    pub primes: Vec<u64>,
    pub n_max: u32,
}

impl Default for QrExample {
    fn default() -> Self {
        Self { primes: vec![7, 11], n_max: 8 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_round_trips() {
        let cfg = ExperimentConfig::acceptance(7);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn defaults_fill_missing_fields() {
        let cfg = ExperimentConfig::from_json(
            r#"{"version": 1, "name": "x", "checks": [{"check": "dimension", "alphabet": [1, 2, 3]}]}"#,
        )
        .unwrap();
        match &cfg.checks[0] {
            CheckSpec::Dimension(d) => {
                assert_eq!(d.alphabet, vec![1, 2, 3]);
                assert_eq!(d.qs.len(), 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            r#"{"version": 2, "name": "x", "checks": [{"check": "dimension"}]}"#,
            r#"{"version": 1, "name": "x", "checks": []}"#,
            r#"{"version": 1, "name": "x", "extra": 1, "checks": [{"check": "dimension"}]}"#,
            r#"{"version": 1, "name": "x", "checks": [{"check": "dimension", "qs": [10]}]}"#,
            r#"{"version": 1, "name": "x", "checks": [{"check": "dimension", "bogus": 1}]}"#,
            r#"{"version": 1, "name": "x", "checks": [{"check": "nope"}]}"#,
            r#"{"version": 1, "name": "x", "checks": [{"check": "group-orders", "cases": [[2, 4]]}]}"#,
            r#"{"version": 1, "name": "x", "checks": [{"check": "qr-example", "primes": [13]}]}"#,
            "{ not json",
        ];
        for text in bad {
            assert!(matches!(ExperimentConfig::from_json(text), Err(CliError::Config(_))), "{text}");
        }
    }
}
