//! Batch execution and the persisted [`RunRecord`].

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use pargrowth::random::derive_seed;
use serde::{Deserialize, Serialize};

use crate::checks::{run_check, CheckRecord};
use crate::config::{ExperimentConfig, Format};
use crate::CliError;

pub const BUILD: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("PARGROWTH_GIT_REV"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub build: String,
    pub results: Vec<CheckRecord>,
    pub passed: u64,
    pub failed: u64,
    /// Wall time per check, keyed by check name.
    pub timings_ms: BTreeMap<String, u64>,
}

/// The reproducible part of a record: everything but timestamp, build and timings.
#[derive(Serialize)]
struct Payload<'a> {
    config: &'a ExperimentConfig,
    results: &'a [CheckRecord],
    passed: u64,
    failed: u64,
}

impl RunRecord {
    pub fn payload(&self) -> String {
        let p = Payload { config: &self.config, results: &self.results, passed: self.passed, failed: self.failed };
        serde_json::to_string(&p).expect("records serialize")
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let text = match format {
            Format::Json => serde_json::to_string_pretty(self).expect("records serialize") + "\n",
            Format::Csv => self.csv()?,
            Format::Table => self.table(),
        };
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["criterion", "check", "pass", "items", "failures", "ms", "witness"])
            .map_err(|e| CliError::Io(e.into()))?;
        for r in &self.results {
            let ms = self.timings_ms.get(&r.check).copied().unwrap_or(0);
            w.write_record([
                r.criterion.to_string(),
                r.check.clone(),
                r.pass.to_string(),
                r.items.to_string(),
                r.failures.to_string(),
                ms.to_string(),
                r.witness.clone().unwrap_or_default(),
            ])
            .map_err(|e| CliError::Io(e.into()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let ms = self.timings_ms.get(&r.check).copied().unwrap_or(0);
            out += &summary_line(r, ms);
            out.push('\n');
        }
        out += &format!("{} passed, {} failed\n", self.passed, self.failed);
        out
    }
}

/// `PASS  3 double-cosets  (12 items, 104 ms)` plus the witness on failure.
pub fn summary_line(r: &CheckRecord, ms: u64) -> String {
    let mut s = format!(
        "{}  {:>2} {:<20} ({} items, {} ms)",
        if r.pass { "PASS" } else { "FAIL" },
        r.criterion,
        r.check,
        r.items,
        ms
    );
    if let Some(w) = &r.witness {
        s += &format!("\n      first failure: {w}");
    }
    s
}

/// Runs every check of `cfg` on a pool of `jobs` workers. Check `i` gets
/// seed `derive_seed(cfg.seed, i)`; `progress` sees each record as it lands.
pub fn run_config(
    cfg: &ExperimentConfig,
    jobs: usize,
    mut progress: impl FnMut(&CheckRecord, u64),
) -> Result<RunRecord, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut results = Vec::with_capacity(cfg.checks.len());
    let mut timings_ms = BTreeMap::new();
    for (i, spec) in cfg.checks.iter().enumerate() {
        let start = Instant::now();
        let rec = pool.install(|| run_check(spec, derive_seed(cfg.seed, i as u64)))?;
        let ms = start.elapsed().as_millis() as u64;
        progress(&rec, ms);
        *timings_ms.entry(rec.check.clone()).or_insert(0) += ms;
        results.push(rec);
    }
    let passed = results.iter().filter(|r| r.pass).count() as u64;
    Ok(RunRecord {
        config: cfg.clone(),
        timestamp,
        build: BUILD.into(),
        failed: results.len() as u64 - passed,
        passed,
        results,
        timings_ms,
    })
}
