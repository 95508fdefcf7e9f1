//! Report model and writers.
//!
//! The JSON report is a pure function of the configuration and seed; run
//! metadata (clock time, thread count, elapsed time) goes to a separate
//! `*.meta.json` file. Floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;
use ypl_core::algebra::ResidualReport;
use ypl_core::dynamics::ScanRow;
use ypl_core::realizations::GenParams;

pub const SCHEMA: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenEcho {
    #[serde(rename = "A")]
    pub amp_a: f64,
    #[serde(rename = "B")]
    pub amp_b: f64,
    pub phi: f64,
    pub psi: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl From<&GenParams> for GenEcho {
    fn from(g: &GenParams) -> Self {
        GenEcho { amp_a: g.amp_a, amp_b: g.amp_b, phi: g.phi, psi: g.psi, a: g.a.clone(), b: g.b.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub profile: String,
    pub gen: Option<GenEcho>,
}

/// One residual sweep over sampled phase points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub suite: String,
    pub model: String,
    pub case: String,
    pub relation: String,
    pub samples: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub tol: f64,
    pub pass: bool,
    pub rejects: u64,
    pub fd_jets: bool,
    pub params: ParamsJson,
}

impl ResidualEntry {
    pub fn from_report(suite: &str, r: &ResidualReport) -> Self {
        ResidualEntry {
            suite: suite.into(),
            model: r.model.clone(),
            case: r.case.clone(),
            relation: r.relation.clone(),
            samples: r.samples,
            max_abs: r.max_abs,
            mean_abs: r.mean_abs,
            tol: r.tol,
            pass: r.pass,
            rejects: r.rejects,
            fd_jets: r.fd_jets,
            params: ParamsJson {
                alpha: r.params.alpha,
                beta: r.params.beta,
                n: r.params.n,
                profile: r.params.profile.clone(),
                gen: r.params.gen.as_ref().map(GenEcho::from),
            },
        }
    }
}

/// A scalar check that is not a phase-space sweep (grids, order tests,
/// periods). `data` holds the numbers behind `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub data: BTreeMap<String, Vec<f64>>,
}

impl CheckEntry {
    /// Passes when `value < tol`.
    pub fn below(suite: &str, name: impl Into<String>, value: f64, tol: f64) -> Self {
        CheckEntry { suite: suite.into(), name: name.into(), value, tol, pass: value < tol, data: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, values: Vec<f64>) -> Self {
        self.data.insert(key.into(), values);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRowJson {
    pub case: String,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub amplitude: f64,
    pub energy: f64,
    pub period: f64,
    pub period_err: f64,
    pub energy_drift: f64,
    pub error: Option<String>,
}

impl From<&ScanRow> for ScanRowJson {
    fn from(r: &ScanRow) -> Self {
        ScanRowJson {
            case: r.case.label().into(),
            alpha: r.alpha,
            beta: r.beta,
            omega: r.omega,
            amplitude: r.amplitude,
            energy: r.energy,
            period: r.period,
            period_err: r.period_err,
            energy_drift: r.energy_drift,
            error: r.error.clone(),
        }
    }
}

/// Everything a suite produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub residuals: Vec<ResidualEntry>,
    pub checks: Vec<CheckEntry>,
    pub scan: Vec<ScanRowJson>,
    /// Suite-level errors that stopped part of the suite.
    pub errors: Vec<String>,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.errors.is_empty() && self.residuals.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }

    pub fn extend(&mut self, other: SuiteOutcome) {
        self.residuals.extend(other.residuals);
        self.checks.extend(other.checks);
        self.scan.extend(other.scan);
        self.errors.extend(other.errors);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: String,
    pub suites: Vec<String>,
    pub pass: bool,
    pub warnings: Vec<String>,
    pub config: Value,
    pub outcome: SuiteOutcome,
}

/// Clock-dependent facts about a run, kept out of the report proper.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub schema: String,
    pub created_unix_s: u64,
    pub elapsed_s: f64,
    pub threads: usize,
    pub version: String,
}

/// Serializes a JSON value with every non-integer number written as
/// `{:.16e}`, i.e. 17 significant digits.
struct Digits17<'a>(&'a Value);

impl Serialize for Digits17<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Value::Number(n) if n.is_f64() => {
                let v = n.as_f64().unwrap_or(f64::NAN);
                let raw = RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Value::Array(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for v in items {
                    seq.serialize_element(&Digits17(v))?;
                }
                seq.end()
            }
            Value::Object(map) => {
                let mut m = s.serialize_map(Some(map.len()))?;
                for (k, v) in map {
                    m.serialize_entry(k, &Digits17(v))?;
                }
                m.end()
            }
            other => other.serialize(s),
        }
    }
}

/// Pretty JSON with 17-digit floats. Non-finite floats become `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&Digits17(&v))?;
    out.push('\n');
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?).with_context(|| format!("writing {}", path.display()))
}

/// `report.json` → `report.meta.json`.
pub fn metadata_path(json: &Path) -> PathBuf {
    let stem = json.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    json.with_file_name(format!("{stem}.meta.json"))
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let r: RunReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    anyhow::ensure!(r.schema == SCHEMA, "unsupported report schema '{}'", r.schema);
    Ok(r)
}

#[derive(Serialize)]
struct ResidualCsvRow<'a> {
    suite: &'a str,
    model: &'a str,
    case: &'a str,
    relation: &'a str,
    samples: usize,
    max_abs: f64,
    mean_abs: f64,
    tol: f64,
    pass: bool,
    rejects: u64,
    fd_jets: bool,
}

pub fn write_residual_csv(path: &Path, outcome: &SuiteOutcome) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in &outcome.residuals {
        w.serialize(ResidualCsvRow {
            suite: &r.suite,
            model: &r.model,
            case: &r.case,
            relation: &r.relation,
            samples: r.samples,
            max_abs: r.max_abs,
            mean_abs: r.mean_abs,
            tol: r.tol,
            pass: r.pass,
            rejects: r.rejects,
            fd_jets: r.fd_jets,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ScanCsvRow<'a> {
    case: &'a str,
    alpha: f64,
    beta: f64,
    omega: f64,
    amplitude: f64,
    energy: f64,
    period: f64,
    period_err: f64,
}

/// Columns `case,alpha,beta,omega,amplitude,energy,period,period_err`.
pub fn write_scan_csv(path: &Path, rows: &[ScanRowJson]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(ScanCsvRow {
            case: &r.case,
            alpha: r.alpha,
            beta: r.beta,
            omega: r.omega,
            amplitude: r.amplitude,
            energy: r.energy,
            period: r.period,
            period_err: r.period_err,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable summary: one line per suite, then every failure.
pub fn write_summary(out: &mut dyn Write, report: &RunReport) -> Result<()> {
    for w in &report.warnings {
        writeln!(out, "warning: {w}")?;
    }
    let mut suites: Vec<&str> = report.outcome.residuals.iter().map(|r| r.suite.as_str()).collect();
    suites.extend(report.outcome.checks.iter().map(|c| c.suite.as_str()));
    suites.sort_unstable();
    suites.dedup();
    for s in &suites {
        let res: Vec<&ResidualEntry> = report.outcome.residuals.iter().filter(|r| r.suite == *s).collect();
        let chk: Vec<&CheckEntry> = report.outcome.checks.iter().filter(|c| c.suite == *s).collect();
        let total = res.len() + chk.len();
        let passed = res.iter().filter(|r| r.pass).count() + chk.iter().filter(|c| c.pass).count();
        let status = if passed == total { "PASS" } else { "FAIL" };
        write!(out, "{status} {s}: {passed}/{total} checks passed")?;
        if let Some(w) = res.iter().max_by(|a, b| (a.max_abs / a.tol).total_cmp(&(b.max_abs / b.tol))) {
            write!(out, "; worst sweep {} {} {} max {:.3e} (tol {:.0e})", w.model, w.case, w.relation, w.max_abs, w.tol)?;
        }
        writeln!(out)?;
    }
    for r in report.outcome.residuals.iter().filter(|r| !r.pass) {
        writeln!(
            out,
            "  FAIL {} {} {} {}: max {:.3e} tol {:.0e} samples {} rejects {}",
            r.suite, r.model, r.case, r.relation, r.max_abs, r.tol, r.samples, r.rejects
        )?;
    }
    for c in report.outcome.checks.iter().filter(|c| !c.pass) {
        writeln!(out, "  FAIL {} {}: value {:.3e} tol {:.0e}", c.suite, c.name, c.value, c.tol)?;
    }
    for e in &report.outcome.errors {
        writeln!(out, "  ERROR {e}")?;
    }
    if !report.outcome.scan.is_empty() {
        writeln!(out, "case  amplitude  energy  period  period_err")?;
        for r in &report.outcome.scan {
            match &r.error {
                None => writeln!(out, "{}  {}  {:.10}  {:.10}  {:.1e}", r.case, r.amplitude, r.energy, r.period, r.period_err)?,
                Some(e) => writeln!(out, "{}  {}  error: {e}", r.case, r.amplitude)?,
            }
        }
    }
    writeln!(out, "{}", if report.pass { "all checks passed" } else { "some checks failed" })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_digits() {
        let s = to_json_string(&serde_json::json!({"x": 0.1, "k": 3, "v": [1.0, -2.5e-300]})).unwrap();
        assert!(s.contains("\"x\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"k\": 3"));
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("-2.5000000000000000e-300"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn metadata_sits_next_to_report() {
        assert_eq!(metadata_path(Path::new("out/run.json")), Path::new("out/run.meta.json"));
    }
}
