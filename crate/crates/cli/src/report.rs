//! Report bundle: JSON for machines, CSV with a fixed column order for plotting.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;

/// Bumped on any change to the JSON layout or the CSV columns.
pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the CSV form.
pub const CSV_COLUMNS: [&str; 9] = [
    "id",
    "command",
    "kind",
    "name",
    "status",
    "value",
    "bound",
    "n",
    "config_hash",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Out-of-class or descriptive result; never fails a run.
    Evidence,
    /// `0/0` or otherwise undecidable; never counts as a pass.
    Skipped,
    /// A plain value (operator output, sampled constant).
    Info,
    NumericalError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub kind: String,
    pub name: String,
    pub status: Status,
    /// Headline number: a max ratio, a constant, an operator value.
    pub value: Option<f64>,
    /// What `value` was compared against, when anything.
    pub bound: Option<f64>,
    pub n: usize,
    pub config_hash: String,
    pub detail: Value,
}

impl Record {
    pub fn new(kind: &str, name: impl Into<String>, status: Status) -> Self {
        Record {
            id: String::new(),
            kind: kind.into(),
            name: name.into(),
            status,
            value: None,
            bound: None,
            n: 0,
            config_hash: String::new(),
            detail: Value::Null,
        }
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn detail(mut self, d: impl Serialize) -> Self {
        self.detail = serde_json::to_value(d).unwrap_or(Value::Null);
        self
    }

    /// Pass/fail from a predicate, with NaN mapped to a numerical error.
    pub fn judged(kind: &str, name: impl Into<String>, value: f64, ok: bool) -> Self {
        let status = if value.is_nan() {
            Status::NumericalError
        } else if ok {
            Status::Pass
        } else {
            Status::Fail
        };
        Record::new(kind, name, status).value(value)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub pass: usize,
    pub fail: usize,
    pub evidence: usize,
    pub skipped: usize,
    pub info: usize,
    pub numerical_error: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub gausslocal: String,
    pub cli: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    /// Unix seconds; the only field allowed to differ between identical runs.
    pub timestamp: u64,
    pub versions: Versions,
    pub seed: u64,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl ReportBundle {
    /// Numbers the records, stamps the hash and fills the summary.
    pub fn new(command: &str, config_hash: &str, seed: u64, mut records: Vec<Record>) -> Self {
        let mut summary = Summary {
            records: records.len(),
            ..Summary::default()
        };
        for (i, r) in records.iter_mut().enumerate() {
            r.id = format!("{command}.{i:04}");
            r.config_hash = config_hash.to_string();
            if r.value.is_some_and(f64::is_nan) {
                r.status = Status::NumericalError;
            }
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Evidence => summary.evidence += 1,
                Status::Skipped => summary.skipped += 1,
                Status::Info => summary.info += 1,
                Status::NumericalError => summary.numerical_error += 1,
            }
        }
        ReportBundle {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config_hash: config_hash.into(),
            timestamp: timestamp(),
            versions: Versions {
                gausslocal: gausslocal::VERSION.into(),
                cli: env!("CARGO_PKG_VERSION").into(),
            },
            seed,
            summary,
            records,
        }
    }

    /// 0 success, 1 some check failed, 3 a NaN surfaced.
    pub fn exit_code(&self) -> i32 {
        if self.summary.numerical_error > 0 {
            3
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let status = serde_json::to_value(r.status)?;
            w.write_record([
                r.id.as_str(),
                self.command.as_str(),
                r.kind.as_str(),
                r.name.as_str(),
                status.as_str().unwrap_or_default(),
                &num(r.value),
                &num(r.bound),
                &r.n.to_string(),
                r.config_hash.as_str(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes `<dir>/<command>.<ext>` and returns the path.
    pub fn write_to(&self, dir: &Path, format: Format) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let ext = match format {
            Format::Json => "json",
            Format::Csv => "csv",
        };
        let path = dir.join(format!("{}.{ext}", self.command));
        let mut file =
            std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        file.write_all(self.render(format)?.as_bytes())?;
        Ok(path)
    }

    pub fn read_json(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

// SOURCE_DATE_EPOCH pins the stamp for reproducible artifacts.
fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
    {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle() -> ReportBundle {
        let records = vec![
            Record::judged("inequality", "a", 0.5, true).bound(1.0),
            Record::judged("inequality", "b", 2.0, false).bound(1.0),
            Record::new("norm_experiment", "c", Status::Evidence)
                .value(3.0)
                .n(64),
        ];
        ReportBundle::new("verify", "abc", 7, records)
    }

    #[test]
    fn summary_and_exit_code() {
        let b = bundle();
        assert_eq!(
            (b.summary.pass, b.summary.fail, b.summary.evidence),
            (1, 1, 1)
        );
        assert_eq!(b.exit_code(), 1);
        assert_eq!(b.records[2].id, "verify.0002");
        assert!(b.records.iter().all(|r| r.config_hash == "abc"));
        let nan = ReportBundle::new(
            "op",
            "abc",
            0,
            vec![Record::new("op", "x", Status::Info).value(f64::NAN)],
        );
        assert_eq!(nan.exit_code(), 3);
    }

    #[test]
    fn csv_has_fixed_columns() {
        let csv = bundle().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "verify.0000,verify,inequality,a,pass,0.5,1,0,abc"
        );
        assert_eq!(
            lines.last().unwrap(),
            "verify.0002,verify,norm_experiment,c,evidence,3,,64,abc"
        );
    }

    #[test]
    fn json_round_trips() {
        let b = bundle();
        let back: ReportBundle = serde_json::from_str(&b.to_json().unwrap()).unwrap();
        assert_eq!(back, b);
    }
}
