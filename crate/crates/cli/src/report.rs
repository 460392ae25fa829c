//! Checks, reports and their CSV/JSON forms.

use std::collections::BTreeMap;

use levy_spde_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Unsupported,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Unsupported => "unsupported",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_id: String,
    pub inputs: BTreeMap<String, Value>,
    pub estimate: Option<f64>,
    pub reference: Option<f64>,
    pub se_or_tol: Option<f64>,
    pub status: Status,
    /// Per-case breakdown or the error that stopped the check.
    pub detail: String,
}

impl Check {
    pub fn new(check_id: impl Into<String>) -> Self {
        Self {
            check_id: check_id.into(),
            inputs: BTreeMap::new(),
            estimate: None,
            reference: None,
            se_or_tol: None,
            status: Status::Pass,
            detail: String::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn values(mut self, estimate: f64, reference: Option<f64>, se_or_tol: f64) -> Self {
        self.estimate = Some(estimate);
        self.reference = reference;
        self.se_or_tol = Some(se_or_tol);
        self
    }

    pub fn status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// A module error becomes a check: `Unsupported` stays unsupported,
    /// everything else fails.
    pub fn from_error(self, err: &Error) -> Self {
        let status = if matches!(err, Error::Unsupported(_)) { Status::Unsupported } else { Status::Fail };
        self.status(status).detail(err.to_string())
    }
}

/// Runs `body` and records its error, if any, on the check it was building.
pub fn guarded(base: Check, body: impl FnOnce(Check) -> levy_spde_core::Result<Check>) -> Check {
    let fallback = base.clone();
    body(base).unwrap_or_else(|e| fallback.from_error(&e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub git_describe: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn of(config: &RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            git_describe: env!("LEVY_SPDE_GIT_DESCRIBE").to_string(),
            config_hash: config.hash(),
            seed: config.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub unsupported: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub provenance: Provenance,
    pub summary: Summary,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, checks: Vec<Check>) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Inconclusive => summary.inconclusive += 1,
                Status::Unsupported => summary.unsupported += 1,
            }
        }
        Self { command: command.to_string(), provenance: Provenance::of(config), summary, checks }
    }

    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// The checks as a table; provenance is left out so that the bytes depend
    /// only on the numbers.
    pub fn check_table(&self) -> Table {
        let mut table = Table::new(&["check_id", "status", "estimate", "reference", "se_or_tol", "inputs", "detail"]);
        for c in &self.checks {
            table.push(vec![
                c.check_id.clone(),
                c.status.name().to_string(),
                opt_num(c.estimate),
                opt_num(c.reference),
                opt_num(c.se_or_tol),
                serde_json::to_string(&c.inputs).expect("inputs serialize"),
                c.detail.clone(),
            ]);
        }
        table
    }
}

/// Rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
    }
}

/// Shortest round-trip form; non-finite values are spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}")
    }
}

/// Empty cell for a missing value.
pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
