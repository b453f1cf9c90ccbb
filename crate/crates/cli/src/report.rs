//! JSON report schema. Field order is fixed by the struct definitions and
//! all maps are ordered, so identical inputs produce byte-identical reports
//! except for the `wall_time_ms` fields.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use nwe_core::nonlocality::StrongIrreducibilityReport;

pub const STATUS_PASS: &str = "pass";
pub const STATUS_FAIL: &str = "fail";
pub const STATUS_ERROR: &str = "error";

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub inputs: Vec<String>,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(command: String, inputs: Vec<String>, checks: Vec<CheckRecord>) -> Self {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs,
            checks,
        }
    }

    /// 0 all pass, 1 some check failed, 2 some check errored.
    pub fn exit_code(&self) -> i32 {
        let mut code = 0;
        for c in &self.checks {
            match c.status.as_str() {
                STATUS_ERROR => return 2,
                STATUS_FAIL => code = 1,
                _ => {}
            }
        }
        code
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CheckRecord {
    pub check_name: String,
    pub status: String,
    /// counterexamples or witnesses backing a fail verdict
    pub witnesses: Vec<String>,
    /// constraint-system dimensions for every certificate produced
    pub certificates: Vec<CertificateDims>,
    pub details: BTreeMap<String, serde_json::Value>,
    pub wall_time_ms: u64,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>) -> Self {
        CheckRecord {
            check_name: name.into(),
            status: STATUS_PASS.to_string(),
            witnesses: Vec::new(),
            certificates: Vec::new(),
            details: BTreeMap::new(),
            wall_time_ms: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == STATUS_PASS
    }

    pub fn set_status(&mut self, ok: bool) {
        self.status = if ok { STATUS_PASS } else { STATUS_FAIL }.to_string();
    }

    pub fn error(name: impl Into<String>, message: String) -> Self {
        let mut rec = CheckRecord::new(name);
        rec.status = STATUS_ERROR.to_string();
        rec.witnesses.push(message);
        rec
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable detail"),
        );
    }
}

/// Constraint-matrix shape and solution dimensions of one grouping
/// certificate, sufficient to re-derive the verdict independently.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CertificateDims {
    pub grouping: String,
    pub dim: usize,
    pub sym_dim: usize,
    pub antisym_dim: usize,
    pub sym_rows: usize,
    pub sym_unknowns: usize,
    pub antisym_rows: usize,
    pub antisym_unknowns: usize,
    pub verdict: String,
}

pub fn certificates_of(report: &StrongIrreducibilityReport) -> Vec<CertificateDims> {
    report
        .certificates
        .iter()
        .map(|c| CertificateDims {
            grouping: c.grouping_label(),
            dim: c.dims.dim,
            sym_dim: c.dims.sym_dim,
            antisym_dim: c.dims.antisym_dim,
            sym_rows: c.dims.sym_shape.0,
            sym_unknowns: c.dims.sym_shape.1,
            antisym_rows: c.dims.antisym_shape.0,
            antisym_unknowns: c.dims.antisym_shape.1,
            verdict: c.verdict.as_str().to_string(),
        })
        .collect()
}

/// Render a report for humans: one line per check.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!(
            "{:<24} {:<5} {:>6} ms",
            c.check_name, c.status, c.wall_time_ms
        ));
        if !c.passed() {
            if let Some(w) = c.witnesses.first() {
                out.push_str(&format!("  [{w}]"));
            }
        }
        out.push('\n');
    }
    let overall = match report.exit_code() {
        0 => "all checks passed",
        1 => "some checks FAILED",
        _ => "some checks errored",
    };
    out.push_str(&format!("overall: {overall}\n"));
    out
}
