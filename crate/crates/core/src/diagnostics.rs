//! Per-iteration solver records, serialized as JSON lines.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Inner,
    Outer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub solver: String,
    pub kind: RecordKind,
    pub outer: usize,
    pub inner: usize,
    /// Norm of the nonlinear residual driven to zero by the solver.
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl IterationRecord {
    pub fn new(solver: &str, kind: RecordKind, outer: usize, inner: usize, residual: f64) -> Self {
        Self {
            solver: solver.to_string(),
            kind,
            outer,
            inner,
            residual,
            objective: None,
            step: None,
            sigma: None,
            gap: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub records: Vec<IterationRecord>,
    pub warnings: Vec<String>,
    pub converged: bool,
}

impl Diagnostics {
    pub fn push(&mut self, record: IterationRecord) {
        self.records.push(record);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        log::warn!("{message}");
        self.warnings.push(message);
    }

    pub fn outer_records(&self) -> impl Iterator<Item = &IterationRecord> {
        self.records.iter().filter(|r| r.kind == RecordKind::Outer)
    }

    pub fn inner_count(&self) -> usize {
        self.records.iter().filter(|r| r.kind == RecordKind::Inner).count()
    }

    pub fn write_jsonl(&self, w: &mut impl Write) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut *w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
