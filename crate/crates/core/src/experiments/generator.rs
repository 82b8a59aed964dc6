//! Ordering diagnostics, strict-generator status and certificates.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{ser_sig6, Result};
use crate::ordering::{
    save_certificate, strict_generate, v2_generate, AttemptLog, GeneratorBudget, Ordering, StrictOutcome,
    ValidationMode, ValidationReport,
};

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorRow {
    pub n: u32,
    pub ordering: String,
    #[serde(serialize_with = "ser_sig6")]
    pub mean_adjacent_dh: f64,
    pub max_adjacent_dh: u32,
    #[serde(serialize_with = "ser_sig6")]
    pub fraction_dh1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrictStatusRow {
    pub n: u32,
    pub status: String,
    pub length: usize,
    pub search_nodes: u64,
    pub deepest_index: usize,
    pub validation: String,
}

/// Strict and v2 orderings with their diagnostics for each `n`.
pub fn generator_table(ns: &[u32]) -> Result<(Vec<GeneratorRow>, Vec<Ordering>)> {
    let mut rows = Vec::new();
    let mut orderings = Vec::new();
    for &n in ns {
        let strict = match strict_generate(n, &GeneratorBudget::unbounded())? {
            StrictOutcome::Complete(o) => o,
            StrictOutcome::Incomplete(log) => {
                return Err(super::ExperimentError::Config(format!("strict n = {n} did not complete: {log:?}")))
            }
        };
        for o in [strict, v2_generate(n)?] {
            let d = o.diagnostics();
            rows.push(GeneratorRow {
                n,
                ordering: o.kind().name().into(),
                mean_adjacent_dh: d.mean_adjacent_dh,
                max_adjacent_dh: d.max_adjacent_dh,
                fraction_dh1: d.fraction_dh1,
            });
            orderings.push(o);
        }
    }
    Ok((rows, orderings))
}

pub struct StrictStatus {
    pub rows: Vec<StrictStatusRow>,
    pub reports: Vec<ValidationReport>,
    pub attempts: Vec<AttemptLog>,
}

/// Completed orderings are validated in strict mode; budget-limited attempts
/// are reported as such and never as paths.
pub fn strict_status(ns: &[u32], budget: &GeneratorBudget) -> Result<StrictStatus> {
    let mut status = StrictStatus { rows: Vec::new(), reports: Vec::new(), attempts: Vec::new() };
    for &n in ns {
        match strict_generate(n, budget)? {
            StrictOutcome::Complete(o) => {
                let report = o.validate(ValidationMode::Strict);
                status.rows.push(StrictStatusRow {
                    n,
                    status: "complete".into(),
                    length: o.len(),
                    search_nodes: o.search_nodes().unwrap_or(0),
                    deepest_index: o.len() - 1,
                    validation: if report.passed() { "passed".into() } else { "failed".into() },
                });
                status.reports.push(report);
            }
            StrictOutcome::Incomplete(log) => {
                status.rows.push(StrictStatusRow {
                    n,
                    status: format!("incomplete:{}", serde_json::to_value(log.reason)?.as_str().unwrap_or("")),
                    length: 0,
                    search_nodes: log.nodes,
                    deepest_index: log.deepest_index,
                    validation: "not_applicable".into(),
                });
                status.attempts.push(log);
            }
        }
    }
    Ok(status)
}

pub fn write_certificates(orderings: &[Ordering], dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for o in orderings {
        let path = dir.join(format!("{}_n{}.json", o.kind().name(), o.n()));
        save_certificate(o, &path).map_err(|e| super::ExperimentError::Config(e.to_string()))?;
        paths.push(path);
    }
    Ok(paths)
}
