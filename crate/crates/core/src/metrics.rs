//! Per-step CSV and JSON summaries of teaching and verification runs.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::harness::{RunReport, VerificationReport};
use crate::Error;

pub const CSV_HEADER: [&str; 5] = ["step", "winner", "recruited", "preResponseMax", "zCorrect"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricsSummary {
    pub agreement_rate: Option<f64>,
    pub recruit_count: usize,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_queries: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mismatches: Option<usize>,
}

impl MetricsSummary {
    pub fn of_run(report: &RunReport) -> Self {
        Self {
            agreement_rate: report.agreement_rate(),
            recruit_count: report.recruit_count,
            steps: report.steps.len(),
            total_queries: None,
            mismatches: None,
        }
    }

    pub fn of_verification(report: &VerificationReport) -> Self {
        Self {
            agreement_rate: Some(report.agreement_rate),
            recruit_count: report.recruit_count,
            steps: 0,
            total_queries: Some(report.total_queries),
            mismatches: Some(report.mismatches.len()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summaries always serialize");
        s.push('\n');
        s
    }
}

/// Writes one CSV row per step. Unknown values are left empty.
pub fn write_csv<W: Write>(report: &RunReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for s in &report.steps {
        w.write_record([
            s.step.to_string(),
            opt(s.winner.map(|j| j.to_string())),
            s.recruited.to_string(),
            opt(s.pre_response_max.map(|v| v.to_string())),
            opt(s.z_correct.map(|c| c.to_string())),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(report: &RunReport) -> String {
    let mut buf = Vec::new();
    write_csv(report, &mut buf).expect("in-memory CSV");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Writes the per-step CSV and the JSON summary next to each other, at
/// `path` with extensions `.csv` and `.json`. Returns both paths.
pub fn emit_run_metrics(report: &RunReport, path: &Path) -> Result<(PathBuf, PathBuf), Error> {
    let (csv_path, json_path) = (path.with_extension("csv"), path.with_extension("json"));
    std::fs::write(&csv_path, csv_string(report)).map_err(|e| Error::io(&csv_path, e))?;
    std::fs::write(&json_path, MetricsSummary::of_run(report).to_json())
        .map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

/// Writes the verification summary at `path` with extension `.json`.
pub fn emit_verification_metrics(
    report: &VerificationReport,
    path: &Path,
) -> Result<PathBuf, Error> {
    let json_path = path.with_extension("json");
    std::fs::write(
        &json_path,
        MetricsSummary::of_verification(report).to_json(),
    )
    .map_err(|e| Error::io(&json_path, e))?;
    Ok(json_path)
}
