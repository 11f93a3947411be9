//! Verification reports and their JSON, CSV and Markdown forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::format::opt_g12;
use crate::harness::{OracleKind, Verdict, VerificationRecord};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 7] = ["cell_id", "bound_id", "oracle", "oracle_lo", "oracle_hi", "bound", "verdict"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub bound_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub records: usize,
    pub pass: usize,
    /// Failures against exact oracles (or ordering checks).
    pub fail: usize,
    /// Failures against Monte-Carlo confidence intervals.
    pub mc_fail: usize,
    pub inconclusive: usize,
    pub inapplicable: usize,
}

impl Summary {
    pub fn of(records: &[VerificationRecord], cells: usize) -> Summary {
        let mut s = Summary { cells, records: records.len(), ..Summary::default() };
        for r in records {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail if r.oracle == OracleKind::MonteCarlo => s.mc_fail += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Inconclusive => s.inconclusive += 1,
                Verdict::Inapplicable => s.inapplicable += 1,
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub name: String,
    /// Command line that produced the report (without `--jobs`).
    pub invocation: Vec<String>,
    pub seed: Option<u64>,
    pub summary: Summary,
    pub exclusions: Vec<Exclusion>,
    pub records: Vec<VerificationRecord>,
}

impl Report {
    pub fn empty(name: &str) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            name: name.to_string(),
            invocation: Vec::new(),
            seed: None,
            summary: Summary::default(),
            exclusions: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(format!("unknown format `{s}` (json, csv, markdown)")),
        }
    }
}

pub fn emit(report: &Report, format: Format) -> Result<String, String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(&report.records),
        Format::Markdown => Ok(to_markdown(report)),
    }
}

pub fn to_json(report: &Report) -> Result<String, String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(s: &str) -> Result<Report, String> {
    let r: Report = serde_json::from_str(s).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))?;
    if r.schema_version != SCHEMA_VERSION {
        return Err(format!("unsupported report schema version {}", r.schema_version));
    }
    Ok(r)
}

pub fn to_csv(records: &[VerificationRecord]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(|e| e.to_string())?;
    for r in records {
        w.write_record([
            r.cell_id.as_str(),
            r.bound_id.as_str(),
            &opt_g12(r.oracle_value),
            &opt_g12(r.oracle_lo),
            &opt_g12(r.oracle_hi),
            &opt_g12(r.bound),
            r.verdict.name(),
        ])
        .map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Records grouped by topic anchor; inapplicable records are only counted.
pub fn to_markdown(report: &Report) -> String {
    let s = &report.summary;
    let mut out = String::new();
    let _ = writeln!(out, "# Verification report: {}\n", report.name);
    if !report.invocation.is_empty() {
        let _ = writeln!(out, "Invocation: `{}`\n", report.invocation.join(" "));
    }
    if let Some(seed) = report.seed {
        let _ = writeln!(out, "Seed: {seed}\n");
    }
    let _ = writeln!(out, "| cells | records | pass | fail | mc_fail | inconclusive | inapplicable |");
    let _ = writeln!(out, "|---|---|---|---|---|---|---|");
    let _ = writeln!(
        out,
        "| {} | {} | {} | {} | {} | {} | {} |\n",
        s.cells, s.records, s.pass, s.fail, s.mc_fail, s.inconclusive, s.inapplicable
    );
    let mut groups: BTreeMap<&str, Vec<&VerificationRecord>> = BTreeMap::new();
    let mut skipped: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &report.records {
        let anchor = if r.anchor.is_empty() { "(no anchor)" } else { r.anchor.as_str() };
        if r.verdict == Verdict::Inapplicable {
            *skipped.entry(anchor).or_default() += 1;
        } else {
            groups.entry(anchor).or_default().push(r);
        }
    }
    for (anchor, recs) in &groups {
        let _ = writeln!(out, "## {}\n", md_escape(anchor));
        let _ = writeln!(out, "| cell | bound | model | query | oracle | oracle_lo | oracle_hi | bound value | verdict |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
        for r in recs {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                md_escape(&r.cell_id),
                md_escape(&r.bound_id),
                md_escape(&r.model),
                md_escape(&r.query),
                opt_g12(r.oracle_value),
                opt_g12(r.oracle_lo),
                opt_g12(r.oracle_hi),
                opt_g12(r.bound),
                r.verdict.name()
            );
        }
        if let Some(k) = skipped.remove(anchor) {
            let _ = writeln!(out, "\n{k} inapplicable records omitted.");
        }
        out.push('\n');
    }
    let rest: usize = skipped.values().sum();
    if rest > 0 {
        let _ = writeln!(out, "{rest} further inapplicable records omitted.\n");
    }
    if !report.exclusions.is_empty() {
        let _ = writeln!(out, "## Excluded bound ids\n");
        for e in &report.exclusions {
            let _ = writeln!(out, "- `{}`: {}", e.bound_id, md_escape(&e.reason));
        }
        out.push('\n');
    }
    out
}

/// One line per verdict class, for terminals.
pub fn summary_line(report: &Report) -> String {
    let s = &report.summary;
    format!(
        "{}: {} cells, {} records: {} pass, {} fail, {} mc_fail, {} inconclusive, {} inapplicable",
        report.name, s.cells, s.records, s.pass, s.fail, s.mc_fail, s.inconclusive, s.inapplicable
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(to_csv(&[]).unwrap(), "cell_id,bound_id,oracle,oracle_lo,oracle_hi,bound,verdict\n");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
        assert!("xml".parse::<Format>().is_err());
    }
}
