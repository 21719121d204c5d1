//! `report`: one row of key scalars per run.

use std::path::PathBuf;

use crate::diagnose::{load_summary, scalar_value, summary_path, Summary};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

pub const COLUMNS: [&str; 11] = [
    "name",
    "function",
    "policy",
    "seed",
    "n",
    "diverged",
    "final_f",
    "tail_oscillation",
    "compensation_ratio",
    "residual",
    "separation_trend",
];

/// Cells of one report row; empty where the run has no such result.
pub type Row = Vec<String>;

fn number(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

fn from_summary(s: &Summary, diagnostic: &str, key: &str) -> Option<f64> {
    s.get(diagnostic)?.scalars.get(key).and_then(scalar_value)
}

pub fn row(manifest: &Manifest, summary: &Summary) -> Row {
    let c = &manifest.config;
    vec![
        c.name.clone(),
        c.function_name(),
        c.policy.as_str().to_string(),
        c.seed.to_string(),
        c.n.to_string(),
        manifest.diverged.to_string(),
        number(manifest.aggregates.as_ref().map(|a| a.last_value)),
        number(from_summary(summary, "values", "oscillation")),
        number(from_summary(summary, "compensation", "ratio")),
        number(from_summary(summary, "regions", "residual")),
        number(from_summary(summary, "separation", "trend")),
    ]
}

pub fn collect(paths: &[PathBuf]) -> CliResult<Vec<Row>> {
    if paths.is_empty() {
        return Err(CliError::usage("no manifest given"));
    }
    paths
        .iter()
        .map(|p| {
            let m = Manifest::load(p)?;
            let s = load_summary(&summary_path(p))?;
            Ok(row(&m, &s))
        })
        .collect()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Left-aligned text columns; missing values show as `-`.
pub fn to_text(rows: &[Row]) -> String {
    let cells: Vec<Vec<&str>> = std::iter::once(COLUMNS.to_vec())
        .chain(rows.iter().map(|r| r.iter().map(|c| if c.is_empty() { "-" } else { c.as_str() }).collect()))
        .collect();
    let widths: Vec<usize> =
        (0..COLUMNS.len()).map(|k| cells.iter().map(|r| r[k].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in &cells {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
