//! Report exports: JSON (full precision plus a rounded block), and Markdown
//! or CSV tables with factors as rows, aspects as columns, factor degrees in
//! the right margin, aspect degrees in the bottom margin and the global
//! degree in the corner.
//!
//! Rounding happens here and only here.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{ComparisonReport, MergedEvaluation};
use crate::gridmodel::Mode;
use crate::scoring::{Degrees, ScoreReport};
use crate::taxonomy::Taxonomy;

pub const DEFAULT_DECIMALS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Markdown,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (json, markdown, csv)")),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Markdown => "md",
            Format::Csv => "csv",
        }
    }
}

/// Rounds half away from zero, which is half-up for the non-negative
/// percentages and keeps deltas antisymmetric.
pub fn round_to(x: f64, decimals: usize) -> f64 {
    let p = 10f64.powi(decimals as i32);
    (x * p).round() / p
}

fn fmt_num(x: f64, decimals: usize) -> String {
    let r = round_to(x, decimals);
    // avoid "-0.00"
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.decimals$}")
}

fn fmt_opt(x: Option<f64>, decimals: usize, unit: &str) -> String {
    x.map_or_else(|| "–".to_owned(), |v| format!("{}{unit}", fmt_num(v, decimals)))
}

fn fmt_signed(x: Option<f64>, decimals: usize) -> String {
    match x {
        Some(v) if round_to(v, decimals) > 0.0 => format!("+{}", fmt_num(v, decimals)),
        Some(v) => fmt_num(v, decimals),
        None => "–".to_owned(),
    }
}

/// Factors as rows, aspects as columns.
struct Table {
    columns: Vec<String>,
    rows: Vec<(String, Vec<Option<f64>>, Option<f64>)>,
    bottom: Vec<Option<f64>>,
    corner: Option<f64>,
}

impl Table {
    fn from_degrees(t: &Taxonomy, d: &Degrees) -> Self {
        let na = t.aspects.len();
        let nf = t.factors.len();
        Self {
            columns: t.aspects.iter().map(|a| a.label.clone()).collect(),
            rows: (0..nf)
                .map(|j| {
                    (
                        t.factors[j].label.clone(),
                        (0..na).map(|i| d.local[i * nf + j].percent).collect(),
                        d.factors[j].percent,
                    )
                })
                .collect(),
            bottom: d.aspects.iter().map(|a| a.percent).collect(),
            corner: Some(d.global.percent),
        }
    }

    fn from_comparison(t: &Taxonomy, c: &ComparisonReport) -> Self {
        let na = t.aspects.len();
        let nf = t.factors.len();
        Self {
            columns: t.aspects.iter().map(|a| a.label.clone()).collect(),
            rows: (0..nf)
                .map(|j| {
                    (
                        t.factors[j].label.clone(),
                        (0..na).map(|i| c.local[i * nf + j].delta.delta).collect(),
                        c.factors[j].delta.delta,
                    )
                })
                .collect(),
            bottom: c.aspects.iter().map(|a| a.delta.delta).collect(),
            corner: c.global.delta,
        }
    }

    fn markdown(&self, mode: Mode, cell: impl Fn(Option<f64>) -> String) -> String {
        let p = mode.prime();
        let mut out = String::new();
        let _ = write!(out, "| LA{p} |");
        for c in &self.columns {
            let _ = write!(out, " {c} |");
        }
        let _ = writeln!(out, " FA{p} |");
        out.push_str("|---|");
        out.push_str(&"---:|".repeat(self.columns.len() + 1));
        out.push('\n');
        for (label, cells, margin) in &self.rows {
            let _ = write!(out, "| {label} |");
            for v in cells {
                let _ = write!(out, " {} |", cell(*v));
            }
            let _ = writeln!(out, " {} |", cell(*margin));
        }
        let _ = write!(out, "| AA{p} |");
        for v in &self.bottom {
            let _ = write!(out, " {} |", cell(*v));
        }
        let _ = writeln!(out, " **{}** |", cell(self.corner));
        out
    }

    fn csv(&self, mode: Mode, decimals: usize) -> String {
        let p = mode.prime();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![format!("LA{p}")];
        header.extend(self.columns.iter().cloned());
        header.push(format!("FA{p}"));
        w.write_record(&header).expect("in-memory write");
        let num = |v: Option<f64>| v.map_or_else(|| "NA".to_owned(), |x| fmt_num(x, decimals));
        for (label, cells, margin) in &self.rows {
            let mut rec = vec![label.clone()];
            rec.extend(cells.iter().map(|v| num(*v)));
            rec.push(num(*margin));
            w.write_record(&rec).expect("in-memory write");
        }
        let mut rec = vec![format!("AA{p}")];
        rec.extend(self.bottom.iter().map(|v| num(*v)));
        rec.push(num(self.corner));
        w.write_record(&rec).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Degrees rounded for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedDegrees {
    pub decimals: usize,
    pub local: Vec<RoundedLocal>,
    pub aspects: Vec<RoundedValue>,
    pub factors: Vec<RoundedValue>,
    pub global: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedLocal {
    pub aspect: String,
    pub factor: String,
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedValue {
    pub id: String,
    pub percent: Option<f64>,
}

impl RoundedDegrees {
    pub fn new(d: &Degrees, decimals: usize) -> Self {
        let r = |v: Option<f64>| v.map(|x| round_to(x, decimals));
        Self {
            decimals,
            local: d
                .local
                .iter()
                .map(|l| RoundedLocal {
                    aspect: l.aspect.clone(),
                    factor: l.factor.clone(),
                    percent: r(l.percent),
                })
                .collect(),
            aspects: d
                .aspects
                .iter()
                .map(|a| RoundedValue { id: a.id.clone(), percent: r(a.percent) })
                .collect(),
            factors: d
                .factors
                .iter()
                .map(|f| RoundedValue { id: f.id.clone(), percent: r(f.percent) })
                .collect(),
            global: round_to(d.global.percent, decimals),
        }
    }
}

/// JSON export of a score report: the full report plus a `rounded` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReportExport {
    #[serde(flatten)]
    pub report: ScoreReport,
    pub rounded: RoundedDegrees,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedExport {
    #[serde(flatten)]
    pub merged: MergedEvaluation,
    pub rounded: RoundedDegrees,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn na_count(d: &Degrees) -> (usize, usize) {
    d.local.iter().fold((0, 0), |(m, n), l| (m + l.m, n + l.n))
}

fn markdown_footer(out: &mut String, d: &Degrees, mode: Mode, decimals: usize) {
    let (m, n) = na_count(d);
    let p = mode.prime();
    let _ = writeln!(out);
    let _ = writeln!(out, "GA{p} = {}", fmt_opt(Some(d.global.percent), decimals, " %"));
    let _ = writeln!(out, "N/A micro-grids: {m} of {n}");
    if let Some(w) = &d.identity_warning {
        let _ = writeln!(out, "\nWarning: {w}");
    }
}

pub fn render_score(r: &ScoreReport, t: &Taxonomy, format: Format, decimals: usize) -> String {
    match format {
        Format::Json => to_json(&ScoreReportExport {
            report: r.clone(),
            rounded: RoundedDegrees::new(&r.degrees, decimals),
        }),
        Format::Csv => Table::from_degrees(t, &r.degrees).csv(r.mode, decimals),
        Format::Markdown => {
            let mut out = format!(
                "# Adaptation degrees: {} ({}), {}\n\n",
                r.system, r.evaluator, r.mode
            );
            out.push_str(
                &Table::from_degrees(t, &r.degrees)
                    .markdown(r.mode, |v| fmt_opt(v, decimals, " %")),
            );
            markdown_footer(&mut out, &r.degrees, r.mode, decimals);
            out
        }
    }
}

pub fn render_merged(m: &MergedEvaluation, t: &Taxonomy, format: Format, decimals: usize) -> String {
    match format {
        Format::Json => to_json(&MergedExport {
            merged: m.clone(),
            rounded: RoundedDegrees::new(&m.degrees, decimals),
        }),
        Format::Csv => Table::from_degrees(t, &m.degrees).csv(m.mode, decimals),
        Format::Markdown => {
            let mut out = format!(
                "# Merged adaptation degrees: {}, {} ({} evaluators: {})\n\n",
                m.system,
                m.mode,
                m.evaluators.len(),
                m.evaluators.join(", ")
            );
            out.push_str(
                &Table::from_degrees(t, &m.degrees)
                    .markdown(m.mode, |v| fmt_opt(v, decimals, " %")),
            );
            markdown_footer(&mut out, &m.degrees, m.mode, decimals);
            out
        }
    }
}

pub fn render_comparison(c: &ComparisonReport, t: &Taxonomy, format: Format, decimals: usize) -> String {
    match format {
        Format::Json => to_json(c),
        Format::Csv => Table::from_comparison(t, c).csv(c.mode, decimals),
        Format::Markdown => {
            let p = c.mode.prime();
            let mut out = format!(
                "# Comparison: {} → {}, {}\n\n",
                c.left, c.right, c.mode
            );
            if c.is_identical() {
                out.push_str("No differences.\n");
                return out;
            }
            out.push_str("Deltas in percentage points (right − left).\n\n");
            out.push_str(
                &Table::from_comparison(t, c).markdown(c.mode, |v| fmt_signed(v, decimals)),
            );
            let _ = writeln!(out, "\nGA{p}: {} → {}", fmt_opt(c.global.left, decimals, " %"), fmt_opt(c.global.right, decimals, " %"));
            if !c.micro_differences.is_empty() {
                out.push_str("\n## Micro-grids with different degrees\n\n| Sub-aspect | Sub-factor | Left | Right |\n|---|---|---:|---:|\n");
                for d in &c.micro_differences {
                    let _ = writeln!(out, "| {} | {} | {} | {} |", d.sub_aspect, d.sub_factor, d.left, d.right);
                }
            }
            if !c.na_disagreements.is_empty() {
                out.push_str("\n## N/A disagreements\n\n| Sub-aspect | Sub-factor | Left | Right |\n|---|---|---:|---:|\n");
                let show = |d: crate::scoring::MicroDegree| d.value().map_or("N/A".to_owned(), |v| v.to_string());
                for d in &c.na_disagreements {
                    let _ = writeln!(out, "| {} | {} | {} | {} |", d.sub_aspect, d.sub_factor, show(d.left), show(d.right));
                }
            }
            out
        }
    }
}

#[derive(Debug, Error)]
pub enum CsvImportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Cell { row: usize, message: String },
}

/// A table read back from a CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Column labels between the row-label column and the margin column.
    pub columns: Vec<String>,
    /// `(row label, cells, margin)`; the last row holds the bottom margin and corner.
    pub rows: Vec<(String, Vec<Option<f64>>, Option<f64>)>,
}

impl CsvTable {
    pub fn cell(&self, row: &str, column: &str) -> Option<Option<f64>> {
        let ci = self.columns.iter().position(|c| c == column)?;
        self.rows
            .iter()
            .find(|(label, _, _)| label == row)
            .map(|(_, cells, _)| cells[ci])
    }
}

pub fn parse_csv_table(text: &str) -> Result<CsvTable, CsvImportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let width = header.len();
    let columns = header.iter().skip(1).take(width.saturating_sub(2)).map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| -> Result<Option<f64>, CsvImportError> {
            if s == "NA" {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| CsvImportError::Cell {
                    row: i + 1,
                    message: format!("not a number: {s:?}"),
                })
            }
        };
        let cells = rec
            .iter()
            .skip(1)
            .take(width - 2)
            .map(parse)
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((rec[0].to_owned(), cells, parse(&rec[width - 1])?));
    }
    Ok(CsvTable { columns, rows })
}
