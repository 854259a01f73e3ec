//! Table builders and renderers (aligned text, CSV, JSON).
//!
//! Real-valued cells are shown with three decimals, rounded half to even;
//! integers are printed verbatim. Every format carries the same displayed
//! values; the JSON form additionally keeps the exact value of real cells.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::evolution::{DeltaTable, SccSeriesRow};
use crate::metrics::{DescriptiveStats, Metric, ModuleMetricsRow, SystemMetricsSummary};
use crate::scalar::Scalar;

/// Decimals shown for cohesion/coupling values.
pub const DISPLAY_DECIMALS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Unknown,
    Int(u64),
    Text(String),
    Real { display: String, exact: String },
}

impl Cell {
    pub fn real<T: Scalar>(value: &T) -> Cell {
        Cell::Real {
            display: value.to_fixed(DISPLAY_DECIMALS),
            exact: value.to_exact_string(),
        }
    }

    pub fn int(value: impl Into<u64>) -> Cell {
        Cell::Int(value.into())
    }

    fn count(value: usize) -> Cell {
        Cell::Int(value as u64)
    }

    pub fn text(value: impl Into<String>) -> Cell {
        Cell::Text(value.into())
    }

    /// Displayed form, shared by text and CSV output.
    pub fn display(&self) -> String {
        match self {
            Cell::Unknown => "unknown".to_owned(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Real { display, .. } => display.clone(),
        }
    }
}

/// A header label spanning `span` consecutive columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnGroup {
    pub label: String,
    pub span: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<ColumnGroup>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: Vec<String>) -> Self {
        Table {
            title: title.into(),
            groups: Vec::new(),
            headers,
            rows: Vec::new(),
        }
    }

    /// Column headers with their group label prefixed, as used by CSV.
    fn flat_headers(&self) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.headers.len());
        for group in &self.groups {
            labels.extend(std::iter::repeat_n(group.label.as_str(), group.span));
        }
        self.headers
            .iter()
            .enumerate()
            .map(|(k, h)| match labels.get(k) {
                Some(g) if !g.is_empty() => format!("{g} {h}"),
                _ => h.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Report {
    pub tables: Vec<Table>,
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn push_line(out: &mut String, cells: &[String], widths: &[usize]) {
    let mut line = String::new();
    for (k, (cell, w)) in cells.iter().zip(widths).enumerate() {
        if k > 0 {
            line.push_str("  ");
        }
        let pad = w.saturating_sub(width(cell));
        if k == 0 {
            line.push_str(cell);
            line.extend(std::iter::repeat_n(' ', pad));
        } else {
            line.extend(std::iter::repeat_n(' ', pad));
            line.push_str(cell);
        }
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

fn render_text(table: &Table) -> String {
    let cells: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::display).collect())
        .collect();
    let mut widths: Vec<usize> = table.headers.iter().map(|h| width(h)).collect();
    for row in &cells {
        for (k, c) in row.iter().enumerate() {
            widths[k] = widths[k].max(width(c));
        }
    }
    // Widen the last column of a group when its label is longer than the
    // columns it spans.
    let mut col = 0;
    for group in &table.groups {
        let span_width: usize =
            widths[col..col + group.span].iter().sum::<usize>() + 2 * (group.span - 1);
        if width(&group.label) > span_width {
            widths[col + group.span - 1] += width(&group.label) - span_width;
        }
        col += group.span;
    }

    let mut out = String::new();
    if !table.title.is_empty() {
        out.push_str(&table.title);
        out.push('\n');
    }
    if !table.groups.is_empty() {
        let mut line = String::new();
        let mut col = 0;
        for (g, group) in table.groups.iter().enumerate() {
            let span_width: usize =
                widths[col..col + group.span].iter().sum::<usize>() + 2 * (group.span - 1);
            if g > 0 {
                line.push_str("  ");
            }
            let pad = span_width - width(&group.label);
            line.extend(std::iter::repeat_n(' ', pad / 2));
            line.push_str(&group.label);
            line.extend(std::iter::repeat_n(' ', pad - pad / 2));
            col += group.span;
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    push_line(&mut out, &table.headers, &widths);
    for row in &cells {
        push_line(&mut out, row, &widths);
    }
    out
}

fn render_csv(table: &Table) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer
        .write_record(table.flat_headers())
        .expect("writing to memory");
    for row in &table.rows {
        writer
            .write_record(row.iter().map(Cell::display))
            .expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("writing to memory")).expect("cells are UTF-8")
}

/// Renders one table. Text and CSV omit nothing but the JSON-only exact
/// values; an empty table renders as its header.
pub fn render_table(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => render_text(table),
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Structured => {
            let mut s = serde_json::to_string_pretty(table).expect("tables serialize");
            s.push('\n');
            s
        }
    }
}

/// Renders several tables. Text separates them with blank lines; CSV
/// precedes each block with a `# title` line.
pub fn render_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Structured => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => report
            .tables
            .iter()
            .map(render_text)
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Csv => {
            let mut out = String::new();
            for (k, table) in report.tables.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "# {}", table.title);
                out.push_str(&render_csv(table));
            }
            out
        }
    }
}

fn scheme_count_header(scheme: &str) -> String {
    format!("# {scheme}s")
}

/// Size statistics, one row per version.
pub fn stats_table(stats: &[DescriptiveStats], schemes: &[String]) -> Table {
    let mut headers = vec!["vers.".to_owned()];
    headers.extend(schemes.iter().map(|s| scheme_count_header(s)));
    headers.extend(["# classes", "# methods", "LOC", "# invocations"].map(str::to_owned));
    let mut table = Table::new("Descriptive statistics", headers);
    for s in stats {
        let mut row = vec![Cell::text(&s.version_label)];
        row.extend(schemes.iter().map(|scheme| {
            s.num_modules_per_scheme
                .get(scheme)
                .map_or(Cell::Unknown, |&n| Cell::count(n))
        }));
        row.push(Cell::count(s.num_classes));
        row.push(s.num_methods.map_or(Cell::Unknown, Cell::Int));
        row.push(s.lines_of_code.map_or(Cell::Unknown, Cell::Int));
        row.push(Cell::Int(s.num_invocations));
        table.rows.push(row);
    }
    table
}

/// Per-module metrics of one scheme in one version.
pub fn module_table<T: Scalar>(version: &str, scheme: &str, rows: &[ModuleMetricsRow<T>]) -> Table {
    let headers = [
        "module",
        "classes",
        "intra edges",
        "Cohesion",
        "Coupling",
        "Ca",
        "Ce",
    ]
    .map(str::to_owned)
    .to_vec();
    let mut table = Table::new(
        format!("Module metrics ({scheme}, version {version})"),
        headers,
    );
    for r in rows {
        table.rows.push(vec![
            Cell::text(&r.module.name),
            Cell::count(r.class_count),
            Cell::count(r.intra_edges),
            Cell::real(&r.cohesion),
            Cell::real(&r.coupling),
            Cell::count(r.ca),
            Cell::count(r.ce),
        ]);
    }
    table
}

/// Average cohesion and coupling per version, grouped by scheme.
pub fn summary_table<T: Scalar>(
    schemes: &[String],
    versions: &[(String, Vec<SystemMetricsSummary<T>>)],
) -> Table {
    let mut headers = vec!["vers.".to_owned()];
    let mut groups = vec![ColumnGroup {
        label: String::new(),
        span: 1,
    }];
    for scheme in schemes {
        headers.push("Cohesion".into());
        headers.push("Coupling".into());
        groups.push(ColumnGroup {
            label: scheme.to_uppercase(),
            span: 2,
        });
    }
    let mut table = Table::new("Average cohesion and coupling", headers);
    table.groups = groups;
    for (label, summaries) in versions {
        let mut row = vec![Cell::text(label)];
        for scheme in schemes {
            match summaries.iter().find(|s| &s.scheme == scheme) {
                Some(s) => {
                    row.push(Cell::real(&s.avg_cohesion));
                    row.push(Cell::real(&s.avg_coupling));
                }
                None => row.extend([Cell::Unknown, Cell::Unknown]),
            }
        }
        table.rows.push(row);
    }
    table
}

/// `"0.099  0.058"`: a summary's averages side by side.
pub fn summary_pair<T: Scalar>(summary: &SystemMetricsSummary<T>) -> String {
    format!(
        "{}  {}",
        summary.avg_cohesion.to_fixed(DISPLAY_DECIMALS),
        summary.avg_coupling.to_fixed(DISPLAY_DECIMALS)
    )
}

/// Increase/same/decrease tallies of one scheme, one row per version pair.
pub fn delta_table(scheme: &str, metrics: &[Metric], pairs: &[(String, Vec<DeltaTable>)]) -> Table {
    let mut headers = vec!["versions".to_owned()];
    let mut groups = vec![ColumnGroup {
        label: String::new(),
        span: 1,
    }];
    for m in metrics {
        headers.extend(["incr.", "same", "decr."].map(str::to_owned));
        groups.push(ColumnGroup {
            label: m.label().to_owned(),
            span: 3,
        });
    }
    headers.extend(["created", "removed"].map(str::to_owned));
    groups.push(ColumnGroup {
        label: "modules".into(),
        span: 2,
    });
    let mut table = Table::new(format!("Metric evolution ({scheme})"), headers);
    table.groups = groups;
    for (label, deltas) in pairs {
        let mut row = vec![Cell::text(label)];
        for m in metrics {
            match deltas.iter().find(|d| d.metric == *m) {
                Some(d) => row.extend([
                    Cell::count(d.increased),
                    Cell::count(d.same),
                    Cell::count(d.decreased),
                ]),
                None => row.extend([Cell::Unknown, Cell::Unknown, Cell::Unknown]),
            }
        }
        let (created, removed) = deltas
            .first()
            .map_or((0, 0), |d| (d.created.len(), d.removed.len()));
        row.push(Cell::count(created));
        row.push(Cell::count(removed));
        table.rows.push(row);
    }
    table
}

/// Strongly connected component counts per version.
pub fn scc_table(scheme: &str, rows: &[SccSeriesRow]) -> Table {
    let headers = ["version", "# SCC", "Largest SCC"]
        .map(str::to_owned)
        .to_vec();
    let mut table = Table::new(format!("Strongly connected components ({scheme})"), headers);
    for r in rows {
        table.rows.push(vec![
            Cell::text(&r.version_label),
            Cell::count(r.num_scc),
            Cell::count(r.largest_scc),
        ]);
    }
    table
}
