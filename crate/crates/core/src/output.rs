//! Fixed-schema CSV tables and the ASCII coverage raster.
//!
//! Output is byte-deterministic: comma separated, `\n` line endings, every
//! float with four decimals, NaN written as `NaN`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::propagation::CoverageGrid;
use crate::scenario::{ComparisonResult, DistanceRow, SampleResult, SweepTable};

pub const SWEEP_HEADER: &[&str] = &["theta_deg", "element", "gain_dbi"];
pub const LINK_HEADER: &[&str] = &["d_m", "selection", "p_r_dbm"];
pub const COVERAGE_HEADER: &[&str] = &["east_m", "north_m", "p_r_dbm"];
pub const RUN_HEADER: &[&str] = &[
    "index",
    "east_m",
    "north_m",
    "heading_deg",
    "theta_rel_deg",
    "selection",
    "tx_gain_dbi",
    "p_r_dbm",
    "rssi_dbm",
];
pub const COMPARE_HEADER: &[&str] = &["index", "delta_rss_db"];

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Text(String),
    Int(u64),
    Num(f64),
}

impl Field {
    fn write(&self, out: &mut String) {
        use std::fmt::Write as _;
        match self {
            Field::Text(s) => out.push_str(s),
            Field::Int(i) => write!(out, "{i}").unwrap(),
            Field::Num(x) if x.is_nan() => out.push_str("NaN"),
            Field::Num(x) => write!(out, "{x:.4}").unwrap(),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<usize> for Field {
    fn from(i: usize) -> Self {
        Field::Int(i as u64)
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, f) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                f.write(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

pub fn sweep_table(t: &SweepTable) -> CsvTable {
    let mut csv = CsvTable::new(SWEEP_HEADER);
    for r in &t.rows {
        csv.push(vec![r.theta.into(), format!("ant{}", r.element).into(), r.gain.into()]);
    }
    csv
}

pub fn link_table(rows: &[DistanceRow]) -> CsvTable {
    let mut csv = CsvTable::new(LINK_HEADER);
    for r in rows {
        csv.push(vec![r.distance.into(), r.selection.to_string().into(), r.p_r.into()]);
    }
    csv
}

pub fn coverage_table(grid: &CoverageGrid) -> CsvTable {
    let mut csv = CsvTable::new(COVERAGE_HEADER);
    for (c, v) in grid.cells() {
        csv.push(vec![c.east.into(), c.north.into(), v.into()]);
    }
    csv
}

pub fn run_table(results: &[SampleResult]) -> CsvTable {
    let mut csv = CsvTable::new(RUN_HEADER);
    for r in results {
        csv.push(vec![
            r.index.into(),
            r.position.east.into(),
            r.position.north.into(),
            r.heading.degrees().into(),
            r.theta_rel.into(),
            r.selection.to_string().into(),
            r.tx_gain.into(),
            r.p_r.into(),
            r.rssi.into(),
        ]);
    }
    csv
}

/// Per-index deltas followed by a `mean,<value>` row.
pub fn compare_table(cmp: &ComparisonResult) -> CsvTable {
    let mut csv = CsvTable::new(COMPARE_HEADER);
    for &(i, d) in &cmp.deltas {
        csv.push(vec![i.into(), d.into()]);
    }
    csv.push(vec!["mean".into(), cmp.mean_delta.into()]);
    csv
}

/// North-up raster: one line per row starting with the northernmost,
/// values separated by `;`.
pub fn coverage_raster(grid: &CoverageGrid) -> String {
    let mut out = String::new();
    let w = grid.region.width;
    for row in (0..grid.region.height).rev() {
        for col in 0..w {
            if col > 0 {
                out.push(';');
            }
            Field::Num(grid.value(col, row)).write(&mut out);
        }
        out.push('\n');
    }
    out
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn emit_csv(table: &CsvTable, path: &Path) -> io::Result<()> {
    fs::write(path, table.render())
}
