//! Table emission: CSV (header row mandatory), JSON mirroring the CSV
//! field names, and aligned text for terminals.

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Writes to the file when given, stdout otherwise.
pub fn write_out(path: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Serializes one row type to the requested format. Text rendering reuses
/// the CSV serialization, so all three formats carry the same columns.
pub fn emit<R: Serialize>(rows: &[R], format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    match format {
        Format::Json => write_out(out, &(serde_json::to_string_pretty(rows)? + "\n")),
        Format::Csv => write_out(out, &to_csv(rows)?),
        Format::Text => {
            let csv = to_csv(rows)?;
            write_out(out, &align(&csv))
        }
    }
}

fn to_csv<R: Serialize>(rows: &[R]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Pads CSV cells into fixed-width columns.
fn align(csv_text: &str) -> String {
    let grid: Vec<Vec<&str>> = csv_text
        .lines()
        .map(|l| l.split(',').collect())
        .collect();
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in &grid {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &grid {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, cell)| format!("{:>width$}", cell, width = widths[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
