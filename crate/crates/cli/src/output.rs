//! CSV and SVG emission. Files are written to a temporary sibling and renamed
//! into place, so readers never observe a partial file.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use fermidyn_core::TrajectoryTable;

use crate::error::CliError;

/// Shortest decimal that round-trips to the same `f64`; `-0` prints as `0`.
fn format_value(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        x.to_string()
    }
}

/// The table as CSV text: header `t,n1,...,nN`, one row per time.
pub fn csv_bytes(table: &TrajectoryTable) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=table.n_modes()).map(|j| format!("n{j}")));
    writer.write_record(&header)?;
    for (k, &t) in table.times.iter().enumerate() {
        let mut record = vec![format_value(t)];
        record.extend(table.row(k).into_iter().map(format_value));
        writer.write_record(&record)?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::io("<csv buffer>", e.into_error()))
}

/// Times and per-mode densities read back from CSV text.
pub fn read_csv(bytes: &[u8]) -> Result<(Vec<f64>, Vec<Vec<f64>>), CliError> {
    let mut reader = csv::Reader::from_reader(bytes);
    let n_modes = reader.headers()?.len().saturating_sub(1);
    let mut times = Vec::new();
    let mut densities = vec![Vec::new(); n_modes];
    for record in reader.records() {
        let record = record?;
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| CliError::Config {
                path: "<csv>".into(),
                message: format!("bad number {s:?}: {e}"),
            })
        };
        times.push(parse(&record[0])?);
        for (j, column) in densities.iter_mut().enumerate() {
            column.push(parse(&record[j + 1])?);
        }
    }
    Ok((times, densities))
}

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// A static line chart of every `n_j(t)` on `[0, t_end] × [0, 1]`.
pub fn svg_chart(table: &TrajectoryTable) -> String {
    let (width, height, margin) = (640.0, 400.0, 48.0);
    let plot_w = width - 2.0 * margin;
    let plot_h = height - 2.0 * margin;
    let t_max = table
        .times
        .last()
        .copied()
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    let x = |t: f64| margin + plot_w * t / t_max;
    let y = |n: f64| height - margin - plot_h * n;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for (label, value) in [("0", 0.0), ("0.5", 0.5), ("1", 1.0)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{label}</text>"#,
            margin - 6.0,
            y(value) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">t = {}</text>"#,
        x(t_max),
        height - margin + 18.0,
        t_max
    );
    for (j, column) in table.densities.iter().enumerate() {
        let colour = PALETTE[j % PALETTE.len()];
        let points: Vec<String> = table
            .times
            .iter()
            .zip(column)
            .map(|(&t, &n)| format!("{:.2},{:.2}", x(t), y(n)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" fill="{colour}">n{}</text>"#,
            width - margin + 6.0,
            margin + 14.0 * (j as f64 + 1.0),
            j + 1
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes the chart atomically.
pub fn write_svg(path: &Path, table: &TrajectoryTable) -> Result<(), CliError> {
    write_atomic(path, svg_chart(table).as_bytes())
}

/// Writes the table atomically.
pub fn write_csv(path: &Path, table: &TrajectoryTable) -> Result<(), CliError> {
    write_atomic(path, &csv_bytes(table)?)
}

/// Reads a CSV file written by [`write_csv`].
pub fn load_csv(path: &Path) -> Result<(Vec<f64>, Vec<Vec<f64>>), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    read_csv(&bytes)
}
