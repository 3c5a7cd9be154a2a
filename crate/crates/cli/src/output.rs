//! CSV tables and gnuplot scripts, written atomically.

use anyhow::{bail, Context, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Full-precision float field (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Checks the output directory up front so a bad path fails before any
/// computation starts.
pub fn check_dir(dir: &Path) -> Result<()> {
    if !dir.is_dir() {
        bail!("output directory {} does not exist", dir.display());
    }
    Ok(())
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot write to {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    Ok(())
}

pub fn write_csv(path: &Path, provenance: &str, table: &Table) -> Result<()> {
    if table.rows.is_empty() {
        bail!("refusing to write empty table {}", path.display());
    }
    let mut buf = Vec::new();
    writeln!(buf, "{provenance}")?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.header)?;
        for r in &table.rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    write_atomic(path, &buf)
}

pub fn script_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

const PREAMBLE: &str = "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset grid\n";

/// Magnitude-dB traces against sample index, region boundaries as dashed
/// vertical rules labelled with the region names.
pub fn region_script(
    csv: &Path,
    title: &str,
    boundaries: &[usize; 6],
    labels: &[&str; 5],
    traces: &[(usize, &str)],
) -> String {
    let mut s = format!("# {title}\n{PREAMBLE}");
    s += "set xlabel 'sample index'\nset ylabel 'normalized magnitude (dB)'\nset yrange [-120:5]\n";
    for b in &boundaries[1..5] {
        s += &format!("set arrow from {b}, graph 0 to {b}, graph 1 nohead dt 2\n");
    }
    for (i, lab) in labels.iter().enumerate() {
        let mid = (boundaries[i] + boundaries[i + 1]) / 2;
        s += &format!("set label '{lab}' at {mid}, graph 0.95 center\n");
    }
    let plots: Vec<String> = traces
        .iter()
        .map(|(col, t)| format!("'{}' using 1:{col} with lines title '{t}'", file_name(csv)))
        .collect();
    s += &format!("plot {}\n", plots.join(", \\\n     "));
    s
}

/// Line plot of several columns against column 1.
pub fn line_script(
    csv: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    traces: &[(usize, &str)],
) -> String {
    let mut s = format!("# {title}\n{PREAMBLE}");
    s += &format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n");
    let plots: Vec<String> = traces
        .iter()
        .map(|(col, t)| {
            format!(
                "'{}' using 1:{col} with linespoints title '{t}'",
                file_name(csv)
            )
        })
        .collect();
    s += &format!("plot {}\n", plots.join(", \\\n     "));
    s
}

/// Map view of `z(x, y)` for a CSV in row-major blocks of constant `x`.
pub fn heatmap_script(csv: &Path, title: &str, x: usize, y: usize, z: usize) -> String {
    format!(
        "# {title}\n{PREAMBLE}set view map\nset xlabel 'f_d T'\nset ylabel 'sample index'\nset cblabel 'normalized magnitude (dB)'\nset cbrange [-80:0]\nsplot '{}' using {x}:{y}:{z} with points pointtype 5 pointsize 0.3 palette notitle\n",
        file_name(csv)
    )
}
