//! Output helpers: atomic file replacement, round-trip float formatting and
//! the CSV layouts of the command-line tools.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::dynamics::ResponseHistory;
use crate::error::{Error, Result};
use crate::insensitivity::ContourGrid;

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Write to a sibling temporary file, then rename over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub(crate) fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Numerical(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    w.into_inner().map_err(|e| Error::Numerical(e.to_string()))
}

/// Columns `t, y_j…, ydot_j…, r_j…, fr_j…, yabs_j…, Eh_j…` (1-based `j`).
pub fn render_response_csv(h: &ResponseHistory) -> Result<Vec<u8>> {
    let n = h.n_dof();
    let mut header = vec!["t".to_string()];
    for prefix in ["y", "ydot", "r", "fr", "yabs", "Eh"] {
        header.extend((1..=n).map(|j| format!("{prefix}_{j}")));
    }
    let blocks = [&h.y, &h.y_dot, &h.r, &h.f_r, &h.y_ddot_abs, &h.e_h];
    let rows = (0..h.len()).map(|k| {
        let mut row = Vec::with_capacity(1 + 6 * n);
        row.push(fmt_f64(h.time[k]));
        for b in blocks {
            row.extend(b.iter().map(|s| fmt_f64(s[k])));
        }
        row
    });
    csv_bytes(&header, rows)
}

pub fn write_response_csv(path: &Path, h: &ResponseHistory) -> Result<()> {
    atomic_write(path, &render_response_csv(h)?)
}

/// One row per grid cell. Undefined stationary values and the metrics of
/// infeasible cells are left empty; `violation` names the failed condition.
pub fn render_contour_csv(g: &ContourGrid) -> Result<Vec<u8>> {
    let header: Vec<String> = [
        "delta_n",
        "delta_1",
        "delta_2",
        "eps1",
        "eps_star1",
        "area1",
        "eps2",
        "eps_star2",
        "area2",
        "feasible",
        "curve_type1",
        "curve_type2",
        "violation",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows = g.cells.iter().map(|c| {
        let p = c.perturbation;
        let mut row = vec![fmt_f64(p.delta_n), fmt_f64(p.delta_1), fmt_f64(p.delta_2)];
        match &c.outcome {
            Ok(m) => row.extend([
                fmt_f64(m.eps_1),
                fmt_opt(m.eps_star_1),
                fmt_f64(m.area_eps_1),
                fmt_f64(m.eps_2),
                fmt_opt(m.eps_star_2),
                fmt_f64(m.area_eps_2),
                "true".into(),
                m.curve_type_1.label().into(),
                m.curve_type_2.label().into(),
                String::new(),
            ]),
            Err(why) => {
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.extend(["false".into(), String::new(), String::new(), why.code().into()]);
            }
        }
        row
    });
    csv_bytes(&header, rows)
}

pub fn write_contour_csv(path: &Path, g: &ContourGrid) -> Result<()> {
    atomic_write(path, &render_contour_csv(g)?)
}

/// Generic table writer for small summaries.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    let bytes = csv_bytes(&header, rows.iter().map(|r| r.iter().map(|v| fmt_f64(*v)).collect()))?;
    atomic_write(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1e21, 0.0, 123456.789] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(atomic_write(&dir.path().join("missing/x.txt"), b"z").is_err());
    }
}
