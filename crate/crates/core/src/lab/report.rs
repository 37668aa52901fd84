//! Human-readable rendering of sweep and run artifacts.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Parse a flat `key = value` report file.
pub fn read_report_txt(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for line in text.lines() {
        if let Some((k, v)) = line.split_once('=') {
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

struct IndexRow {
    p: String,
    k: String,
    regime: String,
    classification: String,
    exponent: String,
    dir: String,
}

fn read_index(path: &Path) -> Result<Vec<IndexRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(Error::Config(format!(
                "{} line {}: expected 7 columns",
                path.display(),
                i + 1
            )));
        }
        rows.push(IndexRow {
            p: cols[1].into(),
            k: cols[2].into(),
            regime: cols[3].into(),
            classification: cols[4].into(),
            exponent: cols[5].into(),
            dir: cols[6].into(),
        });
    }
    Ok(rows)
}

fn pad(s: &str, w: usize) -> String {
    format!("{s:<w$}")
}

/// Render a sweep directory (or a single cell directory) as an aligned text
/// table mirroring the phase diagram.
pub fn render_report(dir: &Path) -> Result<String> {
    if !dir.is_dir() {
        return Err(Error::Config(format!("{} is not a directory", dir.display())));
    }
    let index = dir.join("index.csv");
    if index.is_file() {
        let rows = read_index(&index)?;
        let header = ["p", "k", "expected", "observed", "decay_exp", "cell"];
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        let cols = |r: &IndexRow| {
            [
                r.p.clone(),
                r.k.clone(),
                r.regime.clone(),
                r.classification.clone(),
                if r.exponent.is_empty() { "-".into() } else { r.exponent.clone() },
                r.dir.clone(),
            ]
        };
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(cols(r)) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        for (h, w) in header.iter().zip(&widths) {
            let _ = write!(out, "{}  ", pad(h, *w));
        }
        out.push('\n');
        for w in &widths {
            let _ = write!(out, "{}  ", "-".repeat(*w));
        }
        out.push('\n');
        for r in &rows {
            for (c, w) in cols(r).iter().zip(&widths) {
                let _ = write!(out, "{}  ", pad(c, *w));
            }
            out.push('\n');
        }
        return Ok(out);
    }

    // single-cell directory
    let report = dir.join("report.txt");
    if report.is_file() {
        let map = read_report_txt(&report)?;
        let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &map {
            let _ = writeln!(out, "{}  {v}", pad(k, width));
        }
        return Ok(out);
    }
    Err(Error::Config(format!(
        "{} contains neither index.csv nor report.txt",
        dir.display()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_directory_is_a_structured_error() {
        let err = render_report(Path::new("/nonexistent/sweep")).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn renders_an_index_as_a_table() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(
            tmp.path().join("index.csv"),
            "cell,p,k,regime_expected,classification,decay_exponent,dir\n\
             0,4,0.5,subcritical,global_nondecay,0.01,cell_000\n\
             1,4,1.25,supercritical,blow_up,,cell_001\n",
        )
        .unwrap();
        let table = render_report(tmp.path()).unwrap();
        assert!(table.contains("global_nondecay"));
        assert!(table.contains("blow_up"));
        assert_eq!(table.lines().count(), 4);
    }
}
