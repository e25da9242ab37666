use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// Reads observations from a text file (one number per line, `#` starts a
/// comment) or, with `column`, from a CSV file with a header row. `column`
/// is a header name or a 0-based index.
pub fn read_observations(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let values = match column {
        None => read_plain(path)?,
        Some(col) => read_csv(path, col)?,
    };
    if values.is_empty() {
        bail!("{}: no observations", path.display());
    }
    Ok(values)
}

fn check(path: &Path, line: usize, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| anyhow!("{}:{line}: cannot parse {raw:?} as a number", path.display()))?;
    if !(0.0..=1.0).contains(&v) {
        bail!("{}:{line}: value {v} lies outside [0, 1]", path.display());
    }
    Ok(v)
}

fn read_plain(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(check(path, i + 1, body)?);
    }
    Ok(out)
}

fn read_csv(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let idx = match headers.iter().position(|h| h == column) {
        Some(i) => i,
        None => column
            .parse::<usize>()
            .ok()
            .filter(|&i| i < headers.len())
            .ok_or_else(|| anyhow!("{}: no column {column:?}", path.display()))?,
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.with_context(|| format!("parsing {}", path.display()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = rec
            .get(idx)
            .ok_or_else(|| anyhow!("{}:{line}: missing column {column:?}", path.display()))?;
        out.push(check(path, line, field)?);
    }
    Ok(out)
}
