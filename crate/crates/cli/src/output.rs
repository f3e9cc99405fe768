//! CSV and text writers. Numbers use Rust's shortest round-trip `Display`,
//! which is locale independent and parses back to the same bits.

use std::fs;
use std::path::Path;

use crate::Result;

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn opt_count(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes a header row followed by `rows`.
pub fn write_csv<I, R, S>(path: &Path, header: &[S], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
    S: AsRef<str>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header.iter().map(AsRef::as_ref))?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}
