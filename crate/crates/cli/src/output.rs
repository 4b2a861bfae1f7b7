//! Output helpers: number formatting, CSV writers and file placement.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

/// Locale-independent scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A buffered sink: the named file, or stdout for `-`.
pub fn sink(path: &str) -> Result<Box<dyn Write>> {
    if path == "-" {
        return Ok(Box::new(BufWriter::new(io::stdout())));
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(Box::new(BufWriter::new(file)))
}

pub fn csv_writer(path: &str) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(sink(path)?))
}

pub fn write_json<T: serde::Serialize>(path: &str, value: &T) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

/// Where the manifest of an output file goes: `<output>.manifest.json`.
pub fn manifest_path(output: &str) -> Option<PathBuf> {
    (output != "-").then(|| {
        let mut s = Path::new(output).as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    })
}
