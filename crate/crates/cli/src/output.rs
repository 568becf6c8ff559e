//! Result files.
//!
//! `csv`: `<out>` holds the table and `<out>.meta.json` the metadata.
//! `json`: `<out>` holds both. Either way `<out>.run.json` records wall time,
//! the only content that differs between identical runs.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::Format;
use crate::run::{Outcome, RunError, VERSION};

pub fn csv_bytes(out: &Outcome) -> Result<Vec<u8>, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| RunError::Io(e.to_string());
    w.write_record(&out.columns).map_err(io)?;
    for row in &out.rows {
        w.write_record(row.iter().map(|x| format!("{x:?}")))
            .map_err(io)?;
    }
    w.into_inner().map_err(|e| RunError::Io(e.to_string()))
}

pub fn json_bytes(out: &Outcome) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(out).expect("outcome serializes");
    v.push(b'\n');
    v
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Write the result to `path`, or the table alone to stdout when `path` is `None`.
pub fn write(
    out: &Outcome,
    path: Option<&Path>,
    format: Format,
    wall_seconds: f64,
) -> Result<(), RunError> {
    let body = match format {
        Format::Csv => csv_bytes(out)?,
        Format::Json => json_bytes(out),
    };
    let Some(path) = path else {
        std::io::stdout().write_all(&body)?;
        return Ok(());
    };
    std::fs::write(path, body)?;
    if format == Format::Csv {
        let mut meta = serde_json::to_vec_pretty(&out.metadata).expect("metadata serializes");
        meta.push(b'\n');
        std::fs::write(sidecar(path, ".meta.json"), meta)?;
    }
    let run = json!({ "library_version": VERSION, "wall_time_seconds": wall_seconds });
    std::fs::write(sidecar(path, ".run.json"), format!("{run:#}\n"))?;
    Ok(())
}

/// Explicit choice, then the config, then the file extension, then CSV.
pub fn pick_format(flag: Option<Format>, config: Option<Format>, path: Option<&Path>) -> Format {
    flag.or(config)
        .or_else(|| match path?.extension()?.to_str()? {
            "json" => Some(Format::Json),
            _ => None,
        })
        .unwrap_or(Format::Csv)
}
