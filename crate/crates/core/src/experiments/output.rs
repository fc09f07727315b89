//! JSONL trial logs and CSV summaries. Every file starts with the run header
//! (schema version, experiment name, master seed).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub schema_version: u32,
    pub experiment: String,
    pub master_seed: u64,
}

impl RunHeader {
    pub fn new(experiment: &str, master_seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            master_seed,
        }
    }
}

/// Header object on the first line, then one JSON object per row.
pub fn write_jsonl<T: Serialize>(mut out: impl Write, header: &RunHeader, rows: &[T]) -> Result<()> {
    serde_json::to_writer(&mut out, &serde_json::json!({ "header": header }))?;
    out.write_all(b"\n")?;
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// A `# key=value` comment line with the header, then CSV with column names.
/// `T` must serialize to a flat record.
pub fn write_csv<T: Serialize>(mut out: impl Write, header: &RunHeader, rows: &[T]) -> Result<()> {
    writeln!(
        out,
        "# schema_version={} experiment={} master_seed={}",
        header.schema_version, header.experiment, header.master_seed
    )?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        ell: usize,
        mean: f64,
    }

    #[test]
    fn headers_carry_seed() {
        let h = RunHeader::new("erode", 42);
        let rows = [Row { ell: 8, mean: 1.5 }, Row { ell: 16, mean: 6.0 }];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &h, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["header"]["master_seed"], 42);
        assert_eq!(first["header"]["schema_version"], SCHEMA_VERSION);
        assert_eq!(text.lines().count(), 3);

        let mut buf = Vec::new();
        write_csv(&mut buf, &h, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema_version=1 experiment=erode master_seed=42");
        assert_eq!(lines[1], "ell,mean");
        assert_eq!(lines[2], "8,1.5");
    }
}
