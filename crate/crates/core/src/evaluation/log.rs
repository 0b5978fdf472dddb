//! Append-only evaluation logs: one JSON object per line.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::cv::EvaluationRecord;
use crate::error::{Error, Result};

pub fn write_records<W: Write>(mut w: W, records: &[EvaluationRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io("<log writer>", e))?;
    }
    Ok(())
}

pub fn append_log(path: impl AsRef<Path>, records: &[EvaluationRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_records(&mut w, records)?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parsed records plus the number of malformed lines skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogContents {
    pub records: Vec<EvaluationRecord>,
    pub malformed: usize,
}

pub fn read_records<R: Read>(r: R) -> Result<LogContents> {
    let mut out = LogContents::default();
    for line in BufReader::new(r).lines() {
        let line = line.map_err(|e| Error::io("<log reader>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(rec) => out.records.push(rec),
            Err(e) => {
                log::warn!("skipping malformed log line: {e}");
                out.malformed += 1;
            }
        }
    }
    Ok(out)
}

pub fn read_log(path: impl AsRef<Path>) -> Result<LogContents> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file)
}
