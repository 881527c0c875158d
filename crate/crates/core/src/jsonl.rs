//! Newline-delimited JSON helpers.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// One parsed line together with its 1-based line number.
pub struct Line<T> {
    pub number: usize,
    pub value: T,
}

/// Failure while reading a JSONL stream.
#[derive(Debug)]
pub enum LineError {
    Io(io::Error),
    Parse { line: usize, message: String },
}

/// Parses every non-blank line of `reader` as `T`.
pub fn read_lines<T, R>(reader: R) -> Result<Vec<Line<T>>, LineError>
where
    T: DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(LineError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| LineError::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(Line {
            number: idx + 1,
            value,
        });
    }
    Ok(out)
}

pub fn open(path: &Path) -> io::Result<BufReader<File>> {
    File::open(path).map(BufReader::new)
}

pub fn write_lines<T, W>(mut writer: W, values: impl IntoIterator<Item = T>) -> io::Result<()>
where
    T: Serialize,
    W: Write,
{
    for value in values {
        serde_json::to_writer(&mut writer, &value)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn write_file<T: Serialize>(path: &Path, values: impl IntoIterator<Item = T>) -> io::Result<()> {
    write_lines(BufWriter::new(File::create(path)?), values)
}
