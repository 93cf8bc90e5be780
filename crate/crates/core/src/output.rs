//! Artifact writers. Every file carries the hash of the parameters that
//! produced it: CSV files on a leading `# config_hash=` line, JSON files in a
//! top-level `config_hash` field.

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::Value;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const HASH_PREFIX: &str = "# config_hash=";

#[derive(Debug, Clone)]
pub struct ArtifactWriter {
    dir: PathBuf,
    hash: String,
}

impl ArtifactWriter {
    pub fn new(dir: impl Into<PathBuf>, hash: impl Into<String>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, hash: hash.into() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes a numeric table; `rows` must match `header` in width.
    pub fn write_csv<R, I>(&self, name: &str, header: &[&str], rows: R) -> Result<PathBuf>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = f64>,
    {
        let path = self.path(name);
        let mut file = BufWriter::new(File::create(&path)?);
        writeln!(file, "{HASH_PREFIX}{}", self.hash)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header)?;
        for row in rows {
            let rec: Vec<String> = row.into_iter().map(format_float).collect();
            if rec.len() != header.len() {
                return Err(Error::Shape {
                    expected: header.len(),
                    got: rec.len(),
                });
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Serializes `value` (which must be a JSON object) with the hash added.
    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut v = serde_json::to_value(value)?;
        match &mut v {
            Value::Object(map) => {
                map.insert("config_hash".into(), Value::String(self.hash.clone()));
            }
            _ => {
                v = serde_json::json!({ "config_hash": self.hash, "value": v });
            }
        }
        let path = self.path(name);
        let mut file = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut file, &v)?;
        writeln!(file)?;
        file.flush()?;
        Ok(path)
    }
}

/// Shortest representation that parses back to the same `f64`.
fn format_float(v: f64) -> String {
    format!("{v:e}")
}

/// Hash stamped into an artifact, if any.
pub fn read_hash(path: impl AsRef<Path>) -> Result<Option<String>> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "json") {
        let v: Value = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        return Ok(v.get("config_hash").and_then(|h| h.as_str()).map(str::to_owned));
    }
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    Ok(first.trim_end().strip_prefix(HASH_PREFIX).map(str::to_owned))
}

/// Reads a CSV written by [`ArtifactWriter::write_csv`] back as rows of numbers.
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let header = rdr.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number `{s}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
