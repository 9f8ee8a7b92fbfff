//! File formats: JSON-lines corpora, `DDCM` binary matrices, label lists.
//!
//! `DDCM` layout: the magic bytes `DDCM`, then `rows` and `cols` as
//! little-endian `u64`, then `rows * cols` little-endian `f64` values in
//! row-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::{Content, RawCorpus, Record};

pub const DDCM_MAGIC: &[u8; 4] = b"DDCM";

pub fn encode_ddcm(rows: usize, cols: usize, data: &[f64]) -> Vec<u8> {
    assert_eq!(data.len(), rows * cols, "DDCM payload size mismatch");
    let mut out = Vec::with_capacity(20 + 8 * data.len());
    out.extend_from_slice(DDCM_MAGIC);
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(cols as u64).to_le_bytes());
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_ddcm(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    if bytes.len() < 20 || &bytes[..4] != DDCM_MAGIC {
        return Err(Error::data(
            "not a DDCM file (bad magic or truncated header)",
        ));
    }
    let rows = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let count = rows
        .checked_mul(cols)
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::data("DDCM dimensions overflow"))?;
    let payload = &bytes[20..];
    if payload.len() != count * 8 {
        return Err(Error::data(format!(
            "DDCM payload has {} bytes, expected {} for {rows} x {cols}",
            payload.len(),
            count * 8
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((rows as usize, cols as usize, data))
}

pub fn write_ddcm(path: &Path, rows: usize, cols: usize, data: &[f64]) -> Result<()> {
    let bytes = encode_ddcm(rows, cols, data);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_ddcm(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_ddcm(&bytes).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// One label string per line; trailing empty lines are ignored.
pub fn read_labels(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels: Vec<String> = text
        .lines()
        .map(|l| l.trim_end_matches('\r').to_string())
        .collect();
    while labels.last().is_some_and(|l| l.is_empty()) {
        labels.pop();
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[String]) -> Result<()> {
    let mut body = labels.join("\n");
    body.push('\n');
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    id: String,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    vector: Option<Vec<f64>>,
    label: String,
}

pub fn parse_corpus_jsonl(reader: impl BufRead) -> Result<RawCorpus> {
    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::data(format!("corpus line {}: {e}", lineno + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(&line)
            .map_err(|e| Error::data(format!("corpus line {}: {e}", lineno + 1)))?;
        let content = match (rec.text, rec.vector) {
            (Some(t), None) => Content::Text(t),
            (None, Some(v)) => Content::Vector(v),
            _ => {
                return Err(Error::data(format!(
                    "corpus line {}: record `{}` needs exactly one of `text` or `vector`",
                    lineno + 1,
                    rec.id
                )))
            }
        };
        records.push(Record {
            id: rec.id,
            content,
            label: rec.label,
        });
    }
    RawCorpus::new(records)
}

pub fn read_corpus_jsonl(path: &Path) -> Result<RawCorpus> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus_jsonl(BufReader::new(f))
}

/// Dense embeddings plus a parallel label file. Row `i` gets id `i`.
pub fn read_embeddings(matrix: &Path, labels: &Path) -> Result<RawCorpus> {
    let (rows, cols, data) = read_ddcm(matrix)?;
    let label_path = labels;
    let labels = read_labels(label_path)?;
    if labels.len() != rows {
        return Err(Error::data(format!(
            "{} has {rows} rows but {} has {} labels",
            matrix.display(),
            label_path.display(),
            labels.len()
        )));
    }
    let records = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| Record {
            id: i.to_string(),
            content: Content::Vector(data[i * cols..(i + 1) * cols].to_vec()),
            label,
        })
        .collect();
    RawCorpus::new(records)
}

/// Buffered CSV writer for the plot-data tables.
pub(crate) struct CsvWriter {
    path: std::path::PathBuf,
    out: csv::Writer<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let out = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
        let mut w = Self {
            path: path.to_path_buf(),
            out,
        };
        w.raw_row(header.iter().map(|s| s.to_string()))?;
        Ok(w)
    }

    pub fn raw_row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<()> {
        self.out
            .write_record(fields)
            .map_err(|e| Error::io(&self.path, e.into()))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}
