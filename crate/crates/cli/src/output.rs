use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// A CSV table: provenance comment, header, rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self, hash: &str, seed: u64) -> Result<Vec<u8>, CliError> {
        let mut buf = format!("# config_sha256={hash} seed={seed}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    pub fn write(&self, dir: &Path, file: &str, hash: &str, seed: u64) -> Result<PathBuf, CliError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(file);
        fs::write(&path, self.to_bytes(hash, seed)?)?;
        Ok(path)
    }
}

pub fn num(x: f64) -> String {
    x.to_string()
}
