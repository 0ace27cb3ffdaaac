//! Artifact files: series CSVs, JSON tables and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use spinrg::observables::TimeSeries;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Writes files into one directory and remembers their checksums.
pub struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), data)?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileRecord {
            name: name.to_string(),
            bytes: data.len() as u64,
            sha256: sha256_hex(data),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Config(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// The manifest is not listed among the files it describes.
    pub fn write_manifest<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Config(format!("serializing manifest: {e}")))?;
        text.push('\n');
        write_atomic(&self.dir.join("manifest.json"), text.as_bytes())
    }
}

/// Write to a sibling temporary file, then rename over the target.
pub fn write_atomic(path: &Path, data: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, data).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Values with 17 significant digits.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in series.grid.times().iter().zip(&series.values) {
        out.push_str(&fmt_value(*t));
        out.push(',');
        out.push_str(&fmt_value(*v));
        out.push('\n');
    }
    out
}

pub fn series_file_name(model: &str, series: &TimeSeries, n: usize) -> String {
    format!(
        "{model}_{}_{}_N{n:02}.csv",
        series.label.kind.name(),
        series.label.chain.name()
    )
}
