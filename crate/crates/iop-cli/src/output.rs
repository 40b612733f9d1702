//! Reproducible file output.
//!
//! Every artifact is written to a temporary file in the destination
//! directory and atomically renamed into place, so interrupted runs never
//! leave partial files. CSV files start with `#` comment lines recording the
//! tool version, the SHA-256 of the config document, and the effective seed
//! - enough to reproduce the bytes exactly.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Output sink for one run.
pub struct Outputs {
    dir: PathBuf,
    config_sha256: String,
    seed: u64,
}

impl Outputs {
    /// Prepare (and create, if needed) the output directory.
    pub fn new(dir: &Path, config_sha256: &str, seed: u64) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| {
            CliError::Config(format!(
                "cannot create output directory '{}': {e}",
                dir.display()
            ))
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_sha256: config_sha256.to_string(),
            seed,
        })
    }

    fn io_err(&self, name: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
        let path = self.dir.join(name);
        move |e| CliError::Config(format!("cannot write '{}': {e}", path.display()))
    }

    /// Write a CSV file: comment header, column row, then `rows`.
    pub fn csv<R>(&self, name: &str, columns: &[&str], rows: R) -> CliResult<PathBuf>
    where
        R: IntoIterator<Item = Vec<String>>,
    {
        let err = self.io_err(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(&err)?;
        writeln!(tmp, "# iop-sim v{}", env!("CARGO_PKG_VERSION")).map_err(&err)?;
        writeln!(tmp, "# config_sha256={}", self.config_sha256).map_err(&err)?;
        writeln!(tmp, "# seed={}", self.seed).map_err(&err)?;

        let mut writer = csv::Writer::from_writer(tmp);
        writer
            .write_record(columns)
            .map_err(|e| CliError::Config(format!("csv write failed: {e}")))?;
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            writer
                .write_record(&row)
                .map_err(|e| CliError::Config(format!("csv write failed: {e}")))?;
        }
        let tmp = writer
            .into_inner()
            .map_err(|e| CliError::Config(format!("csv flush failed: {e}")))?;
        self.persist(tmp, name)
    }

    /// Write a non-CSV text artifact (SVG, JSON) atomically.
    pub fn text(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let err = self.io_err(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(&err)?;
        tmp.write_all(contents.as_bytes()).map_err(&err)?;
        self.persist(tmp, name)
    }

    fn persist(&self, tmp: tempfile::NamedTempFile, name: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        tmp.persist(&path).map_err(|e| {
            CliError::Config(format!("cannot finalize '{}': {}", path.display(), e.error))
        })?;
        Ok(path)
    }
}

/// Shortest round-trip decimal form of a float, `.` separator. Negative
/// zero is normalized so CSV cells never read `-0`.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}
