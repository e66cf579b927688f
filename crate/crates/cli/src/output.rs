//! CSV emission. Reals are written in scientific notation with 17
//! significant digits so every value round-trips exactly.

use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        let mut writer = csv::Writer::from_path(&path)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        writer.write_record(header)?;
        Ok(Self { path, writer })
    }

    pub fn row(&mut self, fields: &[Field]) -> CliResult<()> {
        self.writer.write_record(fields.iter().map(Field::render))?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }

    /// Flushes what has been written so far, e.g. before reporting a failure.
    pub fn flush(&mut self) -> CliResult<()> {
        self.writer.flush()?;
        Ok(())
    }
}

pub enum Field {
    Int(u64),
    Real(f64),
    Text(String),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Int(i) => i.to_string(),
            Field::Real(x) => fmt_real(*x),
            Field::Text(s) => s.clone(),
        }
    }
}

impl From<usize> for Field {
    fn from(i: usize) -> Self {
        Field::Int(i as u64)
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Real(x)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}
