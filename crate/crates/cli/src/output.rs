//! Output directory handling: JSON and CSV files plus the run manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

/// Collects the files an experiment writes so the manifest can list them.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
    started: Instant,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new(), started: Instant::now() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Opens `name` for writing and records it in the manifest.
    pub fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut out = self.file(name)?;
        serde_json::to_writer_pretty(&mut out, value)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    /// Writes a CSV with a header row and LF line endings.
    pub fn csv<S: Serialize>(&mut self, name: &str, header: &[&str], rows: &[S]) -> Result<()> {
        let mut w = csv_writer(self.file(name)?);
        w.write_record(header)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `manifest.json`: the command, the resolved config, the files
    /// produced and the wall-clock time since the directory was created.
    pub fn finish(mut self, command: &str, cfg: &RunConfig, passed: bool) -> Result<()> {
        let manifest = Manifest {
            command,
            passed,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.written.clone(),
            config: cfg,
        };
        self.json("manifest.json", &manifest)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    passed: bool,
    wall_clock_seconds: f64,
    outputs: Vec<String>,
    config: &'a RunConfig,
}

pub fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}
