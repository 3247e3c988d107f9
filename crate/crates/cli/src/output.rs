//! Output directory bookkeeping and the run manifest.

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct OutputDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutputDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Creates `name`, hands a buffered writer to `fill` and records the file.
    pub fn write<F>(&mut self, name: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        fill(&mut w)?;
        w.flush()?;
        self.record(name);
        Ok(())
    }

    /// Records a file written by someone else.
    pub fn record(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_owned());
        }
    }

    /// `manifest.txt`: command, versions, SHA-256 of every output, config echo.
    pub fn write_manifest(&self, command: &str, config_echo: &str) -> Result<()> {
        let mut names = self.files.clone();
        names.sort();
        let mut text = String::new();
        text.push_str(&format!("command = {command}\n"));
        text.push_str(&format!("shockadj = {}\n", env!("CARGO_PKG_VERSION")));
        text.push_str("\n[outputs]\n");
        for n in &names {
            let bytes = std::fs::read(self.path(n)).with_context(|| format!("hashing {n}"))?;
            text.push_str(&format!("{n} sha256 {}\n", hex::encode(Sha256::digest(&bytes))));
        }
        text.push_str("\n[config]\n");
        text.push_str(config_echo);
        std::fs::write(self.path("manifest.txt"), text).context("writing manifest")?;
        Ok(())
    }
}
