//! One directory per run: config snapshot, CSV tables, JSON report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::ExperimentConfig;

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Buffered writer for `name`, creating parent directories as needed.
    pub fn file(&self, name: &str) -> anyhow::Result<BufWriter<File>> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    pub fn write_config(&self, cfg: &ExperimentConfig) -> anyhow::Result<()> {
        let mut f = self.file("config.toml")?;
        f.write_all(cfg.to_toml()?.as_bytes())?;
        f.flush().context("writing config.toml")
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        let mut f = self.file(name)?;
        serde_json::to_writer_pretty(&mut f, value).with_context(|| format!("writing {name}"))?;
        f.write_all(b"\n")?;
        f.flush().with_context(|| format!("writing {name}"))
    }
}

/// Report envelope shared by all subcommands.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub command: &'a str,
    pub passed: bool,
    pub config: &'a ExperimentConfig,
    pub results: T,
}
