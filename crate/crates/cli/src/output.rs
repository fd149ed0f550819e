//! All-or-nothing output files.
//!
//! Each file is written to a hidden sibling and renamed into place. If the
//! command fails before [`Outputs::commit`], every file it produced is
//! removed again, so a failed run leaves no partial results behind.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

#[derive(Default)]
pub struct Outputs {
    written: Vec<PathBuf>,
    created_dir: Option<PathBuf>,
    committed: bool,
}

fn staging_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.partial-{}", std::process::id()))
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates `dir` if needed; it is removed on failure only if it was
    /// created here and is empty.
    pub fn directory(&mut self, dir: &Path) -> Result<()> {
        if !dir.exists() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            self.created_dir = Some(dir.to_path_buf());
        }
        Ok(())
    }

    /// Writes one file through `fill`, replacing any previous file at
    /// `path` only once `fill` has succeeded.
    pub fn write<F>(&mut self, path: &Path, fill: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let staging = staging_path(path);
        let result = (|| -> Result<()> {
            let file = File::create(&staging).with_context(|| format!("creating {}", path.display()))?;
            let mut sink = BufWriter::new(file);
            fill(&mut sink)?;
            sink.flush()?;
            sink.get_ref().sync_all()?;
            Ok(())
        })();
        if let Err(e) = result {
            let _ = fs::remove_file(&staging);
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        fs::rename(&staging, path).with_context(|| format!("moving output into {}", path.display()))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for path in &self.written {
            let _ = fs::remove_file(path);
        }
        if let Some(dir) = &self.created_dir {
            let _ = fs::remove_dir(dir);
        }
    }
}

/// `<path>.meta.json` next to a file output.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}
