//! Atomic file output: write to a hidden sibling, then rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

fn out_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(out_err(dir))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(out_err(&tmp))?;
    f.write_all(bytes).map_err(out_err(&tmp))?;
    f.sync_all().map_err(out_err(&tmp))?;
    drop(f);
    fs::rename(&tmp, path).map_err(out_err(path))
}

/// Collects the paths written by a command.
#[derive(Debug, Default)]
pub struct Written(pub Vec<PathBuf>);

impl Written {
    pub fn write(&mut self, path: PathBuf, bytes: impl AsRef<[u8]>) -> Result<()> {
        write_atomic(&path, bytes.as_ref())?;
        self.0.push(path);
        Ok(())
    }

    pub fn json<T: serde::Serialize>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(los_glm::Error::from)?;
        text.push('\n');
        self.write(path, text)
    }

    pub fn csv(
        &mut self,
        path: PathBuf,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(los_glm::Error::from)?;
        for r in rows {
            w.write_record(&r).map_err(los_glm::Error::from)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output {
            path: path.clone(),
            source: e.into_error(),
        })?;
        self.write(path, bytes)
    }
}
