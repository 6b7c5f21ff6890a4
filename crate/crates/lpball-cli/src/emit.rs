//! Output plumbing: stdout or atomic file writes (temp file + rename, so a
//! failed run never leaves a partial artifact behind).

use std::io::Write;
use std::path::{Path, PathBuf};

use lpball::error::{Error, Result};

pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into()),
        std::process::id()
    ));
    let io_err = |e: std::io::Error| Error::Config(format!("writing {}: {e}", path.display()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(content.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Where a subcommand's CSV goes.
pub struct OutputTarget {
    path: Option<PathBuf>,
}

impl OutputTarget {
    pub fn new(path: Option<PathBuf>) -> Self {
        OutputTarget { path }
    }

    pub fn write(&self, content: &str) -> Result<()> {
        match &self.path {
            Some(path) => write_atomic(path, content),
            None => {
                print!("{content}");
                Ok(())
            }
        }
    }
}
