//! Atomic output files: content goes to a temporary file in the target
//! directory and is renamed into place only once fully written.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::{CliError, CliResult};

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Fails early if `path` cannot be created: missing parent directory or an
/// existing directory at `path`.
pub fn check_writable(path: &Path) -> CliResult<()> {
    let dir = parent_dir(path);
    if !dir.is_dir() {
        return Err(CliError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, format!("directory {} does not exist", dir.display())),
        ));
    }
    if path.is_dir() {
        return Err(CliError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::IsADirectory, "output path is a directory"),
        ));
    }
    Ok(())
}

/// Writes through `fill` and renames into `path`. Nothing is left behind on
/// failure.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    let tmp = NamedTempFile::new_in(parent_dir(path)).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(tmp);
    fill(&mut w)?;
    let tmp = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
