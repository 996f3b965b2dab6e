//! Atomic file emission confined to one output directory.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Writes `name` (a bare file name) through a temporary file in the same
    /// directory and renames it into place.
    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let plain = Path::new(name);
        if plain.file_name().map(|f| f != plain.as_os_str()).unwrap_or(true) {
            return Err(CliError::Config(format!("refusing to write `{name}` outside the output directory")));
        }
        let target = self.root.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).map_err(|e| CliError::io(&self.root, e))?;
        tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
        log::info!("wrote {}", target.display());
        Ok(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::create(&dir.path().join("nested")).unwrap();
        out.write("a.txt", b"one").unwrap();
        let p = out.write("a.txt", b"two").unwrap();
        assert_eq!(std::fs::read(p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(out.path()).unwrap().count(), 1);
    }

    #[test]
    fn rejects_escaping_names() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::create(dir.path()).unwrap();
        for name in ["../x", "sub/x", "/tmp/x", "", ".."] {
            assert!(out.write(name, b"").is_err(), "{name}");
        }
    }
}
