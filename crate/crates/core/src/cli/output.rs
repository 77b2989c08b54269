use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::CliError;

/// Output files written to hidden temporaries and renamed into place only
/// on [`Staged::commit`]; dropping an uncommitted set removes everything.
#[derive(Debug, Default)]
pub struct Staged {
    pending: Vec<(PathBuf, PathBuf)>,
    placed: Vec<PathBuf>,
    committed: bool,
}

fn temp_path(target: &Path) -> PathBuf {
    let name = target.file_name().map_or_else(|| "out".into(), |n| n.to_string_lossy().into_owned());
    target.with_file_name(format!(".{name}.partial"))
}

impl Staged {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write(&mut self, target: &Path, body: &str) -> Result<(), String> {
        let tmp = temp_path(target);
        self.pending.push((tmp.clone(), target.to_path_buf()));
        fs::write(&tmp, body).map_err(|e| format!("{}: {e}", target.display()))
    }

    pub fn commit(mut self) -> Result<(), String> {
        let pending = std::mem::take(&mut self.pending);
        for (i, (tmp, target)) in pending.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, target) {
                self.pending = pending[i..].to_vec();
                return Err(format!("{}: {e}", target.display()));
            }
            self.placed.push(target.clone());
        }
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staged {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for (tmp, _) in &self.pending {
            let _ = fs::remove_file(tmp);
        }
        for p in &self.placed {
            let _ = fs::remove_file(p);
        }
    }
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut s = Staged::new();
            s.write(path, text).map_err(CliError::Data)?;
            s.commit().map_err(CliError::Data)
        }
        None => io::stdout().write_all(text.as_bytes()).map_err(CliError::data),
    }
}
