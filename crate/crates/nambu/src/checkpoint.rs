//! Per-stage checkpoint files. Every file starts with a fingerprint line;
//! a file whose fingerprint differs from the current problem is ignored.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{io, Result};

#[derive(Clone, Debug)]
pub struct Checkpoint {
    dir: PathBuf,
    fingerprint: String,
}

impl Checkpoint {
    /// Creates `dir` if needed. `identity` is any text that pins down the problem.
    pub fn open(dir: &Path, identity: &str) -> Result<Self> {
        fs::create_dir_all(dir).map_err(io(dir))?;
        Ok(Checkpoint { dir: dir.to_path_buf(), fingerprint: fingerprint(identity) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    fn path(&self, stage: &str) -> PathBuf {
        self.dir.join(format!("{stage}.txt"))
    }

    /// The stored body of `stage`, if present and written for this problem.
    pub fn load(&self, stage: &str) -> Result<Option<String>> {
        let path = self.path(stage);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        let Some((head, body)) = text.split_once('\n') else { return Ok(None) };
        if head.strip_prefix("# fingerprint ") != Some(self.fingerprint.as_str()) {
            return Ok(None);
        }
        Ok(Some(body.to_string()))
    }

    /// Written to a temporary name first, then renamed, so an interrupted
    /// write never leaves a truncated stage behind.
    pub fn store(&self, stage: &str, body: &str) -> Result<()> {
        let path = self.path(stage);
        let tmp = self.dir.join(format!("{stage}.txt.partial"));
        fs::write(&tmp, format!("# fingerprint {}\n{body}", self.fingerprint)).map_err(io(&tmp))?;
        fs::rename(&tmp, &path).map_err(io(&path))
    }
}

pub fn fingerprint(identity: &str) -> String {
    Sha256::digest(identity.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
