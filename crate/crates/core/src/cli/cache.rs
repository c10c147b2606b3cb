//! Content-addressed result cache: one JSON file per fingerprint.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::json::Report;

/// Bumped whenever cached results could change meaning.
pub const VERSION_TAG: &str = concat!("spinh-", env!("CARGO_PKG_VERSION"), "-cache1");

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    fingerprint: String,
    report: Report,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
    tag: String,
}

impl Cache {
    pub fn disabled() -> Self {
        Cache {
            dir: None,
            tag: VERSION_TAG.to_string(),
        }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache {
            dir: Some(dir.into()),
            tag: VERSION_TAG.to_string(),
        }
    }

    /// Overrides the version tag (used to test invalidation).
    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tag = tag.to_string();
        self
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(&self, fingerprint: &str) -> String {
        let mut h = Sha256::new();
        h.update(self.tag.as_bytes());
        h.update(b"\n");
        h.update(fingerprint.as_bytes());
        hex::encode(h.finalize())
    }

    /// A cached report, or `None` on a miss. Unreadable entries produce a
    /// warning on `warn` and count as a miss.
    pub fn load(&self, fingerprint: &str, warn: &mut dyn Write) -> Option<Report> {
        let path = self.dir.as_ref()?.join(format!("{}.json", self.key(fingerprint)));
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice::<Entry>(&bytes) {
            Ok(e) if e.version == self.tag && e.fingerprint == fingerprint => Some(e.report),
            Ok(_) => None,
            Err(err) => {
                let _ = writeln!(warn, "warning: ignoring corrupt cache entry {}: {err}", path.display());
                None
            }
        }
    }

    pub fn store(&self, fingerprint: &str, report: &Report) -> std::io::Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        fs::create_dir_all(dir)?;
        let entry = Entry {
            version: self.tag.clone(),
            fingerprint: fingerprint.to_string(),
            report: report.clone(),
        };
        let path = dir.join(format!("{}.json", self.key(fingerprint)));
        // write then rename so readers never see a partial file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&entry).map_err(std::io::Error::other)?)?;
        fs::rename(tmp, path)
    }
}
