//! On-disk cache of `N(n, m)` counts.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    schema_version: u32,
    version: String,
    counts: BTreeMap<String, u64>,
}

pub struct CountCache {
    path: PathBuf,
    file: CacheFile,
    dirty: bool,
}

fn key(n: usize, m: u64) -> String {
    format!("N({n},{m})")
}

impl CountCache {
    /// Opens the cache at `path`. A missing, unreadable or stale file (other
    /// schema or tool version) starts an empty cache that will replace it.
    pub fn open(path: &Path) -> Self {
        let fresh = CacheFile {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            counts: BTreeMap::new(),
        };
        let file = fs::read_to_string(path)
            .ok()
            .and_then(|text| serde_json::from_str::<CacheFile>(&text).ok())
            .filter(|f| f.schema_version == fresh.schema_version && f.version == fresh.version)
            .unwrap_or(fresh);
        Self {
            path: path.to_path_buf(),
            file,
            dirty: false,
        }
    }

    pub fn get(&self, n: usize, m: u64) -> Option<u64> {
        self.file.counts.get(&key(n, m)).copied()
    }

    pub fn insert(&mut self, n: usize, m: u64, value: u64) {
        if self.file.counts.insert(key(n, m), value) != Some(value) {
            self.dirty = true;
        }
    }

    /// Writes through a temporary file so readers never see a partial cache.
    pub fn save(&mut self) -> std::io::Result<()> {
        if !self.dirty {
            return Ok(());
        }
        let dir = self
            .path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let tmp = self.path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(
                serde_json::to_string_pretty(&self.file)
                    .expect("cache serializes")
                    .as_bytes(),
            )?;
            f.write_all(b"\n")?;
        }
        fs::rename(&tmp, &self.path)?;
        self.dirty = false;
        Ok(())
    }
}
