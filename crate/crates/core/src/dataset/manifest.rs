use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::DatasetConfig;
use crate::wavegen::ModulationScheme;
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
const FORMAT_TAG: &str = "specamc-manifest/1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageShape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl ImageShape {
    pub fn len(&self) -> usize {
        self.height * self.width * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the dataset root, `/`-separated.
    pub path: String,
    pub scheme: ModulationScheme,
    /// Position of `scheme` in the manifest's class list.
    pub label: usize,
    pub snr_db: i32,
    pub frame_seed: u64,
    pub fold: Option<usize>,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub per_class: BTreeMap<String, usize>,
    pub per_snr: BTreeMap<i32, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub config: DatasetConfig,
    pub image: ImageShape,
    /// Class names indexed by label.
    pub classes: Vec<String>,
    pub k: Option<usize>,
    pub fold_seed: Option<u64>,
    pub entries: Vec<ManifestEntry>,
    pub totals: Totals,
}

impl DatasetManifest {
    pub fn new(config: DatasetConfig, image: ImageShape, entries: Vec<ManifestEntry>) -> Self {
        let classes = config
            .schemes
            .iter()
            .map(|s| s.name().to_string())
            .collect();
        let mut m = Self {
            format: FORMAT_TAG.to_string(),
            config,
            image,
            classes,
            k: None,
            fold_seed: None,
            entries,
            totals: Totals::default(),
        };
        m.recount();
        m
    }

    pub fn recount(&mut self) {
        let mut t = Totals::default();
        for e in &self.entries {
            *t.per_class.entry(e.scheme.name().to_string()).or_default() += 1;
            *t.per_snr.entry(e.snr_db).or_default() += 1;
        }
        self.totals = t;
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<root>/manifest.json` via a temporary file and rename.
    pub fn write(&self, root: &Path) -> Result<PathBuf> {
        let path = root.join(MANIFEST_FILE);
        let tmp = root.join(format!(".{MANIFEST_FILE}.tmp"));
        fs::write(&tmp, self.to_json()?).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    /// Reads a manifest file (or `<dir>/manifest.json` when given a directory).
    pub fn read(path: &Path) -> Result<Self> {
        let path = if path.is_dir() {
            path.join(MANIFEST_FILE)
        } else {
            path.to_path_buf()
        };
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        if m.format != FORMAT_TAG {
            return Err(Error::Format {
                path,
                reason: format!("unsupported manifest format {:?}", m.format),
            });
        }
        Ok(m)
    }

    /// Reads one entry's bytes and checks its digest.
    pub fn read_verified(&self, root: &Path, entry: &ManifestEntry) -> Result<Vec<u8>> {
        let path = root.join(&entry.path);
        let bytes = fs::read(&path).map_err(|e| Error::Integrity {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        let digest = sha256_hex(&bytes);
        if digest != entry.sha256 {
            return Err(Error::Integrity {
                path,
                reason: format!("sha256 {digest} != manifest {}", entry.sha256),
            });
        }
        Ok(bytes)
    }

    /// Re-verifies every entry on disk.
    pub fn verify(&self, root: &Path) -> Result<()> {
        self.entries
            .iter()
            .try_for_each(|e| self.read_verified(root, e).map(|_| ()))
    }
}
