//! Fitted universal constants, persisted to a versioned JSON file.
//!
//! The analytic envelopes assert the existence of universal constants
//! without giving values. A fit pass computes extremal normalized ratios
//! per inequality family over a canonical grid, inflates them by a safety
//! factor, and freezes the result here; all envelope evaluations and tests
//! load the frozen values and never recompute them.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Safety inflation applied to fitted extremal ratios.
pub const FIT_INFLATION: f64 = 1.25;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedConstants {
    pub family: String,
    pub c_fit: f64,
    #[serde(rename = "C_fit")]
    pub c_cap: f64,
    pub grid_descriptor: String,
    pub timestamp: u64,
    pub frozen: bool,
}

impl FittedConstants {
    pub fn new(family: &str, c_fit: f64, c_cap: f64, grid_descriptor: String) -> Result<Self> {
        if !(c_fit > 0.0 && c_fit <= c_cap) {
            return Err(Error::InvalidParams(format!(
                "fitted constants must satisfy 0 < c <= C, got c={c_fit}, C={c_cap} for {family}"
            )));
        }
        Ok(Self {
            family: family.to_string(),
            c_fit,
            c_cap,
            grid_descriptor,
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            frozen: false,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
struct ConstantsFile {
    version: u32,
    families: BTreeMap<String, FittedConstants>,
}

/// In-memory constants table, read once at startup.
#[derive(Debug, Clone, Default)]
pub struct ConstantsStore {
    families: BTreeMap<String, FittedConstants>,
    allow_unfrozen: bool,
}

impl ConstantsStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Permit lookups of not-yet-frozen constants (the `--fit-first` path).
    pub fn allow_unfrozen(mut self) -> Self {
        self.allow_unfrozen = true;
        self
    }

    /// Path resolution: `LORENTZ_SHARP_CONSTANTS` override, else the
    /// versioned file shipped with this crate.
    pub fn default_path() -> PathBuf {
        if let Ok(p) = std::env::var("LORENTZ_SHARP_CONSTANTS") {
            return PathBuf::from(p);
        }
        PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fitted_constants.json"))
    }

    pub fn load_default() -> Result<Self> {
        Self::load(&Self::default_path())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ConstantsIo {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let file: ConstantsFile = serde_json::from_str(&text).map_err(|e| Error::ConstantsIo {
            path: path.display().to_string(),
            detail: format!("parse error: {e}"),
        })?;
        for (name, fc) in &file.families {
            if !(fc.c_fit > 0.0 && fc.c_fit <= fc.c_cap) {
                return Err(Error::ConstantsIo {
                    path: path.display().to_string(),
                    detail: format!("family {name} violates 0 < c <= C"),
                });
            }
        }
        Ok(Self { families: file.families, allow_unfrozen: false })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let file = ConstantsFile { version: 1, families: self.families.clone() };
        let text = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn get(&self, family: &str) -> Result<&FittedConstants> {
        let fc = self
            .families
            .get(family)
            .ok_or_else(|| Error::ConstantsNotFrozen(family.to_string()))?;
        if !fc.frozen && !self.allow_unfrozen {
            return Err(Error::ConstantsNotFrozen(family.to_string()));
        }
        Ok(fc)
    }

    pub fn insert(&mut self, fc: FittedConstants) {
        self.families.insert(fc.family.clone(), fc);
    }

    pub fn peek(&self, family: &str) -> Option<&FittedConstants> {
        self.families.get(family)
    }

    pub fn freeze_all(&mut self) {
        for fc in self.families.values_mut() {
            fc.frozen = true;
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.families.keys().map(|s| s.as_str())
    }
}
