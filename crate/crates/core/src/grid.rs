//! Parameter grids for verification runs.

use crate::params::Params;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub label: String,
    pub n: usize,
    pub r: f64,
    pub p: f64,
    pub t: f64,
}

impl GridPoint {
    pub fn params(&self) -> Result<Params> {
        Params::new(self.n, self.r, self.p, self.t)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    #[serde(default)]
    pub version: u32,
    #[serde(default)]
    pub description: String,
    pub points: Vec<GridPoint>,
}

/// The canonical grid shipped with the crate: samples of every region of
/// the `(r, p)` quarter-plane at `n` in `{1e2, 1e3, 1e4}` and `t` in
/// `{1, 2, 3}`.
pub fn canonical() -> Vec<GridPoint> {
    let file: GridFile = serde_json::from_str(include_str!("../data/canonical_grid.json"))
        .expect("embedded canonical grid is valid");
    file.points
}

pub fn load(path: &Path) -> Result<Vec<GridPoint>> {
    let text = std::fs::read_to_string(path)?;
    let file: GridFile = serde_json::from_str(&text)?;
    if file.points.is_empty() {
        return Err(Error::InvalidParams("grid file has no points".into()));
    }
    Ok(file.points)
}
