//! Service configuration shared by the request resolver, the pipeline and the
//! HTTP front end.

use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_WIDTH: u32 = 10_000;
pub const DEFAULT_MAX_AREA: u64 = 100_000_000;
pub const DEFAULT_TILE_SIZE: u32 = 512;

/// Upper bounds on derivative images a server will produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerLimits {
    pub max_width: u32,
    /// Defaults to `max_width` when absent.
    pub max_height: Option<u32>,
    pub max_area: u64,
}

impl Default for ServerLimits {
    fn default() -> Self {
        ServerLimits { max_width: DEFAULT_MAX_WIDTH, max_height: None, max_area: DEFAULT_MAX_AREA }
    }
}

impl ServerLimits {
    pub fn unlimited() -> Self {
        ServerLimits { max_width: u32::MAX, max_height: Some(u32::MAX), max_area: u64::MAX }
    }

    pub fn effective_max_height(&self) -> u32 {
        self.max_height.unwrap_or(self.max_width)
    }

    pub fn permits(&self, w: u32, h: u32) -> bool {
        w <= self.max_width
            && h <= self.effective_max_height()
            && u64::from(w) * u64::from(h) <= self.max_area
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_width == 0 || self.max_area == 0 || self.max_height == Some(0) {
            return Err("limits must be positive".into());
        }
        Ok(())
    }
}

/// Tile pyramid layout advertised in image information documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TileConfig {
    pub width: u32,
    pub height: u32,
}

impl Default for TileConfig {
    fn default() -> Self {
        TileConfig { width: DEFAULT_TILE_SIZE, height: DEFAULT_TILE_SIZE }
    }
}

impl TileConfig {
    pub fn square(side: u32) -> Self {
        TileConfig { width: side, height: side }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.width == 0 || self.height == 0 {
            return Err("tile dimensions must be positive".into());
        }
        Ok(())
    }
}

/// Image API compliance level advertised as the `profile`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplianceLevel {
    Level0,
    Level1,
    #[default]
    Level2,
}

impl ComplianceLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ComplianceLevel::Level0 => "level0",
            ComplianceLevel::Level1 => "level1",
            ComplianceLevel::Level2 => "level2",
        }
    }
}
