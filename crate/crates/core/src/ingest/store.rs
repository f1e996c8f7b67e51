//! The annotation store: one JSON object per line with `image_id`, `x`,
//! `y`, `w`, `h`, `label`, `confidence` and `annotator`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BBox {
    pub fn fits(&self, width: u32, height: u32) -> bool {
        u64::from(self.x) + u64::from(self.w) <= u64::from(width)
            && u64::from(self.y) + u64::from(self.h) <= u64::from(height)
    }

    /// Media fragment selecting this box.
    pub fn xywh(&self) -> String {
        format!("xywh={},{},{},{}", self.x, self.y, self.w, self.h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub bbox: BBox,
    pub label: String,
    pub confidence: f64,
    pub annotator: String,
}

#[derive(Deserialize)]
struct Row {
    image_id: String,
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    label: String,
    confidence: f64,
    annotator: String,
}

/// Annotations grouped by image id, each group ordered by confidence
/// (highest first) and then label.
pub type AnnotationIndex = BTreeMap<String, Vec<AnnotationRecord>>;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {detail}")]
    MalformedRow { line: usize, detail: String },
    #[error("line {line}: confidence {value} is outside [0, 1]")]
    ConfidenceOutOfRange { line: usize, value: f64 },
}

pub fn parse_annotations(text: &str) -> Result<AnnotationIndex, StoreError> {
    let mut index = AnnotationIndex::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let row: Row =
            serde_json::from_str(raw).map_err(|e| StoreError::MalformedRow { line, detail: e.to_string() })?;
        if !(0.0..=1.0).contains(&row.confidence) {
            return Err(StoreError::ConfidenceOutOfRange { line, value: row.confidence });
        }
        if row.w == 0 || row.h == 0 {
            return Err(StoreError::MalformedRow { line, detail: "empty bounding box".into() });
        }
        if row.image_id.is_empty() || row.annotator.is_empty() {
            return Err(StoreError::MalformedRow { line, detail: "image_id and annotator are required".into() });
        }
        index.entry(row.image_id.clone()).or_default().push(AnnotationRecord {
            image_id: row.image_id,
            bbox: BBox { x: row.x, y: row.y, w: row.w, h: row.h },
            label: row.label,
            confidence: row.confidence,
            annotator: row.annotator,
        });
    }
    for group in index.values_mut() {
        group.sort_by(|a, b| b.confidence.total_cmp(&a.confidence).then_with(|| a.label.cmp(&b.label)));
    }
    Ok(index)
}

pub fn load_annotations(path: &Path) -> Result<AnnotationIndex, StoreError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| StoreError::Io { path: path.to_path_buf(), source })?;
    parse_annotations(&text)
}
