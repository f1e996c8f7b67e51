//! Image dimensions from the image service, cached by image id and ETag.

use std::collections::HashMap;
use std::path::Path;

use futures::stream::{self, StreamExt};
use parking_lot::RwLock;
use reqwest::header::{ETAG, IF_NONE_MATCH};
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};

use super::repo::SourceRecord;
use super::store::{AnnotationIndex, AnnotationRecord};
use super::{Warning, WarningCode};
use crate::request::{BaseUri, ServiceRoot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedInfo {
    pub etag: Option<String>,
    pub dimensions: Dimensions,
}

/// Shared cache of image dimensions. Concurrent writers race and the last
/// one wins.
#[derive(Debug, Default)]
pub struct InfoCache {
    entries: RwLock<HashMap<String, CachedInfo>>,
}

impl InfoCache {
    pub fn new() -> Self {
        InfoCache::default()
    }

    pub fn get(&self, image_id: &str) -> Option<CachedInfo> {
        self.entries.read().get(image_id).cloned()
    }

    pub fn insert(&self, image_id: &str, info: CachedInfo) {
        self.entries.write().insert(image_id.to_string(), info);
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loads a cache saved by [`InfoCache::save`]; a missing file is empty.
    pub fn load(path: &Path) -> std::io::Result<Self> {
        match std::fs::read(path) {
            Ok(bytes) => {
                let entries: HashMap<String, CachedInfo> = serde_json::from_slice(&bytes)
                    .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
                Ok(InfoCache { entries: RwLock::new(entries) })
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(InfoCache::new()),
            Err(e) => Err(e),
        }
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let sorted: std::collections::BTreeMap<_, _> = self.entries.read().clone().into_iter().collect();
        let bytes = serde_json::to_vec_pretty(&sorted).expect("cache serializes");
        super::persist::write_atomic(path, &bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnrichError {
    #[error("info.json for {image_id}: {detail}")]
    InfoFetchError { image_id: String, detail: String },
    #[error("info.json for {image_id} unusable: {detail}")]
    InfoParseError { image_id: String, detail: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnrichedImage {
    pub image_id: String,
    pub dimensions: Dimensions,
    pub service: BaseUri,
    /// Annotations that fit inside the image.
    pub annotations: Vec<AnnotationRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnrichedRecord {
    pub record: SourceRecord,
    pub images: Vec<EnrichedImage>,
}

fn parse_info(image_id: &str, bytes: &[u8]) -> Result<Dimensions, EnrichError> {
    let perr = |detail: String| EnrichError::InfoParseError { image_id: image_id.to_string(), detail };
    let v: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| perr(e.to_string()))?;
    let dim = |key: &str| {
        v.get(key)
            .and_then(|n| n.as_u64())
            .and_then(|n| u32::try_from(n).ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| perr(format!("missing or invalid {key}")))
    };
    Ok(Dimensions { width: dim("width")?, height: dim("height")? })
}

/// Dimensions of one image. A cached entry with an ETag is revalidated with
/// `If-None-Match`; one without is reused as is.
pub async fn fetch_dimensions(
    client: &reqwest::Client,
    base: &BaseUri,
    cache: &InfoCache,
) -> Result<Dimensions, EnrichError> {
    let image_id = base.identifier();
    let cached = cache.get(image_id);
    let mut req = client.get(base.info_url());
    match &cached {
        Some(CachedInfo { etag: None, dimensions }) => return Ok(*dimensions),
        Some(CachedInfo { etag: Some(tag), .. }) => req = req.header(IF_NONE_MATCH, tag.as_str()),
        None => {}
    }
    let ferr = |detail: String| EnrichError::InfoFetchError { image_id: image_id.to_string(), detail };
    let resp = req.send().await.map_err(|e| ferr(e.to_string()))?;
    if resp.status() == StatusCode::NOT_MODIFIED {
        if let Some(c) = cached {
            return Ok(c.dimensions);
        }
    }
    if !resp.status().is_success() {
        return Err(ferr(format!("HTTP {}", resp.status().as_u16())));
    }
    let etag = resp.headers().get(ETAG).and_then(|v| v.to_str().ok()).map(str::to_string);
    let bytes = resp.bytes().await.map_err(|e| ferr(e.to_string()))?;
    let dimensions = parse_info(image_id, &bytes)?;
    cache.insert(image_id, CachedInfo { etag, dimensions });
    Ok(dimensions)
}

/// Looks up every image of every record, at most `concurrency` requests at
/// a time, and attaches the annotations that fit. Results keep input order;
/// the first failing image in input order is reported.
pub async fn enrich_dimensions(
    client: &reqwest::Client,
    records: Vec<SourceRecord>,
    image_api: &ServiceRoot,
    annotations: &AnnotationIndex,
    cache: &InfoCache,
    concurrency: usize,
    warnings: &mut Vec<Warning>,
) -> Result<Vec<EnrichedRecord>, EnrichError> {
    let mut unique: Vec<&str> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for id in records.iter().flat_map(|r| &r.image_ids) {
        if seen.insert(id.as_str()) {
            unique.push(id);
        }
    }
    let results: Vec<(String, Result<Dimensions, EnrichError>)> = stream::iter(unique)
        .map(|id| async move {
            let base = image_api.base_for(id);
            (id.to_string(), fetch_dimensions(client, &base, cache).await)
        })
        .buffered(concurrency.max(1))
        .collect()
        .await;
    let mut dims = HashMap::new();
    for (id, r) in results {
        dims.insert(id, r?);
    }
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let images = record
            .image_ids
            .iter()
            .map(|id| {
                let d = dims[id.as_str()];
                let mut kept = Vec::new();
                for a in annotations.get(id).into_iter().flatten() {
                    if a.bbox.fits(d.width, d.height) {
                        kept.push(a.clone());
                    } else {
                        warnings.push(Warning::new(
                            WarningCode::AnnotationOutOfBounds,
                            id,
                            format!(
                                "{} {:?} by {} exceeds {}x{}",
                                a.bbox.xywh(),
                                a.label,
                                a.annotator,
                                d.width,
                                d.height
                            ),
                        ));
                    }
                }
                EnrichedImage { image_id: id.clone(), dimensions: d, service: image_api.base_for(id), annotations: kept }
            })
            .collect();
        out.push(EnrichedRecord { record, images });
    }
    Ok(out)
}
