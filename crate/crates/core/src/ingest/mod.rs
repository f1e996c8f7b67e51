//! Repository records, annotation rows and image dimensions to persisted
//! manifests, collections and activity entries.

mod assemble;
mod enrich;
mod persist;
mod repo;
mod store;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use indexmap::IndexMap;
use serde::Serialize;

pub use assemble::{assemble, assemble_collection, AssembleConfig};
pub use enrich::{
    enrich_dimensions, fetch_dimensions, CachedInfo, Dimensions, EnrichError, EnrichedImage, EnrichedRecord, InfoCache,
};
pub use persist::{collection_path, manifest_path, write_atomic, write_if_changed, WriteOutcome};
pub use repo::{fetch_records, map_page, next_link, FetchError, FetchOptions, FieldMapping, SourceRecord};
pub use store::{load_annotations, parse_annotations, AnnotationIndex, AnnotationRecord, BBox, StoreError};

use crate::builder::BuildError;
use crate::discovery::{ActivityError, ActivityLog, ActivityType};
use crate::presentation::{Agent, SeeAlsoRef};
use crate::request::ServiceRoot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WarningCode {
    AnnotationOutOfBounds,
    OrphanAnnotation,
    DuplicateRecord,
    PageLimitReached,
}

/// Something dropped or skipped, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub code: WarningCode,
    pub subject: String,
    pub detail: String,
}

impl Warning {
    pub fn new(code: WarningCode, subject: impl Into<String>, detail: impl Into<String>) -> Self {
        Warning { code, subject: subject.into(), detail: detail.into() }
    }
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} {}: {}", self.code, self.subject, self.detail)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("annotation store: {0}")]
    Store(#[from] StoreError),
    #[error(transparent)]
    Enrich(#[from] EnrichError),
    #[error("record {record_id}: {source}")]
    Build { record_id: String, source: BuildError },
    #[error("record {record_id} belongs to {found}, not {expected}")]
    SlugMismatch { expected: String, found: String, record_id: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Activity(#[from] ActivityError),
    #[error("http client: {0}")]
    Client(String),
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// First page of the repository items API.
    pub repo: String,
    pub annotations: Option<PathBuf>,
    pub out: PathBuf,
    pub fetch: FetchOptions,
    pub image_api: ServiceRoot,
    /// Public origin of this deployment; ids live under
    /// `{public_base}/presentation` and `{public_base}/discovery`.
    pub public_base: String,
    pub providers: Vec<Agent>,
    pub see_also: Vec<SeeAlsoRef>,
    pub concurrency: usize,
    pub timeout: Duration,
    /// Defaults to `{out}/activity.jsonl`.
    pub activity_log: Option<PathBuf>,
    /// Defaults to `{out}/.info-cache.json`.
    pub cache_file: Option<PathBuf>,
}

impl IngestConfig {
    pub fn new(repo: impl Into<String>, out: impl Into<PathBuf>, image_api: ServiceRoot, public_base: &str) -> Self {
        IngestConfig {
            repo: repo.into(),
            annotations: None,
            out: out.into(),
            fetch: FetchOptions::default(),
            image_api,
            public_base: public_base.trim_end_matches('/').to_string(),
            providers: Vec::new(),
            see_also: Vec::new(),
            concurrency: 8,
            timeout: Duration::from_secs(30),
            activity_log: None,
            cache_file: None,
        }
    }

    pub fn activity_log_path(&self) -> PathBuf {
        self.activity_log.clone().unwrap_or_else(|| self.out.join("activity.jsonl"))
    }

    fn cache_path(&self) -> PathBuf {
        self.cache_file.clone().unwrap_or_else(|| self.out.join(".info-cache.json"))
    }

    pub fn assemble_config(&self) -> AssembleConfig {
        AssembleConfig {
            providers: self.providers.clone(),
            see_also: self.see_also.clone(),
            ..AssembleConfig::new(format!("{}/presentation", self.public_base))
        }
    }
}

/// Id prefix for activity entries.
pub fn activity_id_base(public_base: &str) -> String {
    format!("{}/discovery/activity", public_base.trim_end_matches('/'))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestSummary {
    pub records: usize,
    pub manifests: usize,
    pub collections: usize,
    pub created: usize,
    pub updated: usize,
    pub unchanged: usize,
    pub warnings: Vec<Warning>,
}

impl IngestSummary {
    pub fn line(&self) -> String {
        format!("{} records, {} manifests, {} warnings", self.records, self.manifests, self.warnings.len())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io { path: path.to_path_buf(), source }
}

/// Runs the whole workflow and persists its outputs under `cfg.out`.
pub async fn run_ingest(cfg: &IngestConfig) -> Result<IngestSummary, IngestError> {
    let client = reqwest::Client::builder()
        .timeout(cfg.timeout)
        .build()
        .map_err(|e| IngestError::Client(e.to_string()))?;
    let mut warnings = Vec::new();

    let fetched = fetch_records(&client, &cfg.repo, &cfg.fetch, &mut warnings).await?;
    let fetched_count = fetched.len();
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(fetched.len());
    for r in fetched {
        if seen.insert((r.collection_slug.clone(), r.record_id.clone())) {
            records.push(r);
        } else {
            warnings.push(Warning::new(WarningCode::DuplicateRecord, &r.record_id, "repeated record id skipped"));
        }
    }

    let annotations = match &cfg.annotations {
        Some(path) => load_annotations(path)?,
        None => AnnotationIndex::new(),
    };
    let referenced: HashSet<&str> = records.iter().flat_map(|r| r.image_ids.iter().map(String::as_str)).collect();
    for (image_id, rows) in &annotations {
        if !referenced.contains(image_id.as_str()) {
            for a in rows {
                warnings.push(Warning::new(
                    WarningCode::OrphanAnnotation,
                    image_id,
                    format!("{} {:?} by {} matches no record", a.bbox.xywh(), a.label, a.annotator),
                ));
            }
        }
    }

    let cache_path = cfg.cache_path();
    let cache = InfoCache::load(&cache_path).map_err(io_err(&cache_path))?;
    let enriched =
        enrich_dimensions(&client, records, &cfg.image_api, &annotations, &cache, cfg.concurrency, &mut warnings)
            .await?;
    cache.save(&cache_path).map_err(io_err(&cache_path))?;

    let acfg = cfg.assemble_config();
    let mut by_slug: IndexMap<&str, Vec<usize>> = IndexMap::new();
    let mut manifests = Vec::with_capacity(enriched.len());
    for (i, rec) in enriched.iter().enumerate() {
        let m = assemble(rec, &acfg)
            .map_err(|source| IngestError::Build { record_id: rec.record.record_id.clone(), source })?;
        manifests.push(m);
        by_slug.entry(rec.record.collection_slug.as_str()).or_default().push(i);
    }

    let log_path = cfg.activity_log_path();
    let log = ActivityLog::open(&log_path, activity_id_base(&cfg.public_base))?;
    let mut summary = IngestSummary { records: fetched_count, ..Default::default() };
    for (rec, m) in enriched.iter().zip(&manifests) {
        let path = manifest_path(&cfg.out, &rec.record.collection_slug, &rec.record.record_id);
        let outcome = write_if_changed(&path, m.to_json().as_bytes()).map_err(io_err(&path))?;
        match outcome {
            WriteOutcome::Created => {
                log.append(ActivityType::Create, &m.id, "Manifest")?;
                summary.created += 1;
            }
            WriteOutcome::Updated => {
                log.append(ActivityType::Update, &m.id, "Manifest")?;
                summary.updated += 1;
            }
            WriteOutcome::Unchanged => summary.unchanged += 1,
        }
        summary.manifests += 1;
    }
    for (slug, idx) in &by_slug {
        let members: Vec<EnrichedRecord> = idx.iter().map(|&i| enriched[i].clone()).collect();
        let collection = assemble_collection(&members, slug, &acfg)?;
        let path = collection_path(&cfg.out, slug);
        write_if_changed(&path, collection.to_json().as_bytes()).map_err(io_err(&path))?;
        summary.collections += 1;
    }
    log.sync()?;
    summary.warnings = warnings;
    Ok(summary)
}
