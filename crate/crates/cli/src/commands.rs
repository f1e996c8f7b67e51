use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use iiif_core::conformance::{load_matrix, support_report, Registry, ViewerMatrix};
use iiif_core::ingest::{run_ingest, IngestConfig, IngestError};
use iiif_core::presentation::{Document, Manifest, Violation};
use iiif_core::request::ServiceRoot;
use iiif_server::ServerConfig;
use serde::Serialize;
use serde_json::json;

use crate::Failure;

fn emit(line: impl std::fmt::Display) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn load_config(path: &Path) -> Result<ServerConfig, Failure> {
    ServerConfig::load(path).map_err(|e| Failure::usage("ConfigError", e.to_string()))
}

pub async fn serve(path: &Path, json: bool) -> Result<u8, Failure> {
    let mut config = load_config(path)?;
    config.validate().map_err(|e| Failure::usage("ConfigError", e.to_string()))?;
    let (listener, addr) = iiif_server::bind(&config)
        .await
        .map_err(|e| Failure::runtime("BindError", format!("{}: {e}", config.listen)))?;
    if config.public_base.is_none() {
        config.public_base = Some(format!("http://{addr}"));
    }
    let base = config.public_base();
    if json {
        emit(json!({ "event": "listening", "address": addr.to_string(), "public_base": base }));
    } else {
        emit(format_args!("listening on {addr} ({base})"));
    }
    iiif_server::serve(listener, config, shutdown_signal())
        .await
        .map_err(|e| Failure::runtime("ServeError", e.to_string()))?;
    if json {
        emit(json!({ "event": "stopped" }));
    } else {
        eprintln!("stopped");
    }
    Ok(0)
}

async fn shutdown_signal() {
    let interrupt = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        match signal(SignalKind::terminate()) {
            Ok(mut term) => {
                tokio::select! {
                    _ = interrupt => {}
                    _ = term.recv() => {}
                }
            }
            Err(_) => interrupt.await,
        }
    }
    #[cfg(not(unix))]
    interrupt.await;
}

#[derive(Debug, clap::Args)]
pub struct IngestArgs {
    /// First page of the repository items API.
    #[arg(long)]
    repo: String,
    /// Tab-separated annotation rows.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Output directory; the config's presentation_root when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Collection slug applied to every record.
    #[arg(long)]
    slug: Option<String>,
    /// Server configuration supplying public_base, the image service root and the activity log.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Image service root, e.g. https://example.org/iiif.
    #[arg(long)]
    image_api: Option<String>,
    #[arg(long)]
    public_base: Option<String>,
    #[arg(long, default_value_t = 8)]
    concurrency: usize,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

fn ingest_config(args: IngestArgs) -> Result<IngestConfig, Failure> {
    let server = args.config.as_deref().map(load_config).transpose()?;
    let public_base = match (&args.public_base, &server) {
        (Some(b), _) => b.trim_end_matches('/').to_string(),
        (None, Some(s)) if s.public_base.is_some() => s.public_base(),
        _ => return Err(Failure::usage("UsageError", "--public-base or a config with public_base is required")),
    };
    let image_api: ServiceRoot = match (&args.image_api, &server) {
        (Some(u), _) => u.parse().map_err(|e| Failure::usage("UsageError", format!("--image-api {u}: {e}")))?,
        (None, Some(s)) => s.image_service_root().map_err(|e| Failure::usage("ConfigError", e.to_string()))?,
        (None, None) => {
            let u = format!("{public_base}/iiif");
            u.parse().map_err(|e| Failure::usage("UsageError", format!("--public-base: {e}")))?
        }
    };
    let out = match (args.out, &server) {
        (Some(o), _) => o,
        (None, Some(s)) => s.presentation_root.clone(),
        (None, None) => return Err(Failure::usage("UsageError", "--out or --config is required")),
    };
    if args.concurrency == 0 {
        return Err(Failure::usage("UsageError", "--concurrency must be positive"));
    }
    let mut cfg = IngestConfig::new(args.repo, out, image_api, &public_base);
    cfg.annotations = args.annotations;
    cfg.fetch.slug_override = args.slug;
    cfg.concurrency = args.concurrency;
    cfg.timeout = Duration::from_secs(args.timeout);
    cfg.activity_log = server.and_then(|s| s.activity_log);
    Ok(cfg)
}

fn ingest_kind(e: &IngestError) -> &'static str {
    match e {
        IngestError::Fetch(_) => "FetchError",
        IngestError::Store(_) => "StoreError",
        IngestError::Enrich(_) => "EnrichError",
        IngestError::Build { .. } => "BuildError",
        IngestError::SlugMismatch { .. } => "SlugMismatch",
        IngestError::Io { .. } => "IoError",
        IngestError::Activity(_) => "ActivityError",
        IngestError::Client(_) => "ClientError",
    }
}

pub async fn ingest(args: IngestArgs, json: bool) -> Result<u8, Failure> {
    let cfg = ingest_config(args)?;
    let summary = run_ingest(&cfg).await.map_err(|e| Failure::runtime(ingest_kind(&e), e.to_string()))?;
    if json {
        let mut v = serde_json::to_value(&summary).expect("summary serializes");
        v["summary"] = summary.line().into();
        emit(v);
    } else {
        for w in &summary.warnings {
            eprintln!("warning: {w}");
        }
        emit(summary.line());
    }
    Ok(0)
}

#[derive(Serialize)]
struct FileResult {
    file: String,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    kind: Option<&'static str>,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    violations: Vec<Violation>,
}

fn read_document(path: &Path) -> Result<Document, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    Document::from_json(&text).map_err(|e| e.to_string())
}

pub fn validate(files: &[PathBuf], json: bool) -> Result<u8, Failure> {
    let results: Vec<FileResult> = files
        .iter()
        .map(|path| {
            let file = path.display().to_string();
            match read_document(path) {
                Ok(doc) => {
                    let violations = doc.validate();
                    let kind = match doc {
                        Document::Manifest(_) => "Manifest",
                        Document::Collection(_) => "Collection",
                    };
                    FileResult { file, kind: Some(kind), valid: violations.is_empty(), error: None, violations }
                }
                Err(e) => FileResult { file, kind: None, valid: false, error: Some(e), violations: Vec::new() },
            }
        })
        .collect();
    let all_valid = results.iter().all(|r| r.valid);
    if json {
        emit(json!({ "valid": all_valid, "files": results }));
    } else {
        for r in &results {
            match (&r.error, r.violations.is_empty()) {
                (Some(e), _) => emit(format_args!("{}: unreadable: {e}", r.file)),
                (None, true) => emit(format_args!("{}: ok", r.file)),
                (None, false) => {
                    for v in &r.violations {
                        emit(format_args!("{}: {v}", r.file));
                    }
                }
            }
        }
    }
    Ok(if all_valid { 0 } else { 1 })
}

fn read_manifest(path: &Path) -> Result<Manifest, Failure> {
    let bad = |e: String| Failure::runtime("ModelError", format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    Manifest::from_json(&text).map_err(|e| bad(e.to_string()))
}

pub fn report(matrix: Option<&Path>, all_patterns: bool, files: &[PathBuf], json: bool) -> Result<u8, Failure> {
    if files.is_empty() && !all_patterns {
        return Err(Failure::usage("UsageError", "give manifest files or --all-patterns"));
    }
    let matrix = match matrix {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::runtime("MatrixError", format!("{}: {e}", p.display())))?;
            load_matrix(&text).map_err(|e| Failure::runtime("MatrixError", format!("{}: {e}", p.display())))?
        }
        None => ViewerMatrix::builtin(),
    };
    for w in &matrix.warnings {
        eprintln!("warning: {w}");
    }
    let registry = Registry::builtin();
    let mut per_file = Vec::new();
    let mut patterns: BTreeSet<String> = BTreeSet::new();
    for path in files {
        let found = registry.detect(&read_manifest(path)?);
        patterns.extend(found.iter().cloned());
        per_file.push((path.display().to_string(), found));
    }
    if all_patterns {
        patterns.extend(registry.patterns().iter().map(|p| p.id.clone()));
    }
    let report = support_report(patterns.iter().map(String::as_str), &matrix)
        .map_err(|e| Failure::runtime("ReportError", e.to_string()))?;
    if json {
        let manifests: Vec<_> = per_file.iter().map(|(f, p)| json!({ "file": f, "patterns": p })).collect();
        emit(json!({ "manifests": manifests, "report": report }));
    } else {
        for (f, p) in &per_file {
            emit(format_args!("{f}: {}", p.iter().cloned().collect::<Vec<_>>().join(", ")));
        }
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(report.to_text().as_bytes());
        let _ = out.flush();
    }
    Ok(0)
}
