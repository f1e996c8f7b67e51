use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::UNIX_EPOCH;

use axum::body::Body;
use axum::extract::State;
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use iiif_core::discovery::{ordered_collection, ordered_collection_page, read_log};
use iiif_core::ingest::{collection_path, manifest_path};
use iiif_core::pipeline::{execute, info_for_dimensions, ImageCache, SourceImage};
use iiif_core::presentation::PRESENTATION_MEDIA_TYPE;
use iiif_core::request::{canonical_form, decode_segment, parse_image_request, ServiceRoot};

use crate::config::ServerConfig;
use crate::error::ApiError;

pub const IMAGE_INFO_MEDIA_TYPE: &str = "application/ld+json;profile=\"http://iiif.io/api/image/3/context.json\"";
pub const ACTIVITY_MEDIA_TYPE: &str = "application/ld+json;profile=\"https://www.w3.org/ns/activitystreams\"";
const SOURCE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "tif", "tiff"];

pub struct App {
    pub config: ServerConfig,
    pub image_root: ServiceRoot,
    pub cache: ImageCache,
}

type Shared = Arc<App>;

fn json_response(content_type: &'static str, body: impl Into<Body>) -> Response {
    let mut resp = Response::new(body.into());
    resp.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static(content_type));
    resp
}

fn with_cors(mut resp: Response) -> Response {
    let h = resp.headers_mut();
    h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    h.insert(header::ACCESS_CONTROL_EXPOSE_HEADERS, HeaderValue::from_static("Link, ETag"));
    resp
}

/// Handles every request. Paths are matched exactly; an empty segment
/// anywhere (including a trailing slash) is a 404.
pub async fn dispatch(State(app): State<Shared>, method: Method, uri: Uri, headers: HeaderMap) -> Response {
    let path = uri.path();
    let resp = match method {
        Method::GET | Method::HEAD => route(&app, path, &headers).await.unwrap_or_else(IntoResponse::into_response),
        Method::OPTIONS => {
            let mut r = StatusCode::NO_CONTENT.into_response();
            r.headers_mut().insert(header::ACCESS_CONTROL_ALLOW_METHODS, HeaderValue::from_static("GET, HEAD, OPTIONS"));
            r.headers_mut().insert(header::ACCESS_CONTROL_ALLOW_HEADERS, HeaderValue::from_static("*"));
            r
        }
        _ => {
            let mut r = ApiError::method_not_allowed(path).into_response();
            r.headers_mut().insert(header::ALLOW, HeaderValue::from_static("GET, HEAD, OPTIONS"));
            r
        }
    };
    let resp = with_cors(resp);
    if method == Method::HEAD {
        strip_body(resp).await
    } else {
        resp
    }
}

async fn strip_body(resp: Response) -> Response {
    let (mut parts, body) = resp.into_parts();
    let len = axum::body::to_bytes(body, usize::MAX).await.map(|b| b.len()).unwrap_or(0);
    parts.headers.insert(header::CONTENT_LENGTH, HeaderValue::from(len));
    Response::from_parts(parts, Body::empty())
}

async fn route(app: &Shared, path: &str, headers: &HeaderMap) -> Result<Response, ApiError> {
    let not_found = || ApiError::not_found(path);
    let rest = path.strip_prefix('/').ok_or_else(not_found)?;
    let segments: Vec<&str> = rest.split('/').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(not_found());
    }
    let prefix = app.config.image_prefix();
    let image_rest = if prefix.is_empty() {
        Some(rest)
    } else {
        rest.strip_prefix(prefix).and_then(|r| r.strip_prefix('/'))
    };
    match segments.as_slice() {
        ["presentation", slug, record, "manifest"] => {
            let (slug, record) = (safe_segment(slug).ok_or_else(not_found)?, safe_segment(record).ok_or_else(not_found)?);
            persisted(path, manifest_path(&app.config.presentation_root, &slug, &record)).await
        }
        ["presentation", slug, "collection"] => {
            let slug = safe_segment(slug).ok_or_else(not_found)?;
            persisted(path, collection_path(&app.config.presentation_root, &slug)).await
        }
        ["discovery", "changes"] => changes(app, path, None).await,
        ["discovery", "changes", "page", n] => {
            let n = n.parse::<usize>().ok().filter(|_| n.bytes().all(|b| b.is_ascii_digit())).ok_or_else(not_found)?;
            changes(app, path, Some(n)).await
        }
        _ => match image_rest {
            Some(rest) => image_route(app, path, rest, headers).await,
            None => Err(not_found()),
        },
    }
}

/// A decoded path segment usable as a single file-name component.
fn safe_segment(raw: &str) -> Option<String> {
    decode_segment(raw).filter(|s| !s.is_empty() && s != "." && s != "..")
}

async fn persisted(path: &str, file: PathBuf) -> Result<Response, ApiError> {
    match tokio::fs::read(&file).await {
        Ok(bytes) => Ok(json_response(PRESENTATION_MEDIA_TYPE, bytes)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(ApiError::not_found(path)),
        Err(e) => Err(ApiError::internal(path, e.to_string())),
    }
}

async fn changes(app: &Shared, path: &str, page: Option<usize>) -> Result<Response, ApiError> {
    let log = app.config.activity_log_path();
    let entries = tokio::task::spawn_blocking(move || read_log(&log))
        .await
        .map_err(|e| ApiError::internal(path, e.to_string()))?
        .map_err(|e| ApiError::internal(path, e.to_string()))?;
    let id = format!("{}/discovery/changes", app.config.public_base());
    let doc = match page {
        None => ordered_collection(&id, entries.len(), app.config.page_size),
        Some(n) => ordered_collection_page(&id, &entries, app.config.page_size, n).ok_or_else(|| ApiError::not_found(path))?,
    };
    let body = serde_json::to_vec_pretty(&doc).expect("documents serialize");
    Ok(json_response(ACTIVITY_MEDIA_TYPE, body))
}

/// File backing an identifier: `{image_root}/{identifier}.{ext}`.
fn locate(root: &Path, identifier: &str) -> Option<PathBuf> {
    if identifier.is_empty()
        || identifier.starts_with('.')
        || identifier.contains(['/', '\\', '\0'])
    {
        return None;
    }
    SOURCE_EXTENSIONS.iter().map(|ext| root.join(format!("{identifier}.{ext}"))).find(|p| p.is_file())
}

enum Loaded {
    Missing,
    Found { image: Arc<SourceImage>, etag: String },
}

async fn load(app: &Shared, path: &str, identifier: &str) -> Result<Loaded, ApiError> {
    let app = Arc::clone(app);
    let id = identifier.to_string();
    let result = tokio::task::spawn_blocking(move || -> Result<Loaded, String> {
        let Some(file) = locate(&app.config.image_root, &id) else { return Ok(Loaded::Missing) };
        let meta = std::fs::metadata(&file).map_err(|e| e.to_string())?;
        let mtime = meta.modified().ok().and_then(|t| t.duration_since(UNIX_EPOCH).ok()).map_or(0, |d| d.as_nanos());
        let etag = format!("\"{:x}-{:x}\"", meta.len(), mtime);
        let key = format!("{id}\0{etag}");
        let image = app.cache.get_or_load(&key, || {
            let bytes = std::fs::read(&file).map_err(|e| e.to_string())?;
            SourceImage::decode(&bytes).map_err(|e| e.to_string())
        })?;
        Ok(Loaded::Found { image, etag })
    })
    .await
    .map_err(|e| e.to_string())
    .and_then(|r| r);
    result.map_err(|detail| ApiError::internal(path, detail))
}

async fn image_route(app: &Shared, path: &str, rest: &str, headers: &HeaderMap) -> Result<Response, ApiError> {
    let segments: Vec<&str> = rest.split('/').collect();
    match segments.as_slice() {
        [id] => {
            let identifier = decode_segment(id).ok_or_else(|| ApiError::not_found(path))?;
            let Loaded::Found { .. } = load(app, path, &identifier).await? else {
                return Err(ApiError::not_found(path));
            };
            let target = format!("{}/info.json", app.image_root.base_for(&identifier));
            let mut r = StatusCode::SEE_OTHER.into_response();
            r.headers_mut().insert(header::LOCATION, HeaderValue::try_from(target).map_err(|e| ApiError::internal(path, e.to_string()))?);
            Ok(r)
        }
        [id, "info.json"] => info(app, path, id, headers).await,
        _ => image(app, path, rest).await,
    }
}

fn profile_link(app: &Shared) -> HeaderValue {
    let level = app.config.compliance.as_str();
    HeaderValue::try_from(format!("<http://iiif.io/api/image/3/{level}.json>;rel=\"profile\""))
        .expect("static link is a valid header")
}

async fn info(app: &Shared, path: &str, id: &str, headers: &HeaderMap) -> Result<Response, ApiError> {
    let identifier = decode_segment(id).ok_or_else(|| ApiError::not_found(path))?;
    let Loaded::Found { image, etag } = load(app, path, &identifier).await? else {
        return Err(ApiError::not_found(path));
    };
    let etag_value = HeaderValue::try_from(etag.as_str()).map_err(|e| ApiError::internal(path, e.to_string()))?;
    if headers.get(header::IF_NONE_MATCH).is_some_and(|v| v.as_bytes() == etag.as_bytes()) {
        let mut r = StatusCode::NOT_MODIFIED.into_response();
        r.headers_mut().insert(header::ETAG, etag_value);
        return Ok(r);
    }
    let cfg = &app.config;
    let doc = info_for_dimensions(
        image.width(),
        image.height(),
        &app.image_root.base_for(&identifier),
        &cfg.limits,
        cfg.tiles,
        cfg.compliance,
    );
    let mut r = json_response(IMAGE_INFO_MEDIA_TYPE, doc.to_json());
    r.headers_mut().insert(header::ETAG, etag_value);
    r.headers_mut().insert(header::LINK, profile_link(app));
    Ok(r)
}

async fn image(app: &Shared, path: &str, rest: &str) -> Result<Response, ApiError> {
    let req = parse_image_request(rest)?;
    let Loaded::Found { image, .. } = load(app, path, &req.identifier).await? else {
        return Err(ApiError::not_found(path));
    };
    let cfg = &app.config;
    let base = app.image_root.base_for(&req.identifier);
    let doc = info_for_dimensions(image.width(), image.height(), &base, &cfg.limits, cfg.tiles, cfg.compliance);
    let canonical = canonical_form(&req, &doc)?;
    let requested = format!("{}/{}", base, rest.split_once('/').map_or("", |(_, p)| p));
    let limits = cfg.limits;
    let encoded = {
        let req = req.clone();
        tokio::task::spawn_blocking(move || execute(&req, &image, &limits))
            .await
            .map_err(|e| ApiError::internal(path, e.to_string()))?
            .map_err(|e| ApiError::from_pipeline(e, path))?
    };
    let mut r = Response::new(Body::from(encoded.bytes));
    let h = r.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static(encoded.format.media_type()));
    h.append(header::LINK, profile_link(app));
    if canonical != requested {
        let link = HeaderValue::try_from(format!("<{canonical}>;rel=\"canonical\""))
            .map_err(|e| ApiError::internal(path, e.to_string()))?;
        h.append(header::LINK, link);
    }
    Ok(r)
}
