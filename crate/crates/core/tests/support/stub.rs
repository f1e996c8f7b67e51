//! A local repository API and image service for workflow tests.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::{json, Value};

#[derive(Default)]
pub struct StubState {
    pub pages: RwLock<Vec<Vec<Value>>>,
    pub images: RwLock<HashMap<String, (u32, u32)>>,
    pub info_requests: AtomicUsize,
    pub not_modified: AtomicUsize,
}

pub struct Stub {
    pub origin: String,
    pub state: Arc<StubState>,
}

impl Stub {
    pub fn items_url(&self) -> String {
        format!("{}/api/items", self.origin)
    }

    /// `host:port` of the stub, for building a service root.
    pub fn authority(&self) -> &str {
        self.origin.trim_start_matches("http://")
    }

    pub fn info_requests(&self) -> usize {
        self.state.info_requests.load(Ordering::SeqCst)
    }

    pub fn not_modified(&self) -> usize {
        self.state.not_modified.load(Ordering::SeqCst)
    }
}

async fn items(State(s): State<Arc<StubState>>, Query(q): Query<HashMap<String, String>>) -> Response {
    let page: usize = q.get("page").and_then(|p| p.parse().ok()).unwrap_or(1);
    let pages = s.pages.read().unwrap();
    let Some(body) = pages.get(page.wrapping_sub(1)) else {
        return (StatusCode::OK, Json(json!([]))).into_response();
    };
    let mut resp = Json(Value::Array(body.clone())).into_response();
    if page < pages.len() {
        let link = format!("</api/items?page={}>; rel=\"next\"", page + 1);
        resp.headers_mut().insert(header::LINK, link.parse().unwrap());
    }
    resp
}

async fn info(State(s): State<Arc<StubState>>, Path(id): Path<String>, headers: HeaderMap) -> Response {
    s.info_requests.fetch_add(1, Ordering::SeqCst);
    let Some(&(w, h)) = s.images.read().unwrap().get(&id) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    let etag = format!("\"{id}-{w}x{h}\"");
    if headers.get(header::IF_NONE_MATCH).and_then(|v| v.to_str().ok()) == Some(etag.as_str()) {
        s.not_modified.fetch_add(1, Ordering::SeqCst);
        return StatusCode::NOT_MODIFIED.into_response();
    }
    let body = json!({
        "@context": "http://iiif.io/api/image/3/context.json",
        "id": format!("http://stub/iiif/{id}"),
        "type": "ImageService3",
        "protocol": "http://iiif.io/api/image",
        "profile": "level2",
        "width": w,
        "height": h,
    });
    ([(header::ETAG, etag)], Json(body)).into_response()
}

pub async fn spawn(pages: Vec<Vec<Value>>, images: &[(&str, u32, u32)]) -> Stub {
    let state = Arc::new(StubState::default());
    *state.pages.write().unwrap() = pages;
    *state.images.write().unwrap() = images.iter().map(|&(id, w, h)| (id.to_string(), (w, h))).collect();
    let app = Router::new()
        .route("/api/items", get(items))
        .route("/iiif/{id}/info.json", get(info))
        .with_state(state.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move {
        axum::serve(listener, app).await.unwrap();
    });
    Stub { origin: format!("http://{addr}"), state }
}

pub const SLUG: &str = "SGV_12";

pub fn item(id: u64, titles: &[(&str, &str)], images: &[&str]) -> Value {
    json!({
        "@id": format!("https://repo.example.org/api/items/{id}"),
        "o:id": id,
        "dcterms:title": titles.iter().map(|(lang, v)| json!({"type": "literal", "@language": lang, "@value": v})).collect::<Vec<_>>(),
        "dcterms:description": [{"type": "literal", "@language": "de", "@value": format!("Negativ {id}")}],
        "dcterms:rights": [{"type": "uri", "@id": "http://rightsstatements.org/vocab/InC/1.0/"}],
        "dcterms:isPartOf": [{"type": "literal", "@value": SLUG}],
        "o:media": images.iter().map(|i| json!({"o:id": 1, "o:source": i})).collect::<Vec<_>>(),
    })
}

/// Five records over two pages (3 + 2); record 101 is titled in four
/// languages and record 102 has three images.
pub fn fixture_pages() -> Vec<Vec<Value>> {
    vec![
        vec![
            item(
                101,
                &[("de", "Fasnacht in Basel"), ("fr", "Carnaval de Bâle"), ("it", "Carnevale di Basilea"), ("en", "Basel carnival")],
                &["SGV_12N_08589"],
            ),
            item(102, &[("de", "Album mit Alpenansichten")], &["SGV_12N_10001", "SGV_12N_10002", "SGV_12N_10003"]),
            item(103, &[("de", "Bauernhaus im Emmental")], &["SGV_12N_20001"]),
        ],
        vec![
            item(104, &[("de", "Alpaufzug")], &["SGV_12N_30001"]),
            item(105, &[("de", "Heuernte")], &["SGV_12N_40001"]),
        ],
    ]
}

pub const FIXTURE_IMAGES: [(&str, u32, u32); 7] = [
    ("SGV_12N_08589", 1000, 800),
    ("SGV_12N_10001", 1200, 900),
    ("SGV_12N_10002", 1200, 900),
    ("SGV_12N_10003", 900, 1200),
    ("SGV_12N_20001", 640, 480),
    ("SGV_12N_30001", 2000, 1500),
    ("SGV_12N_40001", 800, 800),
];

pub fn annotation_row(image: &str, (x, y, w, h): (u32, u32, u32, u32), label: &str, confidence: f64, annotator: &str) -> String {
    json!({
        "image_id": image, "x": x, "y": y, "w": w, "h": h,
        "label": label, "confidence": confidence, "annotator": annotator,
    })
    .to_string()
}

/// Six detections: two by one model and one by another on record 101, two
/// on the second page of record 102 and one on record 103.
pub fn fixture_annotations() -> String {
    [
        annotation_row("SGV_12N_08589", (100, 120, 200, 300), "person", 0.93, "vitrivr"),
        annotation_row("SGV_12N_08589", (420, 80, 150, 150), "mask", 0.71, "vitrivr"),
        annotation_row("SGV_12N_08589", (10, 10, 50, 40), "drum", 0.55, "yolo"),
        annotation_row("SGV_12N_10002", (0, 0, 300, 200), "mountain", 0.88, "vitrivr"),
        annotation_row("SGV_12N_10002", (600, 400, 100, 100), "cow", 0.62, "vitrivr"),
        annotation_row("SGV_12N_20001", (40, 60, 200, 180), "house", 0.97, "vitrivr"),
    ]
    .join("\n")
        + "\n"
}
