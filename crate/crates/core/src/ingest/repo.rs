//! Paginated repository items to typed source records.

use std::collections::HashSet;

use reqwest::header::{HeaderMap, LINK};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use url::Url;

use super::{Warning, WarningCode};
use crate::presentation::{LanguageMap, NO_LANGUAGE};

/// Where each record field lives in a repository item. Values may be plain
/// strings or JSON-LD value objects (`@value`, `@language`, `@id`), single
/// or in arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldMapping {
    pub record_id: String,
    pub title: String,
    pub description: String,
    /// Array of media entries, each a string or an object.
    pub media: String,
    /// Key of the image identifier inside an object media entry.
    pub media_source: String,
    pub rights: String,
    pub collection: String,
}

impl Default for FieldMapping {
    fn default() -> Self {
        FieldMapping {
            record_id: "o:id".into(),
            title: "dcterms:title".into(),
            description: "dcterms:description".into(),
            media: "o:media".into(),
            media_source: "o:source".into(),
            rights: "dcterms:rights".into(),
            collection: "dcterms:isPartOf".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceRecord {
    pub record_id: String,
    pub titles: LanguageMap,
    pub descriptions: Option<LanguageMap>,
    pub image_ids: Vec<String>,
    pub rights: Option<String>,
    pub collection_slug: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FetchError {
    #[error("GET {url} returned HTTP {status}")]
    HttpError { url: String, status: u16 },
    #[error("GET {url} failed: {detail}")]
    Unreachable { url: String, detail: String },
    #[error("{url}: mapping failed at {path}: {detail}")]
    MappingError { url: String, path: String, detail: String },
    #[error("pagination revisits {url}")]
    PaginationLoop { url: String },
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub mapping: FieldMapping,
    /// Replaces the mapped collection slug on every record.
    pub slug_override: Option<String>,
    /// Used when an item has no collection value.
    pub default_slug: Option<String>,
    pub max_pages: usize,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions { mapping: FieldMapping::default(), slug_override: None, default_slug: None, max_pages: 1000 }
    }
}

fn as_list(v: &Value) -> Vec<&Value> {
    match v {
        Value::Array(items) => items.iter().collect(),
        Value::Null => Vec::new(),
        other => vec![other],
    }
}

/// `(language, text)` of a literal or value object.
fn literal(v: &Value) -> Option<(Option<&str>, &str)> {
    match v {
        Value::String(s) => Some((None, s)),
        Value::Object(o) => {
            let text = o.get("@value")?.as_str()?;
            Some((o.get("@language").and_then(Value::as_str), text))
        }
        _ => None,
    }
}

fn reference(v: &Value) -> Option<&str> {
    match v {
        Value::String(s) => Some(s),
        Value::Object(o) => o.get("@id").or_else(|| o.get("@value")).and_then(Value::as_str),
        _ => None,
    }
}

fn language_map(v: &Value) -> LanguageMap {
    let mut map = LanguageMap::new();
    for item in as_list(v) {
        if let Some((lang, text)) = literal(item) {
            if !text.trim().is_empty() {
                map.push(lang.filter(|l| !l.is_empty()).unwrap_or(NO_LANGUAGE), text);
            }
        }
    }
    map
}

struct ItemReader<'a> {
    index: usize,
    url: &'a str,
}

impl ItemReader<'_> {
    fn err(&self, key: &str, detail: impl Into<String>) -> FetchError {
        FetchError::MappingError {
            url: self.url.to_string(),
            path: format!("$[{}].{key}", self.index),
            detail: detail.into(),
        }
    }
}

fn map_item(item: &Value, index: usize, url: &str, opts: &FetchOptions) -> Result<SourceRecord, FetchError> {
    let m = &opts.mapping;
    let item = item.as_object().ok_or_else(|| FetchError::MappingError {
        url: url.to_string(),
        path: format!("$[{index}]"),
        detail: "item is not an object".into(),
    })?;
    let r = ItemReader { index, url };
    let record_id = match item.get(&m.record_id) {
        Some(Value::Number(n)) => n.to_string(),
        Some(v) => reference(v).or_else(|| literal(v).map(|(_, t)| t)).unwrap_or("").trim().to_string(),
        None => String::new(),
    };
    if record_id.is_empty() {
        return Err(r.err(&m.record_id, "missing record id"));
    }
    let titles = item.get(&m.title).map(language_map).unwrap_or_default();
    if titles.is_empty() {
        return Err(r.err(&m.title, "missing title"));
    }
    let descriptions = item.get(&m.description).map(language_map).filter(|d| !d.is_empty());
    let mut image_ids = Vec::new();
    for (i, media) in item.get(&m.media).map(as_list).unwrap_or_default().into_iter().enumerate() {
        let id = match media {
            Value::String(s) => Some(s.as_str()),
            Value::Object(o) => o.get(&m.media_source).and_then(reference),
            _ => None,
        };
        match id.map(str::trim).filter(|s| !s.is_empty()) {
            Some(id) => image_ids.push(id.to_string()),
            None => return Err(r.err(&format!("{}[{i}]", m.media), format!("no {} in media entry", m.media_source))),
        }
    }
    if image_ids.is_empty() {
        return Err(r.err(&m.media, "record has no images"));
    }
    let rights = item.get(&m.rights).and_then(|v| as_list(v).into_iter().find_map(reference)).map(str::to_string);
    let mapped_slug = item
        .get(&m.collection)
        .and_then(|v| as_list(v).into_iter().find_map(|x| literal(x).map(|(_, t)| t).or_else(|| reference(x))))
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty());
    let collection_slug = match (&opts.slug_override, mapped_slug, &opts.default_slug) {
        (Some(s), _, _) => s.clone(),
        (None, Some(s), _) => s,
        (None, None, Some(s)) => s.clone(),
        (None, None, None) => return Err(r.err(&m.collection, "no collection slug")),
    };
    Ok(SourceRecord { record_id, titles, descriptions, image_ids, rights, collection_slug })
}

/// Maps one page body. The body is an array of items, or an object holding
/// one under `items` or `member`.
pub fn map_page(body: &Value, url: &str, opts: &FetchOptions) -> Result<Vec<SourceRecord>, FetchError> {
    let items = match body {
        Value::Array(items) => items,
        Value::Object(o) => match o.get("items").or_else(|| o.get("member")).or_else(|| o.get("hydra:member")) {
            Some(Value::Array(items)) => items,
            _ => {
                return Err(FetchError::MappingError {
                    url: url.to_string(),
                    path: "$".into(),
                    detail: "expected an array of items".into(),
                })
            }
        },
        _ => {
            return Err(FetchError::MappingError {
                url: url.to_string(),
                path: "$".into(),
                detail: "expected an array of items".into(),
            })
        }
    };
    items.iter().enumerate().map(|(i, item)| map_item(item, i, url, opts)).collect()
}

/// Target of the `rel="next"` link, resolved against `base`.
pub fn next_link(headers: &HeaderMap, base: &Url) -> Option<Url> {
    for value in headers.get_all(LINK) {
        let Ok(text) = value.to_str() else { continue };
        let mut rest = text;
        while let Some(start) = rest.find('<') {
            let Some(len) = rest[start..].find('>') else { break };
            let target = &rest[start + 1..start + len];
            let after = &rest[start + len + 1..];
            let params_end = after.find('<').unwrap_or(after.len());
            let params = &after[..params_end];
            let is_next = params.split(';').any(|p| {
                let p = p.trim().trim_end_matches(',').trim();
                p.strip_prefix("rel=").is_some_and(|v| v.trim_matches('"').split_whitespace().any(|r| r == "next"))
            });
            if is_next {
                return base.join(target).ok();
            }
            rest = &after[params_end..];
        }
    }
    None
}

/// Fetches every page starting at `endpoint`, following `rel="next"`
/// links, and maps the items in page order.
pub async fn fetch_records(
    client: &reqwest::Client,
    endpoint: &str,
    opts: &FetchOptions,
    warnings: &mut Vec<Warning>,
) -> Result<Vec<SourceRecord>, FetchError> {
    let mut url = Url::parse(endpoint)
        .map_err(|e| FetchError::Unreachable { url: endpoint.to_string(), detail: e.to_string() })?;
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for page in 0.. {
        if page == opts.max_pages {
            warnings.push(Warning::new(
                WarningCode::PageLimitReached,
                url.as_str(),
                format!("stopped after {} pages", opts.max_pages),
            ));
            break;
        }
        if !seen.insert(url.to_string()) {
            return Err(FetchError::PaginationLoop { url: url.to_string() });
        }
        let unreachable = |e: reqwest::Error| FetchError::Unreachable { url: url.to_string(), detail: e.to_string() };
        let resp = client.get(url.clone()).send().await.map_err(unreachable)?;
        if !resp.status().is_success() {
            return Err(FetchError::HttpError { url: url.to_string(), status: resp.status().as_u16() });
        }
        let next = next_link(resp.headers(), &url);
        let bytes = resp.bytes().await.map_err(unreachable)?;
        let body: Value = serde_json::from_slice(&bytes).map_err(|e| FetchError::MappingError {
            url: url.to_string(),
            path: "$".into(),
            detail: format!("not JSON: {e}"),
        })?;
        records.extend(map_page(&body, url.as_str(), opts)?);
        match next {
            Some(n) => url = n,
            None => break,
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use reqwest::header::HeaderValue;
    use serde_json::json;

    fn opts() -> FetchOptions {
        FetchOptions { default_slug: Some("SGV_12".into()), ..Default::default() }
    }

    #[test]
    fn maps_value_objects() {
        let page = json!([{
            "o:id": 17,
            "dcterms:title": [
                {"type": "literal", "@language": "de", "@value": "Haus"},
                {"type": "literal", "@value": "ohne"}
            ],
            "dcterms:description": [{"@value": "desc", "@language": "en"}],
            "dcterms:rights": [{"@id": "http://rightsstatements.org/vocab/InC/1.0/"}],
            "o:media": [{"o:source": "SGV_12N_1.jpx"}, "SGV_12N_2.jpx"]
        }]);
        let recs = map_page(&page, "https://r.example.org/api/items", &opts()).unwrap();
        let r = &recs[0];
        assert_eq!(r.record_id, "17");
        assert_eq!(r.titles, LanguageMap::single("de", "Haus").with("none", "ohne"));
        assert_eq!(r.descriptions, Some(LanguageMap::single("en", "desc")));
        assert_eq!(r.image_ids, ["SGV_12N_1.jpx", "SGV_12N_2.jpx"]);
        assert_eq!(r.rights.as_deref(), Some("http://rightsstatements.org/vocab/InC/1.0/"));
        assert_eq!(r.collection_slug, "SGV_12");
    }

    #[test]
    fn missing_title_names_path() {
        let page = json!([
            {"o:id": 1, "dcterms:title": "a", "o:media": ["x"]},
            {"o:id": 2, "o:media": ["y"]}
        ]);
        match map_page(&page, "u", &opts()) {
            Err(FetchError::MappingError { path, .. }) => assert_eq!(path, "$[1].dcterms:title"),
            other => panic!("{other:?}"),
        }
        assert_eq!(map_page(&json!([]), "u", &opts()).unwrap(), vec![]);
    }

    #[test]
    fn slug_precedence() {
        let page = json!([{"o:id": 1, "dcterms:title": "a", "o:media": ["x"], "dcterms:isPartOf": "SGV_10"}]);
        assert_eq!(map_page(&page, "u", &opts()).unwrap()[0].collection_slug, "SGV_10");
        let forced = FetchOptions { slug_override: Some("S".into()), ..opts() };
        assert_eq!(map_page(&page, "u", &forced).unwrap()[0].collection_slug, "S");
    }

    #[test]
    fn link_header_next() {
        let base = Url::parse("https://r.example.org/api/items?page=1").unwrap();
        let mut h = HeaderMap::new();
        h.append(
            LINK,
            HeaderValue::from_static(
                "<https://r.example.org/api/items?page=1>; rel=\"first\", </api/items?page=2>; rel=\"next\"",
            ),
        );
        assert_eq!(next_link(&h, &base).unwrap().as_str(), "https://r.example.org/api/items?page=2");
        let mut none = HeaderMap::new();
        none.append(LINK, HeaderValue::from_static("<https://r.example.org/x>; rel=\"prev\""));
        assert_eq!(next_link(&none, &base), None);
    }
}
