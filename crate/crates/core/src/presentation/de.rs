//! Strict deserialization from JSON values, reporting the JSON path of the
//! first problem found.

use std::fmt;

use serde_json::{Map, Value};

use super::language::LanguageMap;
use super::model::*;
use super::PRESENTATION_CONTEXT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelErrorKind {
    InvalidJson,
    MissingRequiredField,
    WrongTypeLiteral,
    EmptyLanguageMap,
    InvalidUri,
}

impl ModelErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelErrorKind::InvalidJson => "InvalidJson",
            ModelErrorKind::MissingRequiredField => "MissingRequiredField",
            ModelErrorKind::WrongTypeLiteral => "WrongTypeLiteral",
            ModelErrorKind::EmptyLanguageMap => "EmptyLanguageMap",
            ModelErrorKind::InvalidUri => "InvalidUri",
        }
    }
}

impl fmt::Display for ModelErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at {path}: {detail}")]
pub struct ModelError {
    pub kind: ModelErrorKind,
    pub path: String,
    pub detail: String,
}

impl ModelError {
    fn new(kind: ModelErrorKind, path: &str, detail: impl Into<String>) -> Self {
        ModelError { kind, path: path.to_string(), detail: detail.into() }
    }
}

type Result<T> = std::result::Result<T, ModelError>;

fn wrong(path: &str, expected: &str) -> ModelError {
    ModelError::new(ModelErrorKind::WrongTypeLiteral, path, format!("expected {expected}"))
}

fn check_uri(s: &str, path: &str) -> Result<()> {
    match url::Url::parse(s) {
        Ok(_) => Ok(()),
        Err(e) => Err(ModelError::new(ModelErrorKind::InvalidUri, path, format!("{s:?}: {e}"))),
    }
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| wrong(path, "a string"))
}

fn as_u32(v: &Value, path: &str) -> Result<u32> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| wrong(path, "a non-negative integer"))
}

pub(crate) fn language_map(v: &Value, path: &str) -> Result<LanguageMap> {
    let obj = v.as_object().ok_or_else(|| wrong(path, "a language map"))?;
    if obj.is_empty() {
        return Err(ModelError::new(ModelErrorKind::EmptyLanguageMap, path, "no languages"));
    }
    let mut map = LanguageMap::new();
    for (lang, values) in obj {
        let p = format!("{path}.{lang}");
        let arr = values.as_array().ok_or_else(|| wrong(&p, "an array of strings"))?;
        if arr.is_empty() {
            return Err(ModelError::new(ModelErrorKind::EmptyLanguageMap, &p, "empty value list"));
        }
        let strings = arr
            .iter()
            .enumerate()
            .map(|(i, s)| as_str(s, &format!("{p}[{i}]")).map(str::to_string))
            .collect::<Result<Vec<_>>>()?;
        map.insert(lang, strings);
    }
    Ok(map)
}

/// A JSON object being read, with its path.
struct Obj<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, path: &str) -> Result<Self> {
        let map = v.as_object().ok_or_else(|| wrong(path, "an object"))?;
        Ok(Obj { map, path: path.to_string() })
    }

    fn at(&self, key: &str) -> String {
        format!("{}.{}", self.path, key)
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn req(&self, key: &str) -> Result<&'a Value> {
        self.get(key)
            .ok_or_else(|| ModelError::new(ModelErrorKind::MissingRequiredField, &self.at(key), "required"))
    }

    fn req_str(&self, key: &str) -> Result<String> {
        as_str(self.req(key)?, &self.at(key)).map(str::to_string)
    }

    fn opt_str(&self, key: &str) -> Result<Option<String>> {
        self.get(key).map(|v| as_str(v, &self.at(key)).map(str::to_string)).transpose()
    }

    fn req_uri(&self, key: &str) -> Result<String> {
        let s = self.req_str(key)?;
        check_uri(&s, &self.at(key))?;
        Ok(s)
    }

    fn opt_uri(&self, key: &str) -> Result<Option<String>> {
        let s = self.opt_str(key)?;
        if let Some(s) = &s {
            check_uri(s, &self.at(key))?;
        }
        Ok(s)
    }

    fn expect_type(&self, expected: &str) -> Result<()> {
        let t = self.req_str("type")?;
        if t != expected {
            return Err(ModelError::new(
                ModelErrorKind::WrongTypeLiteral,
                &self.at("type"),
                format!("expected {expected:?}, found {t:?}"),
            ));
        }
        Ok(())
    }

    fn opt_u32(&self, key: &str) -> Result<Option<u32>> {
        self.get(key).map(|v| as_u32(v, &self.at(key))).transpose()
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| v.as_f64().ok_or_else(|| wrong(&self.at(key), "a number")))
            .transpose()
    }

    fn req_lang(&self, key: &str) -> Result<LanguageMap> {
        language_map(self.req(key)?, &self.at(key))
    }

    fn opt_lang(&self, key: &str) -> Result<Option<LanguageMap>> {
        self.get(key).map(|v| language_map(v, &self.at(key))).transpose()
    }

    /// Items of an array member; absent means empty.
    fn list<T>(&self, key: &str, f: impl Fn(&'a Value, &str) -> Result<T>) -> Result<Vec<T>> {
        let Some(v) = self.get(key) else { return Ok(Vec::new()) };
        self.array(v, key, f)
    }

    fn req_list<T>(&self, key: &str, f: impl Fn(&'a Value, &str) -> Result<T>) -> Result<Vec<T>> {
        let v = self.req(key)?;
        self.array(v, key, f)
    }

    fn array<T>(&self, v: &'a Value, key: &str, f: impl Fn(&'a Value, &str) -> Result<T>) -> Result<Vec<T>> {
        let p = self.at(key);
        let arr = v.as_array().ok_or_else(|| wrong(&p, "an array"))?;
        arr.iter().enumerate().map(|(i, item)| f(item, &format!("{p}[{i}]"))).collect()
    }

    fn strings(&self, key: &str) -> Result<Vec<String>> {
        self.list(key, |v, p| as_str(v, p).map(str::to_string))
    }

    fn extra(&self, known: &[&str]) -> Extra {
        self.map
            .iter()
            .filter(|(k, _)| !known.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

fn context(o: &Obj) -> Result<Context> {
    let v = o.req("@context")?;
    let p = o.at("@context");
    let ok = match v {
        Value::String(s) => s == PRESENTATION_CONTEXT,
        Value::Array(items) => items.iter().any(|i| i.as_str() == Some(PRESENTATION_CONTEXT)),
        _ => false,
    };
    if !ok {
        return Err(ModelError::new(
            ModelErrorKind::WrongTypeLiteral,
            &p,
            format!("must include {PRESENTATION_CONTEXT}"),
        ));
    }
    Ok(Context(v.clone()))
}

fn metadata_entry(v: &Value, path: &str) -> Result<MetadataEntry> {
    let o = Obj::new(v, path)?;
    Ok(MetadataEntry { label: o.req_lang("label")?, value: o.req_lang("value")? })
}

fn service(v: &Value, path: &str) -> Result<Service> {
    let o = Obj::new(v, path)?;
    // older services spell these @id/@type; those stay in `extra`
    Ok(Service {
        id: o.opt_uri("id")?,
        kind: o.opt_str("type")?,
        profile: o.opt_str("profile")?,
        extra: o.extra(&["id", "type", "profile"]),
    })
}

pub(crate) fn content_resource(v: &Value, path: &str) -> Result<ContentResource> {
    let o = Obj::new(v, path)?;
    Ok(ContentResource {
        id: o.opt_uri("id")?,
        kind: o.req_str("type")?,
        label: o.opt_lang("label")?,
        value: o.opt_str("value")?,
        format: o.opt_str("format")?,
        language: o.opt_str("language")?,
        width: o.opt_u32("width")?,
        height: o.opt_u32("height")?,
        duration: o.opt_f64("duration")?,
        service: o.list("service", service)?,
        extra: o.extra(&[
            "id", "type", "label", "value", "format", "language", "width", "height", "duration", "service",
        ]),
    })
}

fn see_also(v: &Value, path: &str) -> Result<SeeAlsoRef> {
    let o = Obj::new(v, path)?;
    Ok(SeeAlsoRef {
        id: o.req_uri("id")?,
        kind: o.req_str("type")?,
        label: o.opt_lang("label")?,
        format: o.opt_str("format")?,
        profile: o.opt_str("profile")?,
        extra: o.extra(&["id", "type", "label", "format", "profile"]),
    })
}

fn agent(v: &Value, path: &str) -> Result<Agent> {
    let o = Obj::new(v, path)?;
    o.expect_type("Agent")?;
    Ok(Agent {
        id: o.req_uri("id")?,
        label: o.req_lang("label")?,
        homepage: o.list("homepage", content_resource)?,
        logo: o.list("logo", content_resource)?,
        extra: o.extra(&["id", "type", "label", "homepage", "logo"]),
    })
}

fn target(v: &Value, path: &str) -> Result<Target> {
    match v {
        Value::String(s) => {
            check_uri(s, path)?;
            Ok(Target::Uri(s.clone()))
        }
        Value::Object(_) => Ok(Target::Resource(v.clone())),
        _ => Err(wrong(path, "a URI or an object")),
    }
}

fn annotation(v: &Value, path: &str) -> Result<Annotation> {
    let o = Obj::new(v, path)?;
    o.expect_type("Annotation")?;
    Ok(Annotation {
        id: o.req_uri("id")?,
        motivation: Motivation::parse(&o.req_str("motivation")?),
        label: o.opt_lang("label")?,
        body: o.get("body").map(|b| content_resource(b, &o.at("body"))).transpose()?,
        target: target(o.req("target")?, &o.at("target"))?,
        extra: o.extra(&["id", "type", "motivation", "label", "body", "target"]),
    })
}

pub(crate) fn annotation_page(v: &Value, path: &str) -> Result<AnnotationPage> {
    let o = Obj::new(v, path)?;
    o.expect_type("AnnotationPage")?;
    let items = match o.get("items") {
        Some(_) => Some(o.req_list("items", annotation)?),
        None => None,
    };
    Ok(AnnotationPage {
        id: o.req_uri("id")?,
        label: o.opt_lang("label")?,
        items,
        extra: o.extra(&["id", "type", "label", "items"]),
    })
}

fn canvas(v: &Value, path: &str) -> Result<Canvas> {
    let o = Obj::new(v, path)?;
    o.expect_type("Canvas")?;
    Ok(Canvas {
        id: o.req_uri("id")?,
        label: o.opt_lang("label")?,
        width: o.opt_u32("width")?,
        height: o.opt_u32("height")?,
        duration: o.opt_f64("duration")?,
        metadata: o.list("metadata", metadata_entry)?,
        thumbnail: o.list("thumbnail", content_resource)?,
        items: o.list("items", annotation_page)?,
        annotations: o.list("annotations", annotation_page)?,
        extra: o.extra(&[
            "id", "type", "label", "width", "height", "duration", "metadata", "thumbnail", "items", "annotations",
        ]),
    })
}

fn range_item(v: &Value, path: &str) -> Result<RangeItem> {
    let o = Obj::new(v, path)?;
    match o.req_str("type")?.as_str() {
        "Canvas" => Ok(RangeItem::Canvas(CanvasRef {
            id: o.req_uri("id")?,
            extra: o.extra(&["id", "type"]),
        })),
        "Range" => range(v, path).map(RangeItem::Range),
        other => Err(ModelError::new(
            ModelErrorKind::WrongTypeLiteral,
            &o.at("type"),
            format!("expected \"Canvas\" or \"Range\", found {other:?}"),
        )),
    }
}

fn range(v: &Value, path: &str) -> Result<Range> {
    let o = Obj::new(v, path)?;
    o.expect_type("Range")?;
    Ok(Range {
        id: o.req_uri("id")?,
        label: o.opt_lang("label")?,
        items: o.list("items", range_item)?,
        extra: o.extra(&["id", "type", "label", "items"]),
    })
}

pub(crate) fn manifest_at(v: &Value, path: &str) -> Result<Manifest> {
    let o = Obj::new(v, path)?;
    o.expect_type("Manifest")?;
    Ok(Manifest {
        context: context(&o)?,
        id: o.req_uri("id")?,
        label: o.req_lang("label")?,
        summary: o.opt_lang("summary")?,
        metadata: o.list("metadata", metadata_entry)?,
        required_statement: o
            .get("requiredStatement")
            .map(|r| metadata_entry(r, &o.at("requiredStatement")))
            .transpose()?,
        rights: o.opt_uri("rights")?,
        provider: o.list("provider", agent)?,
        homepage: o.list("homepage", content_resource)?,
        see_also: o.list("seeAlso", see_also)?,
        thumbnail: o.list("thumbnail", content_resource)?,
        behavior: o.strings("behavior")?,
        items: o.req_list("items", canvas)?,
        structures: o.list("structures", range)?,
        annotations: o.list("annotations", annotation_page)?,
        extra: o.extra(MANIFEST_KEYS),
    })
}

pub(crate) const MANIFEST_KEYS: &[&str] = &[
    "@context", "id", "type", "label", "summary", "metadata", "requiredStatement", "rights", "provider",
    "homepage", "seeAlso", "thumbnail", "behavior", "items", "structures", "annotations",
];

fn collection_item(v: &Value, path: &str) -> Result<CollectionItem> {
    let o = Obj::new(v, path)?;
    let kind = match o.req_str("type")?.as_str() {
        "Manifest" => CollectionItemKind::Manifest,
        "Collection" => CollectionItemKind::Collection,
        other => {
            return Err(ModelError::new(
                ModelErrorKind::WrongTypeLiteral,
                &o.at("type"),
                format!("expected \"Manifest\" or \"Collection\", found {other:?}"),
            ))
        }
    };
    Ok(CollectionItem {
        id: o.req_uri("id")?,
        kind,
        label: o.req_lang("label")?,
        thumbnail: o.list("thumbnail", content_resource)?,
        extra: o.extra(&["id", "type", "label", "thumbnail"]),
    })
}

pub(crate) fn collection_at(v: &Value, path: &str) -> Result<Collection> {
    let o = Obj::new(v, path)?;
    o.expect_type("Collection")?;
    Ok(Collection {
        context: context(&o)?,
        id: o.req_uri("id")?,
        label: o.req_lang("label")?,
        summary: o.opt_lang("summary")?,
        metadata: o.list("metadata", metadata_entry)?,
        provider: o.list("provider", agent)?,
        see_also: o.list("seeAlso", see_also)?,
        thumbnail: o.list("thumbnail", content_resource)?,
        behavior: o.strings("behavior")?,
        items: o.req_list("items", collection_item)?,
        extra: o.extra(&[
            "@context", "id", "type", "label", "summary", "metadata", "provider", "seeAlso", "thumbnail",
            "behavior", "items",
        ]),
    })
}

pub(crate) fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| ModelError::new(ModelErrorKind::InvalidJson, "$", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal() -> Value {
        json!({
            "@context": PRESENTATION_CONTEXT,
            "id": "https://example.org/m",
            "type": "Manifest",
            "label": {"en": ["Test"]},
            "items": [{
                "id": "https://example.org/m/canvas/1",
                "type": "Canvas",
                "width": 10,
                "height": 20
            }]
        })
    }

    fn err(v: &Value) -> ModelError {
        manifest_at(v, "$").unwrap_err()
    }

    #[test]
    fn minimal_parses() {
        let m = manifest_at(&minimal(), "$").unwrap();
        assert_eq!(m.items.len(), 1);
        assert_eq!(m.items[0].width, Some(10));
    }

    #[test]
    fn missing_items_reports_path() {
        let mut v = minimal();
        v.as_object_mut().unwrap().remove("items");
        let e = err(&v);
        assert_eq!((e.kind, e.path.as_str()), (ModelErrorKind::MissingRequiredField, "$.items"));
    }

    #[test]
    fn bare_string_label_is_wrong_type() {
        let mut v = minimal();
        v["label"] = json!("Test");
        let e = err(&v);
        assert_eq!((e.kind, e.path.as_str()), (ModelErrorKind::WrongTypeLiteral, "$.label"));
    }

    #[test]
    fn nested_paths() {
        let mut v = minimal();
        v["items"][0]["label"] = json!({});
        let e = err(&v);
        assert_eq!((e.kind, e.path.as_str()), (ModelErrorKind::EmptyLanguageMap, "$.items[0].label"));

        let mut v = minimal();
        v["items"][0]["id"] = json!("canvas/1");
        let e = err(&v);
        assert_eq!((e.kind, e.path.as_str()), (ModelErrorKind::InvalidUri, "$.items[0].id"));

        let mut v = minimal();
        v["items"][0]["type"] = json!("Manifest");
        assert_eq!(err(&v).path, "$.items[0].type");

        let mut v = minimal();
        v["label"] = json!({"en": []});
        let e = err(&v);
        assert_eq!((e.kind, e.path.as_str()), (ModelErrorKind::EmptyLanguageMap, "$.label.en"));
    }

    #[test]
    fn wrong_context_rejected() {
        let mut v = minimal();
        v["@context"] = json!("http://iiif.io/api/presentation/2/context.json");
        assert_eq!(err(&v).path, "$.@context");
        v["@context"] = json!(["http://www.w3.org/ns/anno.jsonld", PRESENTATION_CONTEXT]);
        assert!(manifest_at(&v, "$").is_ok());
    }

    #[test]
    fn unknown_members_kept() {
        let mut v = minimal();
        v["navDate"] = json!("2020-01-01T00:00:00Z");
        v["items"][0]["x-local"] = json!({"a": 1});
        let m = manifest_at(&v, "$").unwrap();
        assert_eq!(m.extra["navDate"], json!("2020-01-01T00:00:00Z"));
        assert_eq!(m.items[0].extra["x-local"], json!({"a": 1}));
    }
}
