//! Serialization with a fixed key order: `@context`, `id`, `type`, `label`,
//! then the remaining known members, then preserved unknown members.

use serde_json::{Map, Value};

use super::language::LanguageMap;
use super::model::*;

struct Out(Map<String, Value>);

impl Out {
    fn new() -> Self {
        Out(Map::new())
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_string(), v.into());
        self
    }

    fn opt<T>(&mut self, key: &str, v: Option<T>, f: impl FnOnce(T) -> Value) -> &mut Self {
        if let Some(v) = v {
            self.put(key, f(v));
        }
        self
    }

    fn list<'a, T: 'a>(&mut self, key: &str, items: &'a [T], f: impl Fn(&'a T) -> Value) -> &mut Self {
        if !items.is_empty() {
            self.put(key, Value::Array(items.iter().map(f).collect()));
        }
        self
    }

    fn finish(&mut self, extra: &Extra) -> Value {
        let mut map = std::mem::take(&mut self.0);
        for (k, v) in extra {
            if !map.contains_key(k) {
                map.insert(k.clone(), v.clone());
            }
        }
        Value::Object(map)
    }
}

fn strings(items: &[String]) -> Value {
    Value::Array(items.iter().cloned().map(Value::String).collect())
}

pub(crate) fn language_map(m: &LanguageMap) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), strings(v))).collect())
}

fn metadata_entry(e: &MetadataEntry) -> Value {
    let mut o = Out::new();
    o.put("label", language_map(&e.label)).put("value", language_map(&e.value));
    o.finish(&Extra::new())
}

fn service(s: &Service) -> Value {
    Out::new()
        .opt("id", s.id.as_deref(), Value::from)
        .opt("type", s.kind.as_deref(), Value::from)
        .opt("profile", s.profile.as_deref(), Value::from)
        .finish(&s.extra)
}

pub(crate) fn content_resource(r: &ContentResource) -> Value {
    Out::new()
        .opt("id", r.id.as_deref(), Value::from)
        .put("type", r.kind.as_str())
        .opt("label", r.label.as_ref(), language_map)
        .opt("value", r.value.as_deref(), Value::from)
        .opt("format", r.format.as_deref(), Value::from)
        .opt("language", r.language.as_deref(), Value::from)
        .opt("height", r.height, Value::from)
        .opt("width", r.width, Value::from)
        .opt("duration", r.duration, Value::from)
        .list("service", &r.service, service)
        .finish(&r.extra)
}

fn see_also(s: &SeeAlsoRef) -> Value {
    Out::new()
        .put("id", s.id.as_str())
        .put("type", s.kind.as_str())
        .opt("label", s.label.as_ref(), language_map)
        .opt("format", s.format.as_deref(), Value::from)
        .opt("profile", s.profile.as_deref(), Value::from)
        .finish(&s.extra)
}

fn agent(a: &Agent) -> Value {
    Out::new()
        .put("id", a.id.as_str())
        .put("type", "Agent")
        .put("label", language_map(&a.label))
        .list("homepage", &a.homepage, content_resource)
        .list("logo", &a.logo, content_resource)
        .finish(&a.extra)
}

fn annotation(a: &Annotation) -> Value {
    let target = match &a.target {
        Target::Uri(u) => Value::from(u.as_str()),
        Target::Resource(v) => v.clone(),
    };
    Out::new()
        .put("id", a.id.as_str())
        .put("type", "Annotation")
        .put("motivation", a.motivation.as_str())
        .opt("label", a.label.as_ref(), language_map)
        .opt("body", a.body.as_ref(), content_resource)
        .put("target", target)
        .finish(&a.extra)
}

pub(crate) fn annotation_page(p: &AnnotationPage) -> Value {
    Out::new()
        .put("id", p.id.as_str())
        .put("type", "AnnotationPage")
        .opt("label", p.label.as_ref(), language_map)
        .opt("items", p.items.as_ref(), |items| Value::Array(items.iter().map(annotation).collect()))
        .finish(&p.extra)
}

fn canvas(c: &Canvas) -> Value {
    Out::new()
        .put("id", c.id.as_str())
        .put("type", "Canvas")
        .opt("label", c.label.as_ref(), language_map)
        .opt("height", c.height, Value::from)
        .opt("width", c.width, Value::from)
        .opt("duration", c.duration, Value::from)
        .list("metadata", &c.metadata, metadata_entry)
        .list("thumbnail", &c.thumbnail, content_resource)
        .list("items", &c.items, annotation_page)
        .list("annotations", &c.annotations, annotation_page)
        .finish(&c.extra)
}

fn range_item(item: &RangeItem) -> Value {
    match item {
        RangeItem::Canvas(c) => Out::new().put("id", c.id.as_str()).put("type", "Canvas").finish(&c.extra),
        RangeItem::Range(r) => range(r),
    }
}

fn range(r: &Range) -> Value {
    Out::new()
        .put("id", r.id.as_str())
        .put("type", "Range")
        .opt("label", r.label.as_ref(), language_map)
        .list("items", &r.items, range_item)
        .finish(&r.extra)
}

pub(crate) fn manifest(m: &Manifest) -> Value {
    Out::new()
        .put("@context", m.context.0.clone())
        .put("id", m.id.as_str())
        .put("type", "Manifest")
        .put("label", language_map(&m.label))
        .opt("summary", m.summary.as_ref(), language_map)
        .list("metadata", &m.metadata, metadata_entry)
        .opt("requiredStatement", m.required_statement.as_ref(), metadata_entry)
        .opt("rights", m.rights.as_deref(), Value::from)
        .list("provider", &m.provider, agent)
        .list("homepage", &m.homepage, content_resource)
        .list("seeAlso", &m.see_also, see_also)
        .list("thumbnail", &m.thumbnail, content_resource)
        .list("behavior", &m.behavior, |b| Value::from(b.as_str()))
        .put("items", Value::Array(m.items.iter().map(canvas).collect()))
        .list("structures", &m.structures, range)
        .list("annotations", &m.annotations, annotation_page)
        .finish(&m.extra)
}

fn collection_item(i: &CollectionItem) -> Value {
    Out::new()
        .put("id", i.id.as_str())
        .put("type", i.kind.as_str())
        .put("label", language_map(&i.label))
        .list("thumbnail", &i.thumbnail, content_resource)
        .finish(&i.extra)
}

pub(crate) fn collection(c: &Collection) -> Value {
    Out::new()
        .put("@context", c.context.0.clone())
        .put("id", c.id.as_str())
        .put("type", "Collection")
        .put("label", language_map(&c.label))
        .opt("summary", c.summary.as_ref(), language_map)
        .list("metadata", &c.metadata, metadata_entry)
        .list("provider", &c.provider, agent)
        .list("seeAlso", &c.see_also, see_also)
        .list("thumbnail", &c.thumbnail, content_resource)
        .list("behavior", &c.behavior, |b| Value::from(b.as_str()))
        .put("items", Value::Array(c.items.iter().map(collection_item).collect()))
        .finish(&c.extra)
}

/// Pretty JSON with two-space indentation and a trailing newline.
pub(crate) fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}
