//! Presentation API 3.0 resources: typed model, strict parsing with JSON
//! paths in errors, ordered serialization and structural validation.

mod de;
mod language;
mod model;
mod ser;
mod validate;

use serde_json::Value;

pub use de::{ModelError, ModelErrorKind};
pub use language::{LanguageMap, NO_LANGUAGE};
pub use model::*;
pub use validate::{parse_xywh, validate_collection, validate_manifest, FragmentRect, Rule, Violation, KNOWN_BEHAVIORS};

pub const PRESENTATION_CONTEXT: &str = "http://iiif.io/api/presentation/3/context.json";

/// Media type for Presentation 3.0 documents.
pub const PRESENTATION_MEDIA_TYPE: &str =
    "application/ld+json;profile=\"http://iiif.io/api/presentation/3/context.json\"";

impl Manifest {
    pub fn from_value(v: &Value) -> Result<Self, ModelError> {
        de::manifest_at(v, "$")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Manifest::from_value(&de::parse_json(text)?)
    }

    pub fn to_value(&self) -> Value {
        ser::manifest(self)
    }

    pub fn to_json(&self) -> String {
        ser::to_pretty(&self.to_value())
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_manifest(self)
    }
}

impl Collection {
    pub fn from_value(v: &Value) -> Result<Self, ModelError> {
        de::collection_at(v, "$")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Collection::from_value(&de::parse_json(text)?)
    }

    pub fn to_value(&self) -> Value {
        ser::collection(self)
    }

    pub fn to_json(&self) -> String {
        ser::to_pretty(&self.to_value())
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_collection(self)
    }
}

impl AnnotationPage {
    /// Parses a standalone annotation page, such as one published by
    /// reference.
    pub fn from_value(v: &Value) -> Result<Self, ModelError> {
        de::annotation_page(v, "$")
    }

    pub fn to_value(&self) -> Value {
        ser::annotation_page(self)
    }
}

impl LanguageMap {
    pub fn from_value(v: &Value) -> Result<Self, ModelError> {
        de::language_map(v, "$")
    }

    pub fn to_value(&self) -> Value {
        ser::language_map(self)
    }
}

impl ContentResource {
    pub fn to_value(&self) -> Value {
        ser::content_resource(self)
    }
}

/// A top-level Presentation document.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Manifest(Box<Manifest>),
    Collection(Box<Collection>),
}

impl Document {
    /// Dispatches on the top-level `type`.
    pub fn from_value(v: &Value) -> Result<Self, ModelError> {
        match v.get("type").and_then(Value::as_str) {
            Some("Collection") => Collection::from_value(v).map(|c| Document::Collection(Box::new(c))),
            _ => Manifest::from_value(v).map(|m| Document::Manifest(Box::new(m))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Document::from_value(&de::parse_json(text)?)
    }

    pub fn to_value(&self) -> Value {
        match self {
            Document::Manifest(m) => m.to_value(),
            Document::Collection(c) => c.to_value(),
        }
    }

    pub fn to_json(&self) -> String {
        ser::to_pretty(&self.to_value())
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Document::Manifest(m) => m.validate(),
            Document::Collection(c) => c.validate(),
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Document::Manifest(m) => &m.id,
            Document::Collection(c) => &c.id,
        }
    }

    pub fn label(&self) -> &LanguageMap {
        match self {
            Document::Manifest(m) => &m.label,
            Document::Collection(c) => &c.label,
        }
    }
}
