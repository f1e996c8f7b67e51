use serde_json::{Map, Value};

use super::language::LanguageMap;
use super::PRESENTATION_CONTEXT;

/// Members a parser did not recognize, kept verbatim for output.
pub type Extra = Map<String, Value>;

#[derive(Debug, Clone, PartialEq)]
pub struct MetadataEntry {
    pub label: LanguageMap,
    pub value: LanguageMap,
}

impl MetadataEntry {
    pub fn new(label: LanguageMap, value: LanguageMap) -> Self {
        MetadataEntry { label, value }
    }
}

/// An image service reference attached to a content resource.
#[derive(Debug, Clone, PartialEq)]
pub struct Service {
    pub id: Option<String>,
    pub kind: Option<String>,
    pub profile: Option<String>,
    pub extra: Extra,
}

impl Service {
    pub fn image_service3(id: impl Into<String>, profile: &str) -> Self {
        Service {
            id: Some(id.into()),
            kind: Some("ImageService3".into()),
            profile: Some(profile.into()),
            extra: Extra::new(),
        }
    }
}

/// Any external or embedded content: images, text bodies, homepages, logos.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContentResource {
    pub id: Option<String>,
    pub kind: String,
    pub label: Option<LanguageMap>,
    pub value: Option<String>,
    pub format: Option<String>,
    pub language: Option<String>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub duration: Option<f64>,
    pub service: Vec<Service>,
    pub extra: Extra,
}

impl ContentResource {
    pub fn image(id: impl Into<String>, format: &str, width: u32, height: u32) -> Self {
        ContentResource {
            id: Some(id.into()),
            kind: "Image".into(),
            format: Some(format.into()),
            width: Some(width),
            height: Some(height),
            ..Default::default()
        }
    }

    pub fn textual_body(value: impl Into<String>, format: &str) -> Self {
        ContentResource {
            kind: "TextualBody".into(),
            value: Some(value.into()),
            format: Some(format.into()),
            ..Default::default()
        }
    }

    pub fn with_service(mut self, service: Service) -> Self {
        self.service.push(service);
        self
    }
}

/// `seeAlso` entry: a machine-readable description of the resource.
#[derive(Debug, Clone, PartialEq)]
pub struct SeeAlsoRef {
    pub id: String,
    pub kind: String,
    pub label: Option<LanguageMap>,
    pub format: Option<String>,
    pub profile: Option<String>,
    pub extra: Extra,
}

impl SeeAlsoRef {
    pub fn dataset(id: impl Into<String>, label: LanguageMap, format: &str, profile: &str) -> Self {
        SeeAlsoRef {
            id: id.into(),
            kind: "Dataset".into(),
            label: Some(label),
            format: Some(format.into()),
            profile: Some(profile.into()),
            extra: Extra::new(),
        }
    }
}

/// A `provider` entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: String,
    pub label: LanguageMap,
    pub homepage: Vec<ContentResource>,
    pub logo: Vec<ContentResource>,
    pub extra: Extra,
}

impl Agent {
    pub fn new(id: impl Into<String>, label: LanguageMap) -> Self {
        Agent { id: id.into(), label, homepage: Vec::new(), logo: Vec::new(), extra: Extra::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Motivation {
    Painting,
    Supplementing,
    Commenting,
    Tagging,
    Other(String),
}

impl Motivation {
    pub fn as_str(&self) -> &str {
        match self {
            Motivation::Painting => "painting",
            Motivation::Supplementing => "supplementing",
            Motivation::Commenting => "commenting",
            Motivation::Tagging => "tagging",
            Motivation::Other(s) => s,
        }
    }

    pub fn parse(s: &str) -> Self {
        match s {
            "painting" => Motivation::Painting,
            "supplementing" => Motivation::Supplementing,
            "commenting" => Motivation::Commenting,
            "tagging" => Motivation::Tagging,
            other => Motivation::Other(other.to_string()),
        }
    }
}

/// Annotation target: a URI (optionally with a fragment) or any other
/// target shape, held verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Uri(String),
    Resource(Value),
}

impl Target {
    pub fn uri(&self) -> Option<&str> {
        match self {
            Target::Uri(s) => Some(s),
            Target::Resource(_) => None,
        }
    }

    /// The targeted resource: the URI without its fragment, or the `source`
    /// (else `id`) of a structured target.
    pub fn source(&self) -> Option<&str> {
        match self {
            Target::Uri(u) => Some(u.split_once('#').map_or(u.as_str(), |(base, _)| base)),
            Target::Resource(v) => v
                .get("source")
                .and_then(|s| s.as_str().or_else(|| s.get("id").and_then(Value::as_str)))
                .or_else(|| v.get("id").and_then(Value::as_str)),
        }
    }

    pub fn fragment(&self) -> Option<&str> {
        self.uri().and_then(|u| u.split_once('#')).map(|(_, f)| f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub id: String,
    pub motivation: Motivation,
    pub label: Option<LanguageMap>,
    pub body: Option<ContentResource>,
    pub target: Target,
    pub extra: Extra,
}

/// An annotation page. `items == None` is a reference to a page published
/// elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationPage {
    pub id: String,
    pub label: Option<LanguageMap>,
    pub items: Option<Vec<Annotation>>,
    pub extra: Extra,
}

impl AnnotationPage {
    pub fn embedded(id: impl Into<String>, items: Vec<Annotation>) -> Self {
        AnnotationPage { id: id.into(), label: None, items: Some(items), extra: Extra::new() }
    }

    pub fn reference(id: impl Into<String>) -> Self {
        AnnotationPage { id: id.into(), label: None, items: None, extra: Extra::new() }
    }

    pub fn is_reference(&self) -> bool {
        self.items.is_none()
    }

    pub fn annotations(&self) -> &[Annotation] {
        self.items.as_deref().unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    pub id: String,
    pub label: Option<LanguageMap>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub duration: Option<f64>,
    pub metadata: Vec<MetadataEntry>,
    pub thumbnail: Vec<ContentResource>,
    pub items: Vec<AnnotationPage>,
    pub annotations: Vec<AnnotationPage>,
    pub extra: Extra,
}

impl Canvas {
    pub fn new(id: impl Into<String>, width: u32, height: u32) -> Self {
        Canvas {
            id: id.into(),
            label: None,
            width: Some(width),
            height: Some(height),
            duration: None,
            metadata: Vec::new(),
            thumbnail: Vec::new(),
            items: Vec::new(),
            annotations: Vec::new(),
            extra: Extra::new(),
        }
    }

    pub fn painting_annotations(&self) -> impl Iterator<Item = &Annotation> {
        self.items.iter().flat_map(|p| p.annotations())
    }
}

/// A canvas as a member of a range.
#[derive(Debug, Clone, PartialEq)]
pub struct CanvasRef {
    pub id: String,
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RangeItem {
    Canvas(CanvasRef),
    Range(Range),
}

/// A structural grouping. A range with no `items` nested inside another
/// range is a reference to the range with that id.
#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub id: String,
    pub label: Option<LanguageMap>,
    pub items: Vec<RangeItem>,
    pub extra: Extra,
}

impl Range {
    pub fn new(id: impl Into<String>, label: Option<LanguageMap>, items: Vec<RangeItem>) -> Self {
        Range { id: id.into(), label, items, extra: Extra::new() }
    }

    pub fn reference(id: impl Into<String>) -> Self {
        Range::new(id, None, Vec::new())
    }
}

/// The `@context` of a top-level resource, held verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct Context(pub Value);

impl Default for Context {
    fn default() -> Self {
        Context(Value::String(PRESENTATION_CONTEXT.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub context: Context,
    pub id: String,
    pub label: LanguageMap,
    pub summary: Option<LanguageMap>,
    pub metadata: Vec<MetadataEntry>,
    pub required_statement: Option<MetadataEntry>,
    pub rights: Option<String>,
    pub provider: Vec<Agent>,
    pub homepage: Vec<ContentResource>,
    pub see_also: Vec<SeeAlsoRef>,
    pub thumbnail: Vec<ContentResource>,
    pub behavior: Vec<String>,
    pub items: Vec<Canvas>,
    pub structures: Vec<Range>,
    pub annotations: Vec<AnnotationPage>,
    pub extra: Extra,
}

impl Manifest {
    pub fn new(id: impl Into<String>, label: LanguageMap) -> Self {
        Manifest {
            context: Context::default(),
            id: id.into(),
            label,
            summary: None,
            metadata: Vec::new(),
            required_statement: None,
            rights: None,
            provider: Vec::new(),
            homepage: Vec::new(),
            see_also: Vec::new(),
            thumbnail: Vec::new(),
            behavior: Vec::new(),
            items: Vec::new(),
            structures: Vec::new(),
            annotations: Vec::new(),
            extra: Extra::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionItemKind {
    Manifest,
    Collection,
}

impl CollectionItemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CollectionItemKind::Manifest => "Manifest",
            CollectionItemKind::Collection => "Collection",
        }
    }
}

/// A manifest or collection referenced from a collection.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectionItem {
    pub id: String,
    pub kind: CollectionItemKind,
    pub label: LanguageMap,
    pub thumbnail: Vec<ContentResource>,
    pub extra: Extra,
}

impl CollectionItem {
    pub fn manifest(id: impl Into<String>, label: LanguageMap) -> Self {
        CollectionItem {
            id: id.into(),
            kind: CollectionItemKind::Manifest,
            label,
            thumbnail: Vec::new(),
            extra: Extra::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Collection {
    pub context: Context,
    pub id: String,
    pub label: LanguageMap,
    pub summary: Option<LanguageMap>,
    pub metadata: Vec<MetadataEntry>,
    pub provider: Vec<Agent>,
    pub see_also: Vec<SeeAlsoRef>,
    pub thumbnail: Vec<ContentResource>,
    pub behavior: Vec<String>,
    pub items: Vec<CollectionItem>,
    pub extra: Extra,
}

impl Collection {
    pub fn new(id: impl Into<String>, label: LanguageMap) -> Self {
        Collection {
            context: Context::default(),
            id: id.into(),
            label,
            summary: None,
            metadata: Vec::new(),
            provider: Vec::new(),
            see_also: Vec::new(),
            thumbnail: Vec::new(),
            behavior: Vec::new(),
            items: Vec::new(),
            extra: Extra::new(),
        }
    }
}
