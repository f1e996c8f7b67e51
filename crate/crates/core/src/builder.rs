//! Manifest boilerplates for the supported recipe patterns.
//!
//! Ids are minted under `base_id`: `{base_id}/manifest`,
//! `{base_id}/canvas/{n}`, `{base_id}/page/{n}` and `{base_id}/annotation/{n}`,
//! with `n` counted from 1.

use crate::limits::ComplianceLevel;
use crate::presentation::{
    Agent, Annotation, AnnotationPage, Canvas, ContentResource, Extra, LanguageMap, Manifest, MetadataEntry,
    Motivation, SeeAlsoRef, Service, Target, Violation,
};
use crate::request::BaseUri;

/// Long edge of derived thumbnails, in pixels.
pub const THUMBNAIL_LONG_EDGE: u32 = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct ImageSpec {
    pub service: BaseUri,
    pub width: u32,
    pub height: u32,
    pub label: Option<LanguageMap>,
    pub profile: ComplianceLevel,
}

impl ImageSpec {
    pub fn new(service: BaseUri, width: u32, height: u32) -> Self {
        ImageSpec { service, width, height, label: None, profile: ComplianceLevel::Level2 }
    }

    pub fn with_label(mut self, label: LanguageMap) -> Self {
        self.label = Some(label);
        self
    }
}

/// An annotation page to attach: embedded in full, or referenced by URI.
#[derive(Debug, Clone, PartialEq)]
pub enum PageSource {
    Embedded(AnnotationPage),
    External(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BuildSpec {
    pub base_id: String,
    pub label: LanguageMap,
    pub summary: Option<LanguageMap>,
    pub metadata: Vec<MetadataEntry>,
    pub rights: Option<String>,
    pub images: Vec<ImageSpec>,
    pub providers: Vec<Agent>,
    pub see_also: Vec<SeeAlsoRef>,
    /// Pages attached to the manifest itself.
    pub annotation_pages: Vec<PageSource>,
    pub paged: bool,
}

impl BuildSpec {
    pub fn new(base_id: impl Into<String>, label: LanguageMap, images: Vec<ImageSpec>) -> Self {
        BuildSpec { base_id: base_id.into(), label, images, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("expected {expected} image(s), found {found}")]
    ImageCount { expected: &'static str, found: usize },
    #[error("image {index} has a zero dimension")]
    ZeroDimension { index: usize },
    #[error("provider {index}: {reason}")]
    InvalidAgent { index: usize, reason: String },
    #[error("seeAlso {index}: {reason}")]
    InvalidSeeAlso { index: usize, reason: String },
    #[error("canvas index {index} out of range for {len} canvases")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid annotation page: {0}")]
    InvalidPage(String),
    #[error("result fails validation: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    Invalid(Vec<Violation>),
}

fn base(spec: &BuildSpec) -> &str {
    spec.base_id.trim_end_matches('/')
}

/// Thumbnail size: long edge [`THUMBNAIL_LONG_EDGE`], never larger than the
/// image, short edge rounded half up.
pub fn thumbnail_size(width: u32, height: u32) -> (u32, u32) {
    let long = width.max(height);
    if long <= THUMBNAIL_LONG_EDGE {
        return (width, height);
    }
    let scale = |short: u32| {
        let s = (2 * u64::from(short) * u64::from(THUMBNAIL_LONG_EDGE) + u64::from(long)) / (2 * u64::from(long));
        s.max(1) as u32
    };
    if width >= height {
        (THUMBNAIL_LONG_EDGE, scale(height))
    } else {
        (scale(width), THUMBNAIL_LONG_EDGE)
    }
}

fn image_service(img: &ImageSpec) -> Service {
    Service::image_service3(img.service.to_string(), img.profile.as_str())
}

fn thumbnail(img: &ImageSpec) -> ContentResource {
    let (w, h) = thumbnail_size(img.width, img.height);
    let size = if (w, h) == (img.width, img.height) { "max".to_string() } else { format!("{w},{h}") };
    ContentResource::image(format!("{}/full/{size}/0/default.jpg", img.service), "image/jpeg", w, h)
        .with_service(image_service(img))
}

fn canvas_for(base: &str, n: usize, img: &ImageSpec) -> Canvas {
    let canvas_id = format!("{base}/canvas/{n}");
    let body = ContentResource::image(
        format!("{}/full/max/0/default.jpg", img.service),
        "image/jpeg",
        img.width,
        img.height,
    )
    .with_service(image_service(img));
    let painting = Annotation {
        id: format!("{base}/annotation/{n}"),
        motivation: Motivation::Painting,
        label: None,
        body: Some(body),
        target: Target::Uri(canvas_id.clone()),
        extra: Extra::new(),
    };
    let mut canvas = Canvas::new(canvas_id, img.width, img.height);
    canvas.label = img.label.clone();
    canvas.thumbnail.push(thumbnail(img));
    canvas.items.push(AnnotationPage::embedded(format!("{base}/page/{n}"), vec![painting]));
    canvas
}

fn check_images(spec: &BuildSpec) -> Result<(), BuildError> {
    match spec.images.iter().position(|i| i.width == 0 || i.height == 0) {
        Some(index) => Err(BuildError::ZeroDimension { index }),
        None => Ok(()),
    }
}

fn finish(m: Manifest) -> Result<Manifest, BuildError> {
    let violations = m.validate();
    if violations.is_empty() {
        Ok(m)
    } else {
        Err(BuildError::Invalid(violations))
    }
}

fn assemble(spec: &BuildSpec) -> Result<Manifest, BuildError> {
    check_images(spec)?;
    let base = base(spec);
    let mut m = Manifest::new(format!("{base}/manifest"), spec.label.clone());
    m.summary = spec.summary.clone();
    m.metadata = spec.metadata.clone();
    m.rights = spec.rights.clone();
    m.items = spec.images.iter().enumerate().map(|(i, img)| canvas_for(base, i + 1, img)).collect();
    if let Some(first) = spec.images.first() {
        m.thumbnail.push(thumbnail(first));
    }
    if spec.paged {
        m.behavior.push("paged".into());
    }
    let m = attach_provider(m, &spec.providers)?;
    let mut m = attach_see_also(m, &spec.see_also)?;
    for page in &spec.annotation_pages {
        m.annotations.push(page_from(page)?);
    }
    finish(m)
}

/// One canvas painted with one image, with an image service for deep zoom.
pub fn build_single_image(spec: &BuildSpec) -> Result<Manifest, BuildError> {
    if spec.images.len() != 1 {
        return Err(BuildError::ImageCount { expected: "exactly 1", found: spec.images.len() });
    }
    assemble(spec)
}

/// One canvas per image, in order; `paged` adds the `paged` behavior.
pub fn build_book(spec: &BuildSpec) -> Result<Manifest, BuildError> {
    if spec.images.len() < 2 {
        return Err(BuildError::ImageCount { expected: "at least 2", found: spec.images.len() });
    }
    assemble(spec)
}

/// Appends providers in order.
pub fn attach_provider(mut m: Manifest, agents: &[Agent]) -> Result<Manifest, BuildError> {
    for (index, a) in agents.iter().enumerate() {
        let reason = if !a.label.is_well_formed() {
            Some("label is missing or empty".to_string())
        } else if url::Url::parse(&a.id).is_err() {
            Some(format!("id {:?} is not an absolute URI", a.id))
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(BuildError::InvalidAgent { index, reason });
        }
    }
    m.provider.extend_from_slice(agents);
    Ok(m)
}

/// Appends `seeAlso` references in order.
pub fn attach_see_also(mut m: Manifest, refs: &[SeeAlsoRef]) -> Result<Manifest, BuildError> {
    for (index, r) in refs.iter().enumerate() {
        let reason = if r.kind.is_empty() {
            Some("type is missing".to_string())
        } else if url::Url::parse(&r.id).is_err() {
            Some(format!("id {:?} is not an absolute URI", r.id))
        } else if r.label.as_ref().is_some_and(|l| !l.is_well_formed()) {
            Some("label is empty".to_string())
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(BuildError::InvalidSeeAlso { index, reason });
        }
    }
    m.see_also.extend_from_slice(refs);
    Ok(m)
}

fn page_from(page: &PageSource) -> Result<AnnotationPage, BuildError> {
    match page {
        PageSource::External(uri) => {
            url::Url::parse(uri).map_err(|e| BuildError::InvalidPage(format!("{uri:?}: {e}")))?;
            Ok(AnnotationPage::reference(uri.clone()))
        }
        PageSource::Embedded(p) => Ok(p.clone()),
    }
}

/// Appends a non-painting annotation page to one canvas.
pub fn attach_annotations(mut m: Manifest, canvas_index: usize, page: PageSource) -> Result<Manifest, BuildError> {
    let len = m.items.len();
    if canvas_index >= len {
        return Err(BuildError::IndexOutOfRange { index: canvas_index, len });
    }
    let before = m.validate();
    let page = page_from(&page)?;
    m.items[canvas_index].annotations.push(page);
    let fresh: Vec<String> = m
        .validate()
        .into_iter()
        .filter(|v| !before.contains(v))
        .map(|v| v.to_string())
        .collect();
    if !fresh.is_empty() {
        return Err(BuildError::InvalidPage(fresh.join("; ")));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::request::{Scheme, ServiceRoot};

    fn root() -> ServiceRoot {
        ServiceRoot::new(Scheme::Https, "images.example.org", Some("iiif/3"))
    }

    fn spec(n: usize) -> BuildSpec {
        let images = (1..=n).map(|i| ImageSpec::new(root().base_for(&format!("p{i}")), 1000, 800)).collect();
        BuildSpec::new("https://example.org/iiif/rec1", LanguageMap::single("en", "Record"), images)
    }

    #[test]
    fn single_image_shape() {
        let m = build_single_image(&spec(1)).unwrap();
        assert_eq!(m.id, "https://example.org/iiif/rec1/manifest");
        assert_eq!(m.items.len(), 1);
        let c = &m.items[0];
        assert_eq!((c.width, c.height), (Some(1000), Some(800)));
        let painting: Vec<_> = c.painting_annotations().collect();
        assert_eq!(painting.len(), 1);
        let body = painting[0].body.as_ref().unwrap();
        assert_eq!(body.service[0].id.as_deref(), Some("https://images.example.org/iiif/3/p1"));
        assert_eq!(body.id.as_deref(), Some("https://images.example.org/iiif/3/p1/full/max/0/default.jpg"));
        assert_eq!(c.thumbnail[0].width, Some(256));
        assert_eq!(c.thumbnail[0].height, Some(205));
    }

    #[test]
    fn counts_enforced() {
        assert!(matches!(build_single_image(&spec(2)), Err(BuildError::ImageCount { found: 2, .. })));
        let mut one = spec(1);
        one.paged = true;
        assert!(matches!(build_book(&one), Err(BuildError::ImageCount { found: 1, .. })));
        assert!(matches!(build_book(&spec(0)), Err(BuildError::ImageCount { found: 0, .. })));
    }

    #[test]
    fn book_keeps_order() {
        let mut s = spec(3);
        s.paged = true;
        let m = build_book(&s).unwrap();
        assert_eq!(m.behavior, vec!["paged"]);
        let ids: Vec<_> = m.items.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "https://example.org/iiif/rec1/canvas/1",
                "https://example.org/iiif/rec1/canvas/2",
                "https://example.org/iiif/rec1/canvas/3"
            ]
        );
    }

    #[test]
    fn thumbnail_sizes() {
        assert_eq!(thumbnail_size(1000, 800), (256, 205));
        assert_eq!(thumbnail_size(800, 1000), (205, 256));
        assert_eq!(thumbnail_size(100, 40), (100, 40));
        assert_eq!(thumbnail_size(10_000, 1), (256, 1));
    }

    #[test]
    fn attachments() {
        let m = build_single_image(&spec(1)).unwrap();
        assert_eq!(attach_provider(m.clone(), &[]).unwrap(), m);
        assert_eq!(attach_see_also(m.clone(), &[]).unwrap(), m);
        let bad = Agent::new("https://ssfs.example.org", LanguageMap::new());
        assert!(matches!(attach_provider(m.clone(), &[bad]), Err(BuildError::InvalidAgent { index: 0, .. })));
        let mut r = SeeAlsoRef::dataset("https://example.org/mods.xml", LanguageMap::none("x"), "text/xml", "p");
        r.kind.clear();
        assert!(matches!(attach_see_also(m.clone(), &[r]), Err(BuildError::InvalidSeeAlso { .. })));

        let ext = attach_annotations(m.clone(), 0, PageSource::External("https://example.org/pages/1".into())).unwrap();
        assert!(ext.items[0].annotations[0].is_reference());
        assert!(matches!(
            attach_annotations(m, 1, PageSource::External("https://example.org/p".into())),
            Err(BuildError::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn embedded_fragment_kept() {
        let m = build_single_image(&spec(1)).unwrap();
        let target = format!("{}#xywh=10,10,50,50", m.items[0].id);
        let page = AnnotationPage::embedded(
            "https://example.org/iiif/rec1/page/user-a",
            vec![Annotation {
                id: "https://example.org/iiif/rec1/annotation/user-a/1".into(),
                motivation: Motivation::Tagging,
                label: None,
                body: Some(ContentResource::textual_body("cat", "text/plain")),
                target: Target::Uri(target.clone()),
                extra: Extra::new(),
            }],
        );
        let m = attach_annotations(m, 0, PageSource::Embedded(page)).unwrap();
        let back = Manifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back.items[0].annotations[0].annotations()[0].target.uri(), Some(target.as_str()));
        assert!(back.validate().is_empty());
    }

    #[test]
    fn out_of_bounds_page_rejected() {
        let m = build_single_image(&spec(1)).unwrap();
        let page = AnnotationPage::embedded(
            "https://example.org/p",
            vec![Annotation {
                id: "https://example.org/a".into(),
                motivation: Motivation::Tagging,
                label: None,
                body: None,
                target: Target::Uri(format!("{}#xywh=990,0,20,20", m.items[0].id)),
                extra: Extra::new(),
            }],
        );
        assert!(matches!(attach_annotations(m, 0, PageSource::Embedded(page)), Err(BuildError::InvalidPage(_))));
    }

    #[test]
    fn deterministic_and_multilingual() {
        let mut s = spec(2);
        s.label = [("de", "Haus"), ("fr", "maison"), ("it", "casa"), ("en", "house")].into_iter().collect();
        let a = build_book(&s).unwrap().to_json();
        let b = build_book(&s).unwrap().to_json();
        assert_eq!(a, b);
        let m = build_book(&s).unwrap();
        assert_eq!(m.label.languages().collect::<Vec<_>>(), ["de", "fr", "it", "en"]);
    }

    #[test]
    fn http_base_fails_validation() {
        let mut s = spec(1);
        s.base_id = "http://example.org/x".into();
        assert!(matches!(build_single_image(&s), Err(BuildError::Invalid(_))));
    }
}
