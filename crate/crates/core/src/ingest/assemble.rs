use std::collections::BTreeMap;

use super::enrich::EnrichedRecord;
use super::IngestError;
use crate::builder::{attach_annotations, build_book, build_single_image, BuildError, BuildSpec, ImageSpec, PageSource};
use crate::limits::ComplianceLevel;
use crate::presentation::{
    Agent, Annotation, AnnotationPage, Collection, CollectionItem, ContentResource, Extra, LanguageMap, Manifest,
    MetadataEntry, Motivation, SeeAlsoRef, Target,
};
use crate::request::encode_identifier;

/// Settings shared by every assembled resource.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembleConfig {
    /// Prefix of every minted id, e.g. `https://iiif.example.org/presentation`.
    pub presentation_base: String,
    pub providers: Vec<Agent>,
    pub see_also: Vec<SeeAlsoRef>,
    pub profile: ComplianceLevel,
}

impl AssembleConfig {
    pub fn new(presentation_base: impl Into<String>) -> Self {
        AssembleConfig {
            presentation_base: presentation_base.into().trim_end_matches('/').to_string(),
            providers: Vec::new(),
            see_also: Vec::new(),
            profile: ComplianceLevel::Level2,
        }
    }

    pub fn record_base(&self, slug: &str, record_id: &str) -> String {
        format!("{}/{}/{}", self.presentation_base, encode_identifier(slug), encode_identifier(record_id))
    }

    pub fn manifest_id(&self, slug: &str, record_id: &str) -> String {
        format!("{}/manifest", self.record_base(slug, record_id))
    }

    pub fn collection_id(&self, slug: &str) -> String {
        format!("{}/{}/collection", self.presentation_base, encode_identifier(slug))
    }
}

/// One manifest per record: a single image or a paged book, with one
/// embedded tagging page per annotator on each canvas.
pub fn assemble(rec: &EnrichedRecord, cfg: &AssembleConfig) -> Result<Manifest, BuildError> {
    let r = &rec.record;
    let base = cfg.record_base(&r.collection_slug, &r.record_id);
    let rights_uri = r.rights.as_deref().filter(|s| url::Url::parse(s).is_ok());
    let spec = BuildSpec {
        base_id: base.clone(),
        label: r.titles.clone(),
        summary: r.descriptions.clone(),
        rights: rights_uri.map(str::to_string),
        images: rec
            .images
            .iter()
            .map(|img| ImageSpec {
                profile: cfg.profile,
                ..ImageSpec::new(img.service.clone(), img.dimensions.width, img.dimensions.height)
            })
            .collect(),
        providers: cfg.providers.clone(),
        see_also: cfg.see_also.clone(),
        paged: rec.images.len() > 1,
        ..Default::default()
    };
    let mut m = if rec.images.len() == 1 { build_single_image(&spec)? } else { build_book(&spec)? };
    if let (Some(text), None) = (&r.rights, rights_uri) {
        m.required_statement =
            Some(MetadataEntry::new(LanguageMap::single("en", "Rights"), LanguageMap::none(text.clone())));
    }
    for (i, img) in rec.images.iter().enumerate() {
        let canvas_id = m.items[i].id.clone();
        let mut by_annotator: BTreeMap<&str, Vec<_>> = BTreeMap::new();
        for a in &img.annotations {
            by_annotator.entry(a.annotator.as_str()).or_default().push(a);
        }
        for (annotator, rows) in by_annotator {
            let page_id = format!("{canvas_id}/annotations/{}", encode_identifier(annotator));
            let items = rows
                .iter()
                .enumerate()
                .map(|(k, a)| Annotation {
                    id: format!("{page_id}/{}", k + 1),
                    motivation: Motivation::Tagging,
                    label: None,
                    body: Some(ContentResource::textual_body(a.label.clone(), "text/plain")),
                    target: Target::Uri(format!("{canvas_id}#{}", a.bbox.xywh())),
                    extra: Extra::new(),
                })
                .collect();
            let mut page = AnnotationPage::embedded(page_id, items);
            page.label = Some(LanguageMap::none(annotator));
            m = attach_annotations(m, i, PageSource::Embedded(page))?;
        }
    }
    Ok(m)
}

/// A collection listing each record's manifest in record order.
pub fn assemble_collection(
    records: &[EnrichedRecord],
    slug: &str,
    cfg: &AssembleConfig,
) -> Result<Collection, IngestError> {
    let mut c = Collection::new(cfg.collection_id(slug), LanguageMap::none(slug));
    for rec in records {
        let r = &rec.record;
        if r.collection_slug != slug {
            return Err(IngestError::SlugMismatch {
                expected: slug.to_string(),
                found: r.collection_slug.clone(),
                record_id: r.record_id.clone(),
            });
        }
        c.items.push(CollectionItem::manifest(cfg.manifest_id(slug, &r.record_id), r.titles.clone()));
    }
    Ok(c)
}
