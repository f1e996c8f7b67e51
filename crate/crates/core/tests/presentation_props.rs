use std::collections::BTreeSet;

use iiif_core::builder::{attach_annotations, build_book, build_single_image, BuildSpec, ImageSpec, PageSource};
use iiif_core::conformance::detect_patterns;
use iiif_core::presentation::{
    Agent, Annotation, AnnotationPage, ContentResource, Extra, LanguageMap, Manifest, Motivation, SeeAlsoRef, Target,
};
use iiif_core::request::{Scheme, ServiceRoot};
use proptest::prelude::*;

const LANGS: [&str; 5] = ["en", "de", "fr", "it", "none"];

fn language_map(max_langs: usize) -> impl Strategy<Value = LanguageMap> {
    proptest::sample::subsequence(LANGS.to_vec(), 1..=max_langs).prop_flat_map(|langs| {
        proptest::collection::vec(proptest::collection::vec("[A-Za-z0-9 äöüé'\"&<>]{1,16}", 1..3), langs.len())
            .prop_map(move |values| {
                let mut m = LanguageMap::new();
                for (lang, v) in langs.iter().zip(values) {
                    m.insert(lang, v);
                }
                m
            })
    })
}

#[derive(Debug, Clone)]
struct Plan {
    label: LanguageMap,
    summary: Option<LanguageMap>,
    dims: Vec<(u32, u32)>,
    providers: bool,
    see_also: bool,
    tags: Vec<(usize, u32, u32)>,
}

fn plan() -> impl Strategy<Value = Plan> {
    (
        language_map(3),
        proptest::option::of(language_map(2)),
        proptest::collection::vec((1u32..6000, 1u32..6000), 1..5),
        any::<bool>(),
        any::<bool>(),
        proptest::collection::vec((0usize..4, 0u32..100, 0u32..100), 0..4),
    )
        .prop_map(|(label, summary, dims, providers, see_also, tags)| Plan {
            label,
            summary,
            dims,
            providers,
            see_also,
            tags,
        })
}

fn build(plan: &Plan) -> Manifest {
    let root = ServiceRoot::new(Scheme::Https, "images.example.org", Some("iiif"));
    let images = plan
        .dims
        .iter()
        .enumerate()
        .map(|(i, &(w, h))| ImageSpec::new(root.base_for(&format!("img {i}")), w, h))
        .collect();
    let mut spec = BuildSpec::new("https://example.org/iiif/obj", plan.label.clone(), images);
    spec.summary = plan.summary.clone();
    spec.paged = plan.dims.len() > 1;
    if plan.providers {
        let mut a = Agent::new("https://example.org/about", LanguageMap::single("en", "Example Archive"));
        a.homepage.push(ContentResource {
            id: Some("https://example.org/".into()),
            kind: "Text".into(),
            label: Some(LanguageMap::single("en", "Home")),
            format: Some("text/html".into()),
            ..Default::default()
        });
        spec.providers.push(a);
    }
    if plan.see_also {
        spec.see_also.push(SeeAlsoRef::dataset(
            "https://example.org/mods/obj.xml",
            LanguageMap::single("en", "MODS metadata"),
            "text/xml",
            "http://www.loc.gov/mods/v3",
        ));
    }
    let mut m = if plan.dims.len() == 1 { build_single_image(&spec) } else { build_book(&spec) }.unwrap();
    for (k, &(idx, px, py)) in plan.tags.iter().enumerate() {
        let idx = idx % m.items.len();
        let canvas = &m.items[idx];
        let (w, h) = (canvas.width.unwrap(), canvas.height.unwrap());
        let (x, y) = (px * (w - 1) / 100, py * (h - 1) / 100);
        let page_id = format!("{}/tags/{k}", canvas.id);
        let ann = Annotation {
            id: format!("{page_id}/1"),
            motivation: Motivation::Tagging,
            label: None,
            body: Some(ContentResource::textual_body(format!("tag {k}"), "text/plain")),
            target: Target::Uri(format!("{}#xywh={x},{y},1,1", canvas.id)),
            extra: Extra::new(),
        };
        m = attach_annotations(m, idx, PageSource::Embedded(AnnotationPage::embedded(page_id, vec![ann]))).unwrap();
    }
    m
}

fn expected_patterns(plan: &Plan) -> BTreeSet<String> {
    let mut out = BTreeSet::from(["0005-image-service".to_string()]);
    if plan.dims.len() == 1 {
        out.insert("0001-mvm-image".into());
    } else {
        out.insert("0009-book-1".into());
    }
    if plan.label.len() >= 2 || plan.summary.as_ref().is_some_and(|s| s.len() >= 2) {
        out.insert("0006-text-language".into());
    }
    if plan.providers {
        out.insert("0234-provider".into());
    }
    if plan.see_also {
        out.insert("0053-seeAlso".into());
    }
    if !plan.tags.is_empty() {
        out.insert("0269-embedded-or-referenced-annotations".into());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn built_manifests_round_trip_byte_for_byte(plan in plan()) {
        let m = build(&plan);
        let json = m.to_json();
        let back = Manifest::from_json(&json).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_json(), json);
    }

    #[test]
    fn built_manifests_validate_and_detect_exactly(plan in plan()) {
        let m = build(&plan);
        prop_assert_eq!(m.validate(), vec![]);
        prop_assert_eq!(detect_patterns(&m), expected_patterns(&plan));
    }

    #[test]
    fn unknown_members_survive(key in "x[a-z]{1,8}", value in "[a-z0-9]{0,12}") {
        let mut v = build(&Plan {
            label: LanguageMap::single("en", "t"),
            summary: None,
            dims: vec![(10, 10)],
            providers: false,
            see_also: false,
            tags: vec![],
        })
        .to_value();
        v.as_object_mut().unwrap().insert(key.clone(), serde_json::Value::String(value.clone()));
        v["items"][0].as_object_mut().unwrap().insert(key.clone(), serde_json::json!({"n": [value.clone()]}));
        let m = Manifest::from_value(&v).unwrap();
        prop_assert_eq!(m.to_value(), v);
    }
}

#[test]
fn four_language_record_is_internationalized() {
    let label = LanguageMap::single("de", "Fasnacht in Basel")
        .with("fr", "Carnaval de Bâle")
        .with("it", "Carnevale di Basilea")
        .with("en", "Basel carnival");
    let plan = Plan { label, summary: None, dims: vec![(800, 600)], providers: false, see_also: false, tags: vec![] };
    let m = build(&plan);
    let found = detect_patterns(&m);
    assert!(found.contains("0006-text-language"), "{found:?}");
    assert_eq!(found, expected_patterns(&plan));
}
