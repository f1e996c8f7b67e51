//! Structural checks over typed resources. Violations are data, each with a
//! rule id and the JSON path of the offending node.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::language::LanguageMap;
use super::model::*;
use super::PRESENTATION_CONTEXT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    ContextMissing,
    InvalidUri,
    EmptyLanguageMap,
    ManifestIdNotHttps,
    ManifestItemsEmpty,
    DuplicateCanvasId,
    CanvasDimensionPair,
    CanvasExtentMissing,
    NonPositiveExtent,
    PaintingTargetMismatch,
    PaintingBody,
    MalformedFragment,
    TargetFragmentOutOfBounds,
    RangeCycle,
    RangeCanvasUnresolved,
    AgentIncomplete,
    SeeAlsoIncomplete,
    CollectionItemIncomplete,
    BehaviorConflict,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::ContextMissing => "ContextMissing",
            Rule::InvalidUri => "InvalidUri",
            Rule::EmptyLanguageMap => "EmptyLanguageMap",
            Rule::ManifestIdNotHttps => "ManifestIdNotHttps",
            Rule::ManifestItemsEmpty => "ManifestItemsEmpty",
            Rule::DuplicateCanvasId => "DuplicateCanvasId",
            Rule::CanvasDimensionPair => "CanvasDimensionPair",
            Rule::CanvasExtentMissing => "CanvasExtentMissing",
            Rule::NonPositiveExtent => "NonPositiveExtent",
            Rule::PaintingTargetMismatch => "PaintingTargetMismatch",
            Rule::PaintingBody => "PaintingBody",
            Rule::MalformedFragment => "MalformedFragment",
            Rule::TargetFragmentOutOfBounds => "TargetFragmentOutOfBounds",
            Rule::RangeCycle => "RangeCycle",
            Rule::RangeCanvasUnresolved => "RangeCanvasUnresolved",
            Rule::AgentIncomplete => "AgentIncomplete",
            Rule::SeeAlsoIncomplete => "SeeAlsoIncomplete",
            Rule::CollectionItemIncomplete => "CollectionItemIncomplete",
            Rule::BehaviorConflict => "BehaviorConflict",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub path: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.rule, self.path, self.detail)
    }
}

/// Behavior values that may not appear together on one resource.
const EXCLUSIVE_BEHAVIORS: &[&[&str]] = &[
    &["auto-advance", "no-auto-advance"],
    &["repeat", "no-repeat"],
    &["unordered", "individuals", "continuous", "paged"],
    &["facing-pages", "non-paged"],
    &["multi-part", "together"],
    &["sequence", "thumbnail-nav", "no-nav"],
];

/// Behavior values with a defined meaning. Others are accepted as
/// extensions.
pub const KNOWN_BEHAVIORS: &[&str] = &[
    "auto-advance", "no-auto-advance", "repeat", "no-repeat", "unordered", "individuals", "continuous",
    "paged", "facing-pages", "non-paged", "multi-part", "together", "sequence", "thumbnail-nav", "no-nav",
    "hidden",
];

/// A rectangle parsed from an `xywh=` media fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentRect {
    pub percent: bool,
    pub x: u64,
    pub y: u64,
    pub w: u64,
    pub h: u64,
}

/// Parses `xywh=[pixel:|percent:]x,y,w,h`. Returns `None` for fragments
/// of another kind and `Some(Err)` for a malformed `xywh`.
pub fn parse_xywh(fragment: &str) -> Option<Result<FragmentRect, String>> {
    let rest = fragment.strip_prefix("xywh=")?;
    let (percent, nums) = if let Some(r) = rest.strip_prefix("percent:") {
        (true, r)
    } else {
        (false, rest.strip_prefix("pixel:").unwrap_or(rest))
    };
    let parts: Vec<_> = nums.split(',').collect();
    let parsed: Option<Vec<u64>> = parts
        .iter()
        .map(|p| (!p.is_empty() && p.bytes().all(|b| b.is_ascii_digit())).then(|| p.parse().ok()).flatten())
        .collect();
    Some(match parsed.as_deref() {
        Some(&[x, y, w, h]) if w > 0 && h > 0 => Ok(FragmentRect { percent, x, y, w, h }),
        Some(&[_, _, _, _]) => Err(format!("{fragment:?} has an empty extent")),
        _ => Err(format!("{fragment:?} is not xywh=x,y,w,h")),
    })
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, rule: Rule, path: impl Into<String>, detail: impl Into<String>) {
        self.out.push(Violation { rule, path: path.into(), detail: detail.into() });
    }

    fn uri(&mut self, s: &str, path: &str) {
        if url::Url::parse(s).is_err() {
            self.push(Rule::InvalidUri, path, format!("{s:?} is not an absolute URI"));
        }
    }

    fn lang(&mut self, m: &LanguageMap, path: &str) {
        if !m.is_well_formed() {
            self.push(Rule::EmptyLanguageMap, path, "language map needs a language with at least one value");
        }
    }

    fn opt_lang(&mut self, m: Option<&LanguageMap>, path: &str) {
        if let Some(m) = m {
            self.lang(m, path);
        }
    }

    fn context(&mut self, ctx: &Context) {
        let ok = match &ctx.0 {
            serde_json::Value::String(s) => s == PRESENTATION_CONTEXT,
            serde_json::Value::Array(a) => a.iter().any(|v| v.as_str() == Some(PRESENTATION_CONTEXT)),
            _ => false,
        };
        if !ok {
            self.push(Rule::ContextMissing, "$.@context", format!("must include {PRESENTATION_CONTEXT}"));
        }
    }

    fn metadata(&mut self, entries: &[MetadataEntry], path: &str) {
        for (i, e) in entries.iter().enumerate() {
            self.lang(&e.label, &format!("{path}[{i}].label"));
            self.lang(&e.value, &format!("{path}[{i}].value"));
        }
    }

    fn resource(&mut self, r: &ContentResource, path: &str) {
        if let Some(id) = &r.id {
            self.uri(id, &format!("{path}.id"));
        }
        self.opt_lang(r.label.as_ref(), &format!("{path}.label"));
        if r.width == Some(0) || r.height == Some(0) {
            self.push(Rule::NonPositiveExtent, path, "width and height must be positive");
        }
    }

    fn resources(&mut self, rs: &[ContentResource], path: &str) {
        for (i, r) in rs.iter().enumerate() {
            self.resource(r, &format!("{path}[{i}]"));
        }
    }

    fn providers(&mut self, agents: &[Agent], path: &str) {
        for (i, a) in agents.iter().enumerate() {
            let p = format!("{path}[{i}]");
            if a.id.is_empty() || a.label.is_empty() {
                self.push(Rule::AgentIncomplete, &p, "provider needs id, type and label");
            } else {
                self.uri(&a.id, &format!("{p}.id"));
                self.lang(&a.label, &format!("{p}.label"));
            }
            self.resources(&a.homepage, &format!("{p}.homepage"));
            self.resources(&a.logo, &format!("{p}.logo"));
        }
    }

    fn see_also(&mut self, refs: &[SeeAlsoRef], path: &str) {
        for (i, s) in refs.iter().enumerate() {
            let p = format!("{path}[{i}]");
            if s.id.is_empty() || s.kind.is_empty() {
                self.push(Rule::SeeAlsoIncomplete, &p, "seeAlso needs id and type");
            } else {
                self.uri(&s.id, &format!("{p}.id"));
            }
            self.opt_lang(s.label.as_ref(), &format!("{p}.label"));
        }
    }

    fn behavior(&mut self, values: &[String], path: &str) {
        for group in EXCLUSIVE_BEHAVIORS {
            let present: Vec<&str> =
                group.iter().copied().filter(|g| values.iter().any(|v| v == g)).collect();
            if present.len() > 1 {
                self.push(Rule::BehaviorConflict, path, format!("{} cannot be combined", present.join(", ")));
            }
        }
    }

    /// Checks an `xywh` fragment on `target` against the canvas it names.
    fn fragment(&mut self, target: &Target, canvases: &HashMap<&str, (Option<u32>, Option<u32>)>, path: &str) {
        let Some(frag) = target.fragment() else { return };
        let Some(parsed) = parse_xywh(frag) else { return };
        let rect = match parsed {
            Ok(r) => r,
            Err(e) => return self.push(Rule::MalformedFragment, path, e),
        };
        let (bw, bh) = if rect.percent {
            (100, 100)
        } else {
            match target.source().and_then(|s| canvases.get(s)) {
                Some(&(Some(w), Some(h))) => (u64::from(w), u64::from(h)),
                _ => return,
            }
        };
        if rect.x + rect.w > bw || rect.y + rect.h > bh {
            self.push(
                Rule::TargetFragmentOutOfBounds,
                path,
                format!("{frag} exceeds {bw}x{bh}"),
            );
        }
    }

    fn annotation_pages(
        &mut self,
        pages: &[AnnotationPage],
        canvases: &HashMap<&str, (Option<u32>, Option<u32>)>,
        path: &str,
    ) {
        for (i, page) in pages.iter().enumerate() {
            let pp = format!("{path}[{i}]");
            self.uri(&page.id, &format!("{pp}.id"));
            self.opt_lang(page.label.as_ref(), &format!("{pp}.label"));
            for (j, a) in page.annotations().iter().enumerate() {
                let ap = format!("{pp}.items[{j}]");
                self.uri(&a.id, &format!("{ap}.id"));
                self.opt_lang(a.label.as_ref(), &format!("{ap}.label"));
                if let Some(body) = &a.body {
                    self.resource(body, &format!("{ap}.body"));
                }
                self.fragment(&a.target, canvases, &format!("{ap}.target"));
            }
        }
    }

    fn canvas(&mut self, c: &Canvas, canvases: &HashMap<&str, (Option<u32>, Option<u32>)>, path: &str) {
        self.uri(&c.id, &format!("{path}.id"));
        self.opt_lang(c.label.as_ref(), &format!("{path}.label"));
        match (c.width, c.height) {
            (Some(_), None) | (None, Some(_)) => {
                self.push(Rule::CanvasDimensionPair, path, "width and height must be given together")
            }
            (None, None) if c.duration.is_none() => {
                self.push(Rule::CanvasExtentMissing, path, "needs width and height, or duration")
            }
            _ => {}
        }
        if c.width == Some(0) || c.height == Some(0) || c.duration.is_some_and(|d| d.is_nan() || d <= 0.0) {
            self.push(Rule::NonPositiveExtent, path, "dimensions and duration must be positive");
        }
        self.metadata(&c.metadata, &format!("{path}.metadata"));
        self.resources(&c.thumbnail, &format!("{path}.thumbnail"));
        for (i, page) in c.items.iter().enumerate() {
            for (j, a) in page.annotations().iter().enumerate() {
                let ap = format!("{path}.items[{i}].items[{j}]");
                if a.motivation != Motivation::Painting {
                    continue;
                }
                if a.target.source() != Some(c.id.as_str()) {
                    self.push(Rule::PaintingTargetMismatch, &ap, format!("painting annotation must target {}", c.id));
                }
                let body_ok = a.body.as_ref().is_some_and(|b| {
                    b.id.as_deref().is_some_and(|id| !id.is_empty())
                        && matches!(b.kind.as_str(), "Image" | "Video" | "Sound")
                });
                if !body_ok {
                    self.push(Rule::PaintingBody, &ap, "painting body must be an Image, Video or Sound with an id");
                }
            }
        }
        self.annotation_pages(&c.items, canvases, &format!("{path}.items"));
        self.annotation_pages(&c.annotations, canvases, &format!("{path}.annotations"));
    }

    fn ranges(&mut self, m: &Manifest) {
        let canvas_ids: HashSet<&str> = m.items.iter().map(|c| c.id.as_str()).collect();
        // child edges by range id, merged over every appearance of the id
        let mut edges: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut first_path: HashMap<&str, String> = HashMap::new();
        let mut stack: Vec<(&Range, String)> =
            m.structures.iter().enumerate().map(|(i, r)| (r, format!("$.structures[{i}]"))).collect();
        while let Some((r, path)) = stack.pop() {
            self.uri(&r.id, &format!("{path}.id"));
            self.opt_lang(r.label.as_ref(), &format!("{path}.label"));
            first_path.entry(r.id.as_str()).or_insert_with(|| path.clone());
            let children = edges.entry(r.id.as_str()).or_default();
            for (i, item) in r.items.iter().enumerate() {
                let ip = format!("{path}.items[{i}]");
                match item {
                    RangeItem::Canvas(c) => {
                        let base = c.id.split_once('#').map_or(c.id.as_str(), |(b, _)| b);
                        if !canvas_ids.contains(base) {
                            self.push(Rule::RangeCanvasUnresolved, &ip, format!("{} is not a canvas of this manifest", c.id));
                        }
                    }
                    RangeItem::Range(child) => {
                        children.push(child.id.as_str());
                        stack.push((child, ip));
                    }
                }
            }
        }
        self.cycles(&edges, &first_path);
    }

    fn cycles(&mut self, edges: &HashMap<&str, Vec<&str>>, paths: &HashMap<&str, String>) {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: HashMap<&str, Mark> = HashMap::new();
        let mut roots: Vec<&str> = edges.keys().copied().collect();
        roots.sort_unstable();
        for root in roots {
            if marks.contains_key(root) {
                continue;
            }
            // iterative DFS keeping the current chain for the report
            let mut chain: Vec<(&str, usize)> = vec![(root, 0)];
            marks.insert(root, Mark::Open);
            while let Some(top) = chain.last_mut() {
                let (node, next) = *top;
                let kids = edges.get(node).map(Vec::as_slice).unwrap_or(&[]);
                if next < kids.len() {
                    let kid = kids[next];
                    top.1 += 1;
                    match marks.get(kid) {
                        Some(Mark::Open) => {
                            let start = chain.iter().position(|&(n, _)| n == kid).unwrap_or(0);
                            let mut ids: Vec<&str> = chain[start..].iter().map(|&(n, _)| n).collect();
                            ids.push(kid);
                            self.push(Rule::RangeCycle, paths[kid].clone(), ids.join(" -> "));
                        }
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(kid, Mark::Open);
                            chain.push((kid, 0));
                        }
                    }
                } else {
                    marks.insert(node, Mark::Done);
                    chain.pop();
                }
            }
        }
    }
}

pub fn validate_manifest(m: &Manifest) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };
    c.context(&m.context);
    c.uri(&m.id, "$.id");
    if !m.id.starts_with("https://") {
        c.push(Rule::ManifestIdNotHttps, "$.id", format!("{} is not an https URI", m.id));
    }
    c.lang(&m.label, "$.label");
    c.opt_lang(m.summary.as_ref(), "$.summary");
    c.metadata(&m.metadata, "$.metadata");
    if let Some(rs) = &m.required_statement {
        c.metadata(std::slice::from_ref(rs), "$.requiredStatement");
    }
    if let Some(rights) = &m.rights {
        c.uri(rights, "$.rights");
    }
    c.providers(&m.provider, "$.provider");
    c.resources(&m.homepage, "$.homepage");
    c.see_also(&m.see_also, "$.seeAlso");
    c.resources(&m.thumbnail, "$.thumbnail");
    c.behavior(&m.behavior, "$.behavior");
    if m.items.is_empty() {
        c.push(Rule::ManifestItemsEmpty, "$.items", "a manifest needs at least one canvas");
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, canvas) in m.items.iter().enumerate() {
        if let Some(first) = seen.insert(canvas.id.as_str(), i) {
            c.push(Rule::DuplicateCanvasId, format!("$.items[{i}].id"), format!("{} repeats $.items[{first}]", canvas.id));
            seen.insert(canvas.id.as_str(), first);
        }
    }
    let dims: HashMap<&str, (Option<u32>, Option<u32>)> =
        m.items.iter().map(|cv| (cv.id.as_str(), (cv.width, cv.height))).collect();
    for (i, canvas) in m.items.iter().enumerate() {
        c.canvas(canvas, &dims, &format!("$.items[{i}]"));
    }
    c.ranges(m);
    c.annotation_pages(&m.annotations, &dims, "$.annotations");
    c.out
}

pub fn validate_collection(col: &Collection) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };
    c.context(&col.context);
    c.uri(&col.id, "$.id");
    c.lang(&col.label, "$.label");
    c.opt_lang(col.summary.as_ref(), "$.summary");
    c.metadata(&col.metadata, "$.metadata");
    c.providers(&col.provider, "$.provider");
    c.see_also(&col.see_also, "$.seeAlso");
    c.resources(&col.thumbnail, "$.thumbnail");
    c.behavior(&col.behavior, "$.behavior");
    for (i, item) in col.items.iter().enumerate() {
        let p = format!("$.items[{i}]");
        if item.id.is_empty() || item.label.is_empty() {
            c.push(Rule::CollectionItemIncomplete, &p, "item references need id, type and label");
        } else {
            c.uri(&item.id, &format!("{p}.id"));
            c.lang(&item.label, &format!("{p}.label"));
        }
        c.resources(&item.thumbnail, &format!("{p}.thumbnail"));
    }
    c.out
}
