//! Cookbook recipe detection and viewer support reporting.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use serde::Serialize;

use crate::presentation::{LanguageMap, Manifest, Motivation};

/// The viewer matrix as published in September 2022.
pub const BUILTIN_MATRIX: &str = include_str!("../data/cookbook-matrix-2022-09.tsv");

/// Structural predicates with a detector implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detector {
    SingleImage,
    Book,
    DeepViewing,
    Internationalization,
    Providers,
    SeeAlso,
    Annotations,
}

impl Detector {
    pub fn matches(self, m: &Manifest) -> bool {
        match self {
            Detector::SingleImage => {
                m.items.len() == 1
                    && m.items[0]
                        .painting_annotations()
                        .all(|a| a.body.as_ref().is_some_and(|b| b.kind == "Image"))
            }
            Detector::Book => m.items.len() > 1 && m.behavior.iter().any(|b| b == "paged"),
            Detector::DeepViewing => m.items.iter().flat_map(|c| c.painting_annotations()).any(|a| {
                a.motivation == Motivation::Painting
                    && a.body.as_ref().is_some_and(|b| {
                        b.service.iter().any(|s| {
                            let t = s.kind.as_deref().or_else(|| s.extra.get("@type").and_then(|v| v.as_str()));
                            t.is_some_and(|t| t.starts_with("ImageService"))
                        })
                    })
            }),
            Detector::Internationalization => {
                let multi = |l: &LanguageMap| l.len() >= 2;
                multi(&m.label)
                    || m.summary.as_ref().is_some_and(multi)
                    || m.metadata.iter().any(|e| multi(&e.label) || multi(&e.value))
            }
            Detector::Providers => !m.provider.is_empty(),
            Detector::SeeAlso => m.see_also.iter().any(|s| s.kind == "Dataset"),
            Detector::Annotations => {
                !m.annotations.is_empty() || m.items.iter().any(|c| !c.annotations.is_empty())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecipePattern {
    pub id: String,
    pub title: String,
    pub detector: Option<Detector>,
}

const BUILTIN_RECIPES: &[(&str, &str, Option<Detector>)] = &[
    ("0001-mvm-image", "Simplest Manifest - Single Image File", Some(Detector::SingleImage)),
    ("0002-mvm-audio", "Simplest Manifest - Audio", None),
    ("0003-mvm-video", "Simplest Manifest - Video", None),
    ("0004-canvas-size", "Image and Canvas with Differing Dimensions", None),
    ("0005-image-service", "Support Deep Viewing with Basic Use of a IIIF Image Service", Some(Detector::DeepViewing)),
    ("0006-text-language", "Internationalization and Multi-language Values", Some(Detector::Internationalization)),
    ("0007-string-formats", "Embedding HTML in descriptive properties", None),
    ("0008-rights", "Rights statement", None),
    ("0009-book-1", "Simple Manifest - Book", Some(Detector::Book)),
    ("0010-book-2-viewing-direction", "Viewing direction and Its Effect on Navigation", None),
    ("0011-book-3-behavior", "Book 'behavior' Variations", None),
    ("0013-placeholderCanvas", "Load a Preview Image Before the Main Content", None),
    ("0014-accompanyingcanvas", "Audio Presentation with Accompanying Image", None),
    ("0015-start", "Begin playback at a specific point", None),
    ("0017-transcription-av", "Providing Access to Transcript Files of A/V Content", None),
    ("0019-html-in-annotations", "HTML in Annotations", None),
    ("0021-tagging", "Simple Annotation - Tagging", None),
    ("0022-linking-with-a-hotspot", "Linking external Web page from an Image with a Hotspot", None),
    ("0024-book-4-toc", "Table of Contents for Book Chapters", None),
    ("0026-toc-opera", "Table of Contents for Multiple A/V Files on a Single Canvas", None),
    ("0029-metadata-anywhere", "Metadata on any Resource", None),
    ("0030-multi-volume", "Multi-volume Work with Individually-bound Volumes", None),
    ("0031-bound-multivolume", "Multiple Volumes in a Single Bound Volume", None),
    ("0032-collection", "Simple Collection", None),
    ("0033-choice", "Choice of Alternative Representations of Images", None),
    ("0035-foldouts", "Foldouts, Flaps, and Maps", None),
    ("0036-composition-from-multiple-images", "Composition from Multiple Images", None),
    ("0040-image-rotation-service", "Image Rotation Two Ways", None),
    ("0046-rendering", "Providing Alternative Representations", None),
    ("0047-homepage", "Linking to Web Page of an Object", None),
    ("0053-seeAlso", "Linking to Structured Metadata", Some(Detector::SeeAlso)),
    ("0065-opera-multiple-canvases", "Opera Performance on Multiple Canvases", None),
    ("0074-multiple-language-captions", "Using Caption and Subtitle Files in Multiple Languages", None),
    ("0117-add-image-thumbnail", "Image Thumbnail for Manifest", None),
    ("0118-multivalue", "Displaying Multiple Values with Language Maps", None),
    ("0139-geolocate-canvas-fragment", "Locate a Canvas Fragment on a Map", None),
    ("0154-geo-extension", "Locate Manifests on a Web Map", None),
    ("0219-using-caption-file", "Using Caption and Subtitle Files", None),
    ("0230-navdate", "Navigation by Chronology", None),
    ("0234-provider", "Acknowledge Content Contributors", Some(Detector::Providers)),
    ("0266-full-canvas-annotation", "Simplest Annotation", None),
    ("0269-embedded-or-referenced-annotations", "Embedded or Referenced Annotations", Some(Detector::Annotations)),
];

/// Registered recipe patterns, in registration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    patterns: Vec<RecipePattern>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { patterns: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        for &(id, title, detector) in BUILTIN_RECIPES {
            r.register(RecipePattern { id: id.into(), title: title.into(), detector })
                .expect("builtin slugs are unique");
        }
        r
    }

    pub fn register(&mut self, pattern: RecipePattern) -> Result<(), ConformanceError> {
        if self.get(&pattern.id).is_some() {
            return Err(ConformanceError::DuplicatePattern { id: pattern.id, line: None });
        }
        self.patterns.push(pattern);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&RecipePattern> {
        self.patterns.iter().find(|p| p.id == id)
    }

    pub fn patterns(&self) -> &[RecipePattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Ids of every pattern whose detector matches `m`.
    pub fn detect(&self, m: &Manifest) -> BTreeSet<String> {
        self.patterns
            .iter()
            .filter(|p| p.detector.is_some_and(|d| d.matches(m)))
            .map(|p| p.id.clone())
            .collect()
    }
}

/// Detects patterns with the built-in registry.
pub fn detect_patterns(m: &Manifest) -> BTreeSet<String> {
    Registry::builtin().detect(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportLevel {
    Yes,
    Partial,
    No,
}

impl SupportLevel {
    pub fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_lowercase().as_str() {
            "yes" => Some(SupportLevel::Yes),
            "partial" => Some(SupportLevel::Partial),
            "no" => Some(SupportLevel::No),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SupportLevel::Yes => "yes",
            SupportLevel::Partial => "partial",
            SupportLevel::No => "no",
        }
    }
}

impl fmt::Display for SupportLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConformanceError {
    #[error("matrix has no header row")]
    MissingHeader,
    #[error("duplicate pattern {id}{}", .line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    DuplicatePattern { id: String, line: Option<usize> },
    #[error("unknown support token {token:?} on line {line}")]
    UnknownSupportToken { token: String, line: usize },
    #[error("line {line} has {found} cells for {expected} viewers")]
    TooManyCells { line: usize, found: usize, expected: usize },
    #[error("pattern {0} is not in the matrix")]
    UnknownPattern(String),
}

/// Viewer support per pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewerMatrix {
    pub viewers: Vec<String>,
    pub as_of: Option<String>,
    rows: IndexMap<String, Vec<SupportLevel>>,
    pub warnings: Vec<String>,
}

impl ViewerMatrix {
    pub fn builtin() -> Self {
        load_matrix(BUILTIN_MATRIX).expect("builtin matrix parses")
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn row(&self, pattern: &str) -> Option<&[SupportLevel]> {
        self.rows.get(pattern).map(Vec::as_slice)
    }

    pub fn cell(&self, pattern: &str, viewer: &str) -> Option<SupportLevel> {
        let col = self.viewers.iter().position(|v| v == viewer)?;
        self.row(pattern).map(|r| r[col])
    }

    pub fn set(&mut self, pattern: &str, viewer: &str, level: SupportLevel) -> bool {
        let Some(col) = self.viewers.iter().position(|v| v == viewer) else { return false };
        match self.rows.get_mut(pattern) {
            Some(row) => {
                row[col] = level;
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.rows.values().map(Vec::len).sum()
    }
}

/// Parses the tab-separated matrix format: `#` comment lines (one may read
/// `# as_of: <date>`), a header `recipe<TAB>viewer...`, then one row per
/// pattern. Short rows are padded with `no` and reported in `warnings`.
pub fn load_matrix(text: &str) -> Result<ViewerMatrix, ConformanceError> {
    let mut viewers: Option<Vec<String>> = None;
    let mut as_of = None;
    let mut rows = IndexMap::new();
    let mut warnings = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.trim_start().strip_prefix('#') {
            if let Some(date) = comment.trim().strip_prefix("as_of:") {
                as_of = Some(date.trim().to_string());
            }
            continue;
        }
        let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
        let Some(names) = &viewers else {
            viewers = Some(cells[1..].iter().map(|s| s.to_string()).collect());
            continue;
        };
        let slug = cells[0].to_string();
        let given = &cells[1..];
        if given.len() > names.len() {
            return Err(ConformanceError::TooManyCells { line: line_no, found: given.len(), expected: names.len() });
        }
        let mut row = Vec::with_capacity(names.len());
        for token in given {
            let level = SupportLevel::parse(token).ok_or_else(|| ConformanceError::UnknownSupportToken {
                token: token.to_string(),
                line: line_no,
            })?;
            row.push(level);
        }
        for viewer in &names[given.len()..] {
            warnings.push(format!("line {line_no}: no cell for {slug} / {viewer}, assuming no"));
            row.push(SupportLevel::No);
        }
        if rows.insert(slug.clone(), row).is_some() {
            return Err(ConformanceError::DuplicatePattern { id: slug, line: Some(line_no) });
        }
    }
    let viewers = viewers.ok_or(ConformanceError::MissingHeader)?;
    Ok(ViewerMatrix { viewers, as_of, rows, warnings })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub pattern: String,
    pub support: Vec<SupportLevel>,
    pub unsupported: bool,
    pub unsupported_strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViewerCounts {
    pub viewer: String,
    pub yes: usize,
    pub partial: usize,
    pub no: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    pub as_of: Option<String>,
    pub viewers: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub patterns_detected: usize,
    pub per_viewer: Vec<ViewerCounts>,
    /// Patterns with `no` from every viewer.
    pub unsupported_everywhere: usize,
    pub unsupported_percent: u32,
    /// Patterns with no `yes` from any viewer.
    pub unsupported_strict: usize,
    pub unsupported_strict_percent: u32,
}

/// `round(100 * count / total)`, halves rounded up; zero when `total` is 0.
pub fn percent(count: usize, total: usize) -> u32 {
    if total == 0 {
        return 0;
    }
    ((200 * count + total) / (2 * total)) as u32
}

/// Report rows follow matrix order. Every pattern must be in the matrix.
pub fn support_report<'a, I>(patterns: I, matrix: &ViewerMatrix) -> Result<SupportReport, ConformanceError>
where
    I: IntoIterator<Item = &'a str>,
{
    let wanted: HashSet<&str> = patterns.into_iter().collect();
    if let Some(missing) = wanted.iter().filter(|p| matrix.row(p).is_none()).min() {
        return Err(ConformanceError::UnknownPattern(missing.to_string()));
    }
    let rows: Vec<ReportRow> = matrix
        .rows
        .iter()
        .filter(|(id, _)| wanted.contains(id.as_str()))
        .map(|(id, support)| ReportRow {
            pattern: id.clone(),
            support: support.clone(),
            unsupported: support.iter().all(|&s| s == SupportLevel::No),
            unsupported_strict: support.iter().all(|&s| s != SupportLevel::Yes),
        })
        .collect();
    let per_viewer = matrix
        .viewers
        .iter()
        .enumerate()
        .map(|(col, viewer)| {
            let count = |level| rows.iter().filter(|r| r.support[col] == level).count();
            ViewerCounts {
                viewer: viewer.clone(),
                yes: count(SupportLevel::Yes),
                partial: count(SupportLevel::Partial),
                no: count(SupportLevel::No),
            }
        })
        .collect();
    let total = rows.len();
    let unsupported = rows.iter().filter(|r| r.unsupported).count();
    let strict = rows.iter().filter(|r| r.unsupported_strict).count();
    Ok(SupportReport {
        as_of: matrix.as_of.clone(),
        viewers: matrix.viewers.clone(),
        patterns_detected: total,
        per_viewer,
        unsupported_everywhere: unsupported,
        unsupported_percent: percent(unsupported, total),
        unsupported_strict: strict,
        unsupported_strict_percent: percent(strict, total),
        rows,
    })
}

impl SupportReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.rows.iter().map(|r| r.pattern.len()).max().unwrap_or(7).max(7);
        let _ = write!(out, "{:width$}", "pattern");
        for v in &self.viewers {
            let _ = write!(out, "  {v}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:width$}", r.pattern);
            for (v, s) in self.viewers.iter().zip(&r.support) {
                let _ = write!(out, "  {:w$}", s.as_str(), w = v.len());
            }
            out.push('\n');
        }
        let _ = writeln!(out, "patterns: {}", self.patterns_detected);
        for c in &self.per_viewer {
            let _ = writeln!(out, "{}: {} yes, {} partial, {} no", c.viewer, c.yes, c.partial, c.no);
        }
        let _ = writeln!(
            out,
            "unsupported by every viewer: {} ({}%)",
            self.unsupported_everywhere, self.unsupported_percent
        );
        let _ = writeln!(
            out,
            "unsupported counting partial as unsupported: {} ({}%)",
            self.unsupported_strict, self.unsupported_strict_percent
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_matrix_aggregates() {
        let matrix = ViewerMatrix::builtin();
        assert_eq!(matrix.len(), 42);
        assert_eq!(matrix.cell_count(), 126);
        assert_eq!(matrix.viewers, ["Mirador", "Universal Viewer", "Annona"]);
        assert_eq!(matrix.as_of.as_deref(), Some("2022-09"));
        assert!(matrix.warnings.is_empty());
        let report = support_report(matrix.patterns(), &matrix).unwrap();
        assert_eq!(report.unsupported_everywhere, 8);
        assert_eq!(report.unsupported_percent, 19);
        assert_eq!(report.unsupported_strict, 9);
    }

    #[test]
    fn registry_matches_matrix() {
        let reg = Registry::builtin();
        let matrix = ViewerMatrix::builtin();
        assert_eq!(reg.patterns().iter().map(|p| p.id.as_str()).collect::<Vec<_>>(), matrix.patterns().collect::<Vec<_>>());
        assert_eq!(reg.patterns().iter().filter(|p| p.detector.is_some()).count(), 7);
    }

    #[test]
    fn load_errors() {
        let bad = "recipe\tA\tB\nx\tyes\tmaybe\n";
        assert_eq!(
            load_matrix(bad),
            Err(ConformanceError::UnknownSupportToken { token: "maybe".into(), line: 2 })
        );
        let dup = "recipe\tA\nx\tyes\nx\tno\n";
        assert!(matches!(load_matrix(dup), Err(ConformanceError::DuplicatePattern { line: Some(3), .. })));
        assert_eq!(load_matrix("# only\n"), Err(ConformanceError::MissingHeader));
    }

    #[test]
    fn missing_cells_default_to_no() {
        let m = load_matrix("recipe\tA\tB\nx\tyes\n").unwrap();
        assert_eq!(m.row("x"), Some(&[SupportLevel::Yes, SupportLevel::No][..]));
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn report_edge_cases() {
        let m = load_matrix("recipe\tA\tB\tC\nx\tyes\tyes\tyes\n").unwrap();
        let empty = support_report(std::iter::empty(), &m).unwrap();
        assert_eq!((empty.rows.len(), empty.unsupported_everywhere, empty.unsupported_percent), (0, 0, 0));
        let one = support_report(["x"], &m).unwrap();
        assert_eq!(one.unsupported_everywhere, 0);
        assert_eq!(support_report(["y"], &m), Err(ConformanceError::UnknownPattern("y".into())));
    }

    #[test]
    fn percent_rounds_half_up() {
        assert_eq!(percent(8, 42), 19);
        assert_eq!(percent(9, 42), 21);
        assert_eq!(percent(1, 8), 13);
        assert_eq!(percent(1, 200), 1);
        assert_eq!(percent(0, 5), 0);
    }

    #[test]
    fn report_text_mentions_aggregates() {
        let matrix = ViewerMatrix::builtin();
        let text = support_report(matrix.patterns(), &matrix).unwrap().to_text();
        assert!(text.contains("unsupported by every viewer: 8 (19%)"));
        assert!(text.contains("unsupported counting partial as unsupported: 9 (21%)"));
    }
}
