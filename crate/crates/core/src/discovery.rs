//! Change discovery: an append-only activity log and the ordered
//! collection views served from it.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SubsecRound, Utc};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const DISCOVERY_CONTEXT: &str = "http://iiif.io/api/discovery/1/context.json";
pub const DEFAULT_PAGE_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActivityType {
    Create,
    Update,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityObject {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActivityEntry {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: ActivityType,
    pub object: ActivityObject,
    pub end_time: DateTime<Utc>,
}

#[derive(Debug, thiserror::Error)]
pub enum ActivityError {
    #[error("activity log {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("activity log {path} line {line}: {detail}")]
    Corrupt { path: PathBuf, line: usize, detail: String },
}

/// Parses log text. A final line without a newline is an append in
/// progress and is skipped.
pub fn parse_log(text: &str, path: &Path) -> Result<Vec<ActivityEntry>, ActivityError> {
    let complete = match text.rfind('\n') {
        Some(end) => &text[..end],
        None => "",
    };
    complete
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ActivityError::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                detail: e.to_string(),
            })
        })
        .collect()
}

/// Reads every complete entry; a missing file is an empty log.
pub fn read_log(path: &Path) -> Result<Vec<ActivityEntry>, ActivityError> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_log(&text, path),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(source) => Err(ActivityError::Io { path: path.to_path_buf(), source }),
    }
}

struct LogState {
    file: File,
    count: usize,
    last: Option<DateTime<Utc>>,
}

/// Writer side of the log. Appends are serialized and each entry is written
/// with a single `write_all` of one line.
pub struct ActivityLog {
    path: PathBuf,
    id_base: String,
    state: Mutex<LogState>,
}

impl ActivityLog {
    /// Opens or creates the log at `path`. Entry ids are minted as
    /// `{id_base}/{n}`.
    pub fn open(path: impl Into<PathBuf>, id_base: impl Into<String>) -> Result<Self, ActivityError> {
        let path = path.into();
        let io_err = |source| ActivityError::Io { path: path.clone(), source };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err)?;
        }
        let existing = read_log(&path)?;
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err)?;
        // drop a torn tail left by a crash so the next entry starts on its own line
        let bytes = std::fs::read(&path).map_err(io_err)?;
        if !bytes.is_empty() && !bytes.ends_with(b"\n") {
            let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            file.set_len(keep as u64).map_err(io_err)?;
        }
        Ok(ActivityLog {
            id_base: id_base.into().trim_end_matches('/').to_string(),
            state: Mutex::new(LogState {
                file,
                count: existing.len(),
                last: existing.iter().map(|e| e.end_time).max(),
            }),
            path,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.state.lock().count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn append(&self, kind: ActivityType, object_id: &str, object_type: &str) -> Result<ActivityEntry, ActivityError> {
        self.append_at(kind, object_id, object_type, Utc::now())
    }

    /// Appends with an explicit clock reading. End times never go backwards:
    /// a reading earlier than the last entry is raised to it.
    pub fn append_at(
        &self,
        kind: ActivityType,
        object_id: &str,
        object_type: &str,
        now: DateTime<Utc>,
    ) -> Result<ActivityEntry, ActivityError> {
        let mut state = self.state.lock();
        let now = now.trunc_subsecs(0);
        let end_time = state.last.map_or(now, |last| last.max(now));
        let entry = ActivityEntry {
            id: format!("{}/{}", self.id_base, state.count + 1),
            kind,
            object: ActivityObject { id: object_id.to_string(), kind: object_type.to_string() },
            end_time,
        };
        let mut line = serde_json::to_vec(&entry).expect("entries serialize");
        line.push(b'\n');
        let io_err = |source| ActivityError::Io { path: self.path.clone(), source };
        state.file.write_all(&line).map_err(io_err)?;
        state.file.flush().map_err(io_err)?;
        state.count += 1;
        state.last = Some(end_time);
        Ok(entry)
    }

    pub fn sync(&self) -> Result<(), ActivityError> {
        let state = self.state.lock();
        state.file.sync_data().map_err(|source| ActivityError::Io { path: self.path.clone(), source })
    }
}

/// Number of pages for `total` entries; there is always at least one.
pub fn page_count(total: usize, page_size: usize) -> usize {
    total.div_ceil(page_size.max(1)).max(1)
}

fn page_ref(collection_id: &str, n: usize) -> Value {
    json!({"id": format!("{collection_id}/page/{n}"), "type": "OrderedCollectionPage"})
}

/// The top-level stream document. Pages are numbered from 0 at
/// `{collection_id}/page/{n}`.
pub fn ordered_collection(collection_id: &str, total: usize, page_size: usize) -> Value {
    let pages = page_count(total, page_size);
    json!({
        "@context": DISCOVERY_CONTEXT,
        "id": collection_id,
        "type": "OrderedCollection",
        "totalItems": total,
        "first": page_ref(collection_id, 0),
        "last": page_ref(collection_id, pages - 1),
    })
}

/// Page `n` of the stream, or `None` past the last page.
pub fn ordered_collection_page(
    collection_id: &str,
    entries: &[ActivityEntry],
    page_size: usize,
    n: usize,
) -> Option<Value> {
    let size = page_size.max(1);
    let pages = page_count(entries.len(), size);
    if n >= pages {
        return None;
    }
    let start = n * size;
    let items = &entries[start.min(entries.len())..(start + size).min(entries.len())];
    let mut page = json!({
        "@context": DISCOVERY_CONTEXT,
        "id": format!("{collection_id}/page/{n}"),
        "type": "OrderedCollectionPage",
        "startIndex": start,
        "partOf": {"id": collection_id, "type": "OrderedCollection"},
    });
    let obj = page.as_object_mut().expect("object literal");
    if n > 0 {
        obj.insert("prev".into(), page_ref(collection_id, n - 1));
    }
    if n + 1 < pages {
        obj.insert("next".into(), page_ref(collection_id, n + 1));
    }
    obj.insert("orderedItems".into(), serde_json::to_value(items).expect("entries serialize"));
    Some(page)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn t(s: i64) -> DateTime<Utc> {
        Utc.timestamp_opt(1_660_000_000 + s, 500_000_000).unwrap()
    }

    #[test]
    fn end_times_are_monotone_and_whole_seconds() {
        let dir = tempfile::tempdir().unwrap();
        let log = ActivityLog::open(dir.path().join("a.jsonl"), "https://x.org/activity").unwrap();
        let a = log.append_at(ActivityType::Create, "https://x.org/m1", "Manifest", t(10)).unwrap();
        let b = log.append_at(ActivityType::Create, "https://x.org/m2", "Manifest", t(5)).unwrap();
        assert_eq!(a.end_time.timestamp_subsec_nanos(), 0);
        assert_eq!(b.end_time, a.end_time);
        assert_eq!(b.id, "https://x.org/activity/2");
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"endTime\":\"2022-08-08T23:06:50Z\""), "{json}");
    }

    #[test]
    fn reopen_continues_numbering_and_ignores_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.jsonl");
        {
            let log = ActivityLog::open(&path, "https://x.org/a").unwrap();
            log.append_at(ActivityType::Create, "https://x.org/m1", "Manifest", t(0)).unwrap();
        }
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"id\":\"torn").unwrap();
        assert_eq!(read_log(&path).unwrap().len(), 1);
        let log = ActivityLog::open(&path, "https://x.org/a").unwrap();
        assert_eq!(log.len(), 1);
        let e = log.append_at(ActivityType::Update, "https://x.org/m1", "Manifest", t(1)).unwrap();
        assert_eq!(e.id, "https://x.org/a/2");
        let all = read_log(&path).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].kind, ActivityType::Update);
    }

    #[test]
    fn concurrent_appends_do_not_tear() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.jsonl");
        let log = std::sync::Arc::new(ActivityLog::open(&path, "https://x.org/a").unwrap());
        let handles: Vec<_> = (0..4)
            .map(|k| {
                let log = log.clone();
                std::thread::spawn(move || {
                    for i in 0..25 {
                        log.append(ActivityType::Create, &format!("https://x.org/m{k}-{i}"), "Manifest").unwrap();
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        let all = read_log(&path).unwrap();
        assert_eq!(all.len(), 100);
        let mut ids: Vec<_> = all.iter().map(|e| e.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 100);
        assert!(all.windows(2).all(|w| w[0].end_time <= w[1].end_time));
    }

    #[test]
    fn paging() {
        let entries: Vec<ActivityEntry> = (0..45)
            .map(|i| ActivityEntry {
                id: format!("https://x.org/a/{i}"),
                kind: ActivityType::Create,
                object: ActivityObject { id: format!("https://x.org/m{i}"), kind: "Manifest".into() },
                end_time: t(i),
            })
            .collect();
        let top = ordered_collection("https://x.org/changes", 45, 20);
        assert_eq!(top["totalItems"], 45);
        assert_eq!(top["last"]["id"], "https://x.org/changes/page/2");
        let p0 = ordered_collection_page("https://x.org/changes", &entries, 20, 0).unwrap();
        assert_eq!(p0["orderedItems"].as_array().unwrap().len(), 20);
        assert!(p0.get("prev").is_none());
        let p2 = ordered_collection_page("https://x.org/changes", &entries, 20, 2).unwrap();
        assert_eq!(p2["orderedItems"].as_array().unwrap().len(), 5);
        assert!(p2.get("next").is_none());
        assert!(ordered_collection_page("https://x.org/changes", &entries, 20, 3).is_none());
        let empty = ordered_collection_page("https://x.org/changes", &[], 20, 0).unwrap();
        assert_eq!(empty["orderedItems"], json!([]));
    }
}
