use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::request::encode_identifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteOutcome {
    Created,
    Updated,
    Unchanged,
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Writes `bytes` unless the file already holds exactly them.
pub fn write_if_changed(path: &Path, bytes: &[u8]) -> io::Result<WriteOutcome> {
    let outcome = match std::fs::read(path) {
        Ok(existing) if existing == bytes => return Ok(WriteOutcome::Unchanged),
        Ok(_) => WriteOutcome::Updated,
        Err(e) if e.kind() == io::ErrorKind::NotFound => WriteOutcome::Created,
        Err(e) => return Err(e),
    };
    write_atomic(path, bytes)?;
    Ok(outcome)
}

/// `{out}/{slug}/{record_id}/manifest.json`, both segments percent-encoded.
pub fn manifest_path(out: &Path, slug: &str, record_id: &str) -> PathBuf {
    out.join(encode_identifier(slug)).join(encode_identifier(record_id)).join("manifest.json")
}

/// `{out}/{slug}/collection.json`.
pub fn collection_path(out: &Path, slug: &str) -> PathBuf {
    out.join(encode_identifier(slug)).join("collection.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcomes() {
        let dir = tempfile::tempdir().unwrap();
        let p = manifest_path(dir.path(), "SGV_12", "a/b");
        assert!(p.ends_with("SGV_12/a%2Fb/manifest.json"));
        assert_eq!(write_if_changed(&p, b"1").unwrap(), WriteOutcome::Created);
        assert_eq!(write_if_changed(&p, b"1").unwrap(), WriteOutcome::Unchanged);
        assert_eq!(write_if_changed(&p, b"2").unwrap(), WriteOutcome::Updated);
        assert_eq!(std::fs::read(&p).unwrap(), b"2");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
