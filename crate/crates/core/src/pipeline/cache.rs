use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use super::raster::SourceImage;

/// Shared cache of decoded source images keyed by identifier.
///
/// Entries are immutable `Arc`s swapped under a lock, so readers see either
/// the old or the new image, never a partial one. Concurrent inserts for the
/// same key resolve last-writer-wins.
#[derive(Debug, Default)]
pub struct ImageCache {
    entries: RwLock<HashMap<String, Arc<SourceImage>>>,
    capacity: usize,
}

impl ImageCache {
    /// A cache holding at most `capacity` images; 0 disables caching.
    pub fn new(capacity: usize) -> Self {
        ImageCache { entries: RwLock::new(HashMap::new()), capacity }
    }

    pub fn get(&self, key: &str) -> Option<Arc<SourceImage>> {
        self.entries.read().get(key).cloned()
    }

    pub fn insert(&self, key: &str, image: Arc<SourceImage>) {
        if self.capacity == 0 {
            return;
        }
        let mut entries = self.entries.write();
        if entries.len() >= self.capacity && !entries.contains_key(key) {
            // FIXME: arbitrary eviction; an LRU would keep hot tiles' sources resident
            if let Some(victim) = entries.keys().next().cloned() {
                entries.remove(&victim);
            }
        }
        entries.insert(key.to_string(), image);
    }

    pub fn get_or_load<E>(
        &self,
        key: &str,
        load: impl FnOnce() -> Result<SourceImage, E>,
    ) -> Result<Arc<SourceImage>, E> {
        if let Some(hit) = self.get(key) {
            return Ok(hit);
        }
        let image = Arc::new(load()?);
        self.insert(key, Arc::clone(&image));
        Ok(image)
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Raster;

    fn img(v: u8) -> SourceImage {
        SourceImage::from_raster(Raster::from_fn(1, 1, 3, |_, _| [v, v, v, 255]))
    }

    #[test]
    fn last_writer_wins() {
        let cache = ImageCache::new(4);
        cache.insert("a", Arc::new(img(1)));
        cache.insert("a", Arc::new(img(2)));
        assert_eq!(cache.get("a").unwrap().raster.pixel(0, 0), &[2, 2, 2]);
    }

    #[test]
    fn loads_once() {
        let cache = ImageCache::new(4);
        let mut calls = 0;
        for _ in 0..3 {
            cache
                .get_or_load::<()>("k", || {
                    calls += 1;
                    Ok(img(9))
                })
                .unwrap();
        }
        assert_eq!(calls, 1);
    }

    #[test]
    fn bounded_and_disableable() {
        let cache = ImageCache::new(2);
        for k in ["a", "b", "c"] {
            cache.insert(k, Arc::new(img(0)));
        }
        assert_eq!(cache.len(), 2);
        let off = ImageCache::new(0);
        off.insert("a", Arc::new(img(0)));
        assert!(off.is_empty());
    }

    #[test]
    fn concurrent_readers_and_writers() {
        let cache = Arc::new(ImageCache::new(8));
        std::thread::scope(|s| {
            for t in 0..4u8 {
                let cache = Arc::clone(&cache);
                s.spawn(move || {
                    for i in 0..200u8 {
                        cache.insert("shared", Arc::new(img(t.wrapping_mul(50).wrapping_add(i % 3))));
                        if let Some(hit) = cache.get("shared") {
                            let p = hit.raster.pixel(0, 0);
                            assert!(p[0] == p[1] && p[1] == p[2]);
                        }
                    }
                });
            }
        });
        assert!(cache.get("shared").is_some());
    }
}
