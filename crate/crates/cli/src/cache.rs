//! Content-addressed on-disk cache for resolution traces.

use std::fs;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use squeeze_core::squeeze::TRACE_FORMAT_VERSION;
use squeeze_core::GroupSpec;

pub const CACHE_FORMAT_VERSION: u32 = 1;

pub fn code_version() -> String {
    format!(
        "{}+trace{}",
        env!("CARGO_PKG_VERSION"),
        TRACE_FORMAT_VERSION
    )
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    group: &'a GroupSpec,
    p: u32,
    module: &'a str,
    steps: usize,
    seed: u64,
    code_version: String,
}

#[derive(Serialize, Deserialize)]
pub struct CacheRecord<T> {
    pub version: u32,
    pub key: String,
    pub payload: T,
}

/// SHA-256 over the canonical JSON of `(group, p, module, steps, seed, code version)`.
pub fn cache_key(group: &GroupSpec, p: u32, module: &str, steps: usize, seed: u64) -> String {
    let material = KeyMaterial {
        group,
        p,
        module,
        steps,
        seed,
        code_version: code_version(),
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(bytes))
}

/// A cache rooted at an optional directory; without one every lookup misses.
#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// Unreadable, stale or mismatched records are misses.
    pub fn load<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        let header: serde_json::Value = serde_json::from_str(&text).ok()?;
        if header.get("version")?.as_u64()? != CACHE_FORMAT_VERSION as u64 {
            return None;
        }
        let rec: CacheRecord<T> = serde_json::from_value(header).ok()?;
        (rec.key == key).then_some(rec.payload)
    }

    /// Write failures only produce a warning.
    pub fn store<T: Serialize>(&self, key: &str, payload: &T) {
        let Some(path) = self.path(key) else { return };
        let rec = CacheRecord {
            version: CACHE_FORMAT_VERSION,
            key: key.to_string(),
            payload,
        };
        let result = (|| -> std::io::Result<()> {
            fs::create_dir_all(path.parent().expect("cache path has a parent"))?;
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            fs::write(&tmp, serde_json::to_vec(&rec)?)?;
            fs::rename(&tmp, &path)
        })();
        if let Err(e) = result {
            eprintln!(
                "warning: could not write cache entry {}: {e}",
                path.display()
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GroupSpec {
        GroupSpec {
            name: "C2".into(),
            degree: 2,
            generators: vec![vec![1, 0]],
        }
    }

    #[test]
    fn key_depends_on_every_field() {
        let base = cache_key(&spec(), 2, "trivial", 4, 0);
        assert_eq!(base, cache_key(&spec(), 2, "trivial", 4, 0));
        assert_eq!(base.len(), 64);
        assert_ne!(base, cache_key(&spec(), 3, "trivial", 4, 0));
        assert_ne!(base, cache_key(&spec(), 2, "regular", 4, 0));
        assert_ne!(base, cache_key(&spec(), 2, "trivial", 5, 0));
        assert_ne!(base, cache_key(&spec(), 2, "trivial", 4, 1));
    }

    #[test]
    fn version_mismatch_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        cache.store("k", &vec![1u32, 2, 3]);
        assert_eq!(cache.load::<Vec<u32>>("k"), Some(vec![1, 2, 3]));
        let stale = serde_json::json!({"version": 0, "key": "k", "payload": [1, 2, 3]});
        fs::write(dir.path().join("k.json"), stale.to_string()).unwrap();
        assert_eq!(cache.load::<Vec<u32>>("k"), None);
        fs::write(dir.path().join("k.json"), "not json").unwrap();
        assert_eq!(cache.load::<Vec<u32>>("k"), None);
        assert_eq!(Cache::new(None).load::<Vec<u32>>("k"), None);
    }
}
