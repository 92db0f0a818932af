use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use super::Result;

/// Key-value state that belongs to one module and is invisible to every other.
///
/// Nothing here is reachable through blackboard queries. A persistent store
/// keeps it in `private/<module>.json`.
#[derive(Clone)]
pub struct PrivateStore {
    module: String,
    path: Option<PathBuf>,
    values: Arc<Mutex<BTreeMap<String, String>>>,
}

impl PrivateStore {
    pub(crate) fn in_memory(module: &str) -> Self {
        PrivateStore {
            module: module.to_string(),
            path: None,
            values: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub(crate) fn open(module: &str, dir: PathBuf) -> Result<Self> {
        let path = dir.join(format!("{}.json", file_stem(module)));
        let values = if path.exists() {
            serde_json::from_str(&fs::read_to_string(&path)?)
                .map_err(std::io::Error::other)?
        } else {
            BTreeMap::new()
        };
        Ok(PrivateStore {
            module: module.to_string(),
            path: Some(path),
            values: Arc::new(Mutex::new(values)),
        })
    }

    pub fn module(&self) -> &str {
        &self.module
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.values.lock().expect("private store poisoned").get(key).cloned()
    }

    pub fn put(&self, key: &str, value: impl Into<String>) -> Result<()> {
        let mut values = self.values.lock().expect("private store poisoned");
        values.insert(key.to_string(), value.into());
        self.flush(&values)
    }

    pub fn delete(&self, key: &str) -> Result<Option<String>> {
        let mut values = self.values.lock().expect("private store poisoned");
        let old = values.remove(key);
        self.flush(&values)?;
        Ok(old)
    }

    fn flush(&self, values: &BTreeMap<String, String>) -> Result<()> {
        if let Some(path) = &self.path {
            let tmp = path.with_extension("json.tmp");
            fs::write(&tmp, serde_json::to_vec(values).map_err(std::io::Error::other)?)?;
            fs::rename(tmp, path)?;
        }
        Ok(())
    }
}

fn file_stem(module: &str) -> String {
    module
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect::<String>()
        + &format!("-{:08x}", fnv(module))
}

// names like `TopicTagger:Sports` need a filesystem-safe but collision-free stem
fn fnv(s: &str) -> u32 {
    s.bytes()
        .fold(0x811c_9dc5u32, |h, b| (h ^ b as u32).wrapping_mul(0x0100_0193))
}
