//! Blackboards: shared, persistent, tag-queryable item collections.
//!
//! A [`Store`] owns a set of named [`Blackboard`]s plus the private key-value
//! areas of individual modules. On disk every blackboard is a directory with a
//! `meta.json` and an append-only `items.ndjson` log of whole item documents;
//! the last line written for an id wins when the log is replayed.

mod board;
mod hash;
mod private;
mod types;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

pub use board::{Blackboard, BlackboardMeta};
pub use hash::compute_dedup_hash;
pub use private::PrivateStore;
pub use types::{
    tags, InsertResult, Item, ItemId, ItemUpdate, NewItem, Query, Tag, CONTROL_PREFIX,
    FAILED_PREFIX,
};

/// Shared handle to one blackboard.
pub type BlackboardRef = Arc<Blackboard>;

/// The blackboards every store is expected to carry.
pub const STANDARD_BLACKBOARDS: [&str; 7] = [
    "articles", "tweets", "feeds", "outlets", "locations", "urls", "queries",
];

/// Blackboards that reject duplicate items unless configured otherwise.
pub fn dedup_by_default(name: &str) -> bool {
    matches!(name, "articles" | "feeds")
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("blackboard `{0}` already exists")]
    DuplicateBlackboard(String),
    #[error("invalid blackboard name `{0}`")]
    InvalidName(String),
    #[error("unknown blackboard `{0}`")]
    UnknownBlackboard(String),
    #[error("item {id} not found on blackboard `{board}`")]
    NotFound { board: String, id: ItemId },
    #[error("invalid tag `{0}`: tags are non-empty and contain no whitespace")]
    InvalidTag(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("store unavailable: {0}")]
    StoreUnavailable(#[from] std::io::Error),
    #[error("corrupt record in {path} line {line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

/// A collection of blackboards, either persisted under a directory or held in memory.
pub struct Store {
    root: Option<PathBuf>,
    boards: RwLock<BTreeMap<String, BlackboardRef>>,
    private: Mutex<BTreeMap<String, PrivateStore>>,
}

impl Store {
    pub fn in_memory() -> Self {
        Store {
            root: None,
            boards: RwLock::new(BTreeMap::new()),
            private: Mutex::new(BTreeMap::new()),
        }
    }

    /// Open (or create) a persistent store rooted at `root`, loading every blackboard found there.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let boards_dir = root.join("boards");
        fs::create_dir_all(&boards_dir)?;
        fs::create_dir_all(root.join("private"))?;
        let mut boards = BTreeMap::new();
        let mut entries: Vec<_> = fs::read_dir(&boards_dir)?.collect::<Result<_, _>>()?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            if entry.file_type()?.is_dir() {
                let board = Blackboard::load(&entry.path())?;
                boards.insert(board.name().to_string(), Arc::new(board));
            }
        }
        Ok(Store {
            root: Some(root),
            boards: RwLock::new(boards),
            private: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Create a blackboard with the default dedup policy for its name.
    pub fn create_blackboard(&self, name: &str) -> Result<BlackboardRef> {
        self.create_blackboard_with(name, dedup_by_default(name))
    }

    pub fn create_blackboard_with(&self, name: &str, dedup: bool) -> Result<BlackboardRef> {
        validate_name(name)?;
        let mut boards = self.boards.write().expect("store lock poisoned");
        if boards.contains_key(name) {
            return Err(StoreError::DuplicateBlackboard(name.to_string()));
        }
        let meta = BlackboardMeta::new(name, dedup);
        let board = match &self.root {
            Some(root) => Blackboard::create_on_disk(&root.join("boards").join(name), meta)?,
            None => Blackboard::in_memory(meta),
        };
        let board = Arc::new(board);
        boards.insert(name.to_string(), Arc::clone(&board));
        Ok(board)
    }

    /// Return the named blackboard, creating it if it does not exist yet.
    pub fn ensure_blackboard(&self, name: &str) -> Result<BlackboardRef> {
        match self.blackboard(name) {
            Ok(b) => Ok(b),
            Err(StoreError::UnknownBlackboard(_)) => match self.create_blackboard(name) {
                Err(StoreError::DuplicateBlackboard(_)) => self.blackboard(name),
                other => other,
            },
            Err(e) => Err(e),
        }
    }

    pub fn blackboard(&self, name: &str) -> Result<BlackboardRef> {
        self.boards
            .read()
            .expect("store lock poisoned")
            .get(name)
            .cloned()
            .ok_or_else(|| StoreError::UnknownBlackboard(name.to_string()))
    }

    pub fn blackboard_names(&self) -> Vec<String> {
        self.boards
            .read()
            .expect("store lock poisoned")
            .keys()
            .cloned()
            .collect()
    }

    /// Create whichever of the standard blackboards are missing.
    pub fn init_standard(&self) -> Result<Vec<BlackboardRef>> {
        STANDARD_BLACKBOARDS
            .iter()
            .map(|name| self.ensure_blackboard(name))
            .collect()
    }

    /// The private key-value area of one module. Handles for the same module share state.
    pub fn private_store(&self, module: &str) -> Result<PrivateStore> {
        let mut private = self.private.lock().expect("store lock poisoned");
        if let Some(p) = private.get(module) {
            return Ok(p.clone());
        }
        let handle = match &self.root {
            Some(root) => PrivateStore::open(module, root.join("private"))?,
            None => PrivateStore::in_memory(module),
        };
        private.insert(module.to_string(), handle.clone());
        Ok(handle)
    }
}

fn validate_name(name: &str) -> Result<()> {
    let bad = name.trim().is_empty()
        || name.chars().any(char::is_whitespace)
        || name.contains(['/', '\\'])
        || name.starts_with('.');
    if bad {
        Err(StoreError::InvalidName(name.to_string()))
    } else {
        Ok(())
    }
}
