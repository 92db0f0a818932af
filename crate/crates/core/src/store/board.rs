use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::Utc;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::hash::compute_dedup_hash;
use super::types::{InsertResult, Item, ItemId, ItemUpdate, NewItem, Query, Tag};
use super::{Result, StoreError};

const FORMAT_VERSION: u32 = 1;
const META_FILE: &str = "meta.json";
const LOG_FILE: &str = "items.ndjson";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlackboardMeta {
    pub name: String,
    pub dedup: bool,
    pub format_version: u32,
}

impl BlackboardMeta {
    pub fn new(name: &str, dedup: bool) -> Self {
        BlackboardMeta {
            name: name.to_string(),
            dedup,
            format_version: FORMAT_VERSION,
        }
    }
}

struct BoardState {
    items: BTreeMap<ItemId, Item>,
    by_hash: HashMap<String, ItemId>,
    next_id: u64,
    log: Option<BufWriter<File>>,
}

impl BoardState {
    fn empty() -> Self {
        BoardState {
            items: BTreeMap::new(),
            by_hash: HashMap::new(),
            next_id: 1,
            log: None,
        }
    }

    fn put(&mut self, item: Item) -> Result<()> {
        if let Some(log) = self.log.as_mut() {
            let line = serde_json::to_string(&item).map_err(std::io::Error::other)?;
            log.write_all(line.as_bytes())?;
            log.write_all(b"\n")?;
            log.flush()?;
        }
        if let Some(h) = &item.dedup_hash {
            self.by_hash.insert(h.clone(), item.item_id);
        }
        self.next_id = self.next_id.max(item.item_id.0 + 1);
        self.items.insert(item.item_id, item);
        Ok(())
    }
}

/// One named repository of items.
pub struct Blackboard {
    meta: BlackboardMeta,
    dir: Option<PathBuf>,
    state: RwLock<BoardState>,
}

impl Blackboard {
    pub(crate) fn in_memory(meta: BlackboardMeta) -> Self {
        Blackboard {
            meta,
            dir: None,
            state: RwLock::new(BoardState::empty()),
        }
    }

    pub(crate) fn create_on_disk(dir: &Path, meta: BlackboardMeta) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let meta_json = serde_json::to_string_pretty(&meta).map_err(std::io::Error::other)?;
        fs::write(dir.join(META_FILE), meta_json)?;
        let mut state = BoardState::empty();
        state.log = Some(open_log(dir)?);
        Ok(Blackboard {
            meta,
            dir: Some(dir.to_path_buf()),
            state: RwLock::new(state),
        })
    }

    /// Replay a blackboard directory. A final line without a terminating
    /// newline is a write cut short by a crash and is discarded.
    pub(crate) fn load(dir: &Path) -> Result<Self> {
        let meta_path = dir.join(META_FILE);
        let meta: BlackboardMeta = serde_json::from_str(&fs::read_to_string(&meta_path)?)
            .map_err(|e| StoreError::Corrupt {
                path: meta_path.clone(),
                line: e.line(),
                message: e.to_string(),
            })?;
        if meta.format_version != FORMAT_VERSION {
            return Err(StoreError::Corrupt {
                path: meta_path,
                line: 1,
                message: format!("unsupported format version {}", meta.format_version),
            });
        }

        let log_path = dir.join(LOG_FILE);
        let mut state = BoardState::empty();
        let mut lines_read = 0usize;
        if log_path.exists() {
            let raw = fs::read(&log_path)?;
            let complete = match raw.iter().rposition(|&b| b == b'\n') {
                Some(pos) => &raw[..=pos],
                None => &raw[..0],
            };
            for (idx, line) in BufReader::new(complete).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                lines_read += 1;
                let item: Item =
                    serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                        path: log_path.clone(),
                        line: idx + 1,
                        message: e.to_string(),
                    })?;
                state.put(item)?;
            }
            if lines_read > state.items.len() || complete.len() != raw.len() {
                compact(dir, &state.items)?;
            }
        }
        // hashes of superseded versions may linger; rebuild from live items
        state.by_hash = state
            .items
            .values()
            .filter_map(|i| i.dedup_hash.clone().map(|h| (h, i.item_id)))
            .collect();
        state.log = Some(open_log(dir)?);
        Ok(Blackboard {
            meta,
            dir: Some(dir.to_path_buf()),
            state: RwLock::new(state),
        })
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn dedup_enabled(&self) -> bool {
        self.meta.dedup
    }

    pub fn is_persistent(&self) -> bool {
        self.dir.is_some()
    }

    pub fn len(&self) -> usize {
        self.read().items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Store a new item unless, on a dedup-enabled blackboard, an item with
    /// the same (title, description, outlet_id) hash already exists.
    pub fn insert_item(&self, item: NewItem) -> Result<InsertResult> {
        let hash = if self.meta.dedup && !item.skip_dedup {
            let field = |k: &str| item.fields.get(k).and_then(Value::as_str).unwrap_or("");
            Some(compute_dedup_hash(
                field("title"),
                field("description"),
                field("outlet_id"),
            ))
        } else {
            None
        };
        let mut state = self.write();
        if let Some(h) = &hash {
            if let Some(existing) = state.by_hash.get(h) {
                return Ok(InsertResult::Duplicate(*existing));
            }
        }
        let id = ItemId(state.next_id);
        let stored = Item {
            item_id: id,
            fields: item.fields,
            tags: item.tags,
            annotations: item.annotations,
            dedup_hash: hash,
            created_at: item.created_at.unwrap_or_else(Utc::now),
        };
        state.put(stored)?;
        Ok(InsertResult::Inserted(id))
    }

    pub fn get(&self, id: ItemId) -> Result<Item> {
        self.read()
            .items
            .get(&id)
            .cloned()
            .ok_or_else(|| self.not_found(id))
    }

    /// Add information carried by a second sighting of an existing item.
    /// Fields already present are kept; `feed_ids` lists are unioned.
    pub fn merge_item(
        &self,
        id: ItemId,
        extra_fields: &BTreeMap<String, Value>,
        extra_tags: &BTreeSet<Tag>,
    ) -> Result<Item> {
        self.modify(id, |item| {
            for (k, v) in extra_fields {
                match item.fields.get_mut(k) {
                    None => {
                        item.fields.insert(k.clone(), v.clone());
                    }
                    Some(Value::Array(existing)) if k == "feed_ids" => {
                        if let Value::Array(more) = v {
                            for f in more {
                                if !existing.contains(f) {
                                    existing.push(f.clone());
                                }
                            }
                        }
                    }
                    Some(_) => {}
                }
            }
            item.tags.extend(extra_tags.iter().cloned());
        })
    }

    /// Items matching `q`, oldest first (by `created_at`, then id), at most `q.limit`.
    pub fn query_items(&self, q: &Query) -> Result<Vec<Item>> {
        if q.limit == 0 {
            return Err(StoreError::InvalidQuery("limit must be at least 1".into()));
        }
        let state = self.read();
        let mut hits: Vec<&Item> = state.items.values().filter(|i| q.matches(i)).collect();
        hits.sort_by(|a, b| {
            a.created_at
                .cmp(&b.created_at)
                .then(a.item_id.cmp(&b.item_id))
        });
        Ok(hits.into_iter().take(q.limit).cloned().collect())
    }

    /// Every item, in query order.
    pub fn scan(&self) -> Vec<Item> {
        self.query_items(&Query::all()).expect("unbounded query is valid")
    }

    pub fn add_tags(&self, id: ItemId, tags: &BTreeSet<Tag>) -> Result<Item> {
        self.modify(id, |item| item.tags.extend(tags.iter().cloned()))
    }

    pub fn remove_tags(&self, id: ItemId, tags: &BTreeSet<Tag>) -> Result<Item> {
        self.modify(id, |item| item.tags.retain(|t| !tags.contains(t)))
    }

    pub fn set_annotation(&self, id: ItemId, name: &str, value: Value) -> Result<Item> {
        self.modify(id, |item| {
            item.annotations.insert(name.to_string(), value);
        })
    }

    /// Apply several changes to one item atomically.
    pub fn apply(&self, id: ItemId, update: &ItemUpdate) -> Result<Item> {
        self.modify(id, |item| update.apply_to(item))
    }

    /// Tag histogram. Tags no item carries are absent rather than zero.
    pub fn list_tags(&self) -> BTreeMap<Tag, usize> {
        let mut counts = BTreeMap::new();
        for item in self.read().items.values() {
            for t in &item.tags {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Read-modify-write under the write lock; the new version is logged
    /// before it becomes visible.
    pub fn modify(&self, id: ItemId, f: impl FnOnce(&mut Item)) -> Result<Item> {
        let mut state = self.write();
        let mut item = state
            .items
            .get(&id)
            .cloned()
            .ok_or_else(|| self.not_found(id))?;
        f(&mut item);
        item.item_id = id;
        state.put(item.clone())?;
        Ok(item)
    }

    fn not_found(&self, id: ItemId) -> StoreError {
        StoreError::NotFound {
            board: self.meta.name.clone(),
            id,
        }
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, BoardState> {
        self.state.read().expect("blackboard lock poisoned")
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, BoardState> {
        self.state.write().expect("blackboard lock poisoned")
    }
}

fn open_log(dir: &Path) -> Result<BufWriter<File>> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join(LOG_FILE))?;
    Ok(BufWriter::new(file))
}

fn compact(dir: &Path, items: &BTreeMap<ItemId, Item>) -> Result<()> {
    let tmp = dir.join(format!("{LOG_FILE}.tmp"));
    {
        let mut out = BufWriter::new(File::create(&tmp)?);
        for item in items.values() {
            serde_json::to_writer(&mut out, item).map_err(std::io::Error::other)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
    }
    fs::rename(tmp, dir.join(LOG_FILE))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{tags, Store};
    use chrono::{TimeZone, Utc};
    use serde_json::json;
    use std::sync::Arc;

    fn article(title: &str, desc: &str, outlet: &str) -> NewItem {
        NewItem::new()
            .field("title", title)
            .field("description", desc)
            .field("outlet_id", outlet)
    }

    fn board() -> Arc<Blackboard> {
        Store::in_memory().create_blackboard("articles").unwrap()
    }

    #[test]
    fn insert_then_duplicate() {
        let bb = board();
        let first = bb.insert_item(article("A", "B", "o1")).unwrap();
        assert!(first.is_inserted());
        assert_eq!(bb.len(), 1);
        let again = bb.insert_item(article("A", "B", "o1")).unwrap();
        assert_eq!(again, InsertResult::Duplicate(first.id()));
        assert_eq!(bb.len(), 1);
    }

    #[test]
    fn different_outlet_is_not_a_duplicate() {
        let bb = board();
        assert!(bb.insert_item(article("A", "B", "o1")).unwrap().is_inserted());
        assert!(bb.insert_item(article("A", "B", "o2")).unwrap().is_inserted());
        assert_eq!(bb.len(), 2);
    }

    #[test]
    fn dedup_disabled_board_keeps_everything() {
        let store = Store::in_memory();
        let tweets = store.create_blackboard("tweets").unwrap();
        tweets.insert_item(article("A", "B", "o1")).unwrap();
        tweets.insert_item(article("A", "B", "o1")).unwrap();
        assert_eq!(tweets.len(), 2);
        assert!(tweets.scan()[0].dedup_hash.is_none());
    }

    #[test]
    fn merge_unions_feed_ids_and_never_overwrites() {
        let bb = board();
        let id = bb
            .insert_item(article("A", "B", "o1").field("feed_ids", json!(["f1"])))
            .unwrap()
            .id();
        let mut extra = BTreeMap::new();
        extra.insert("feed_ids".to_string(), json!(["f2", "f1"]));
        extra.insert("title".to_string(), json!("other"));
        extra.insert("link".to_string(), json!("http://x"));
        let merged = bb
            .merge_item(id, &extra, &tags(["feed:f2"]).unwrap())
            .unwrap();
        assert_eq!(merged.fields["feed_ids"], json!(["f1", "f2"]));
        assert_eq!(merged.fields["title"], json!("A"));
        assert_eq!(merged.fields["link"], json!("http://x"));
        assert!(merged.has_tag_str("feed:f2"));
    }

    #[test]
    fn empty_merge_is_identity() {
        let bb = board();
        let id = bb.insert_item(article("A", "B", "o1")).unwrap().id();
        let before = bb.get(id).unwrap();
        let after = bb.merge_item(id, &BTreeMap::new(), &BTreeSet::new()).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn merge_missing_item() {
        let bb = board();
        let err = bb
            .merge_item(ItemId(99), &BTreeMap::new(), &BTreeSet::new())
            .unwrap_err();
        assert!(matches!(err, StoreError::NotFound { .. }));
    }

    #[test]
    fn query_by_trigger_tag() {
        let bb = board();
        let trigger = Tag::new("FOR>SportsTagger").unwrap();
        let a = bb
            .insert_item(article("a", "", "o").tag(trigger.clone()))
            .unwrap()
            .id();
        bb.insert_item(article("b", "", "o")).unwrap();
        let hits = bb.query_items(&Query::new(10).require(trigger)).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].item_id, a);
    }

    #[test]
    fn query_limit_returns_oldest() {
        let bb = board();
        let base = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
        // insert newest first to make sure order follows created_at, not id
        for i in (0..5).rev() {
            bb.insert_item(
                article(&format!("t{i}"), "", "o").created_at(base + chrono::Duration::hours(i)),
            )
            .unwrap();
        }
        let hits = bb.query_items(&Query::new(2)).unwrap();
        let titles: Vec<_> = hits.iter().map(|i| i.field_str("title").unwrap()).collect();
        assert_eq!(titles, ["t0", "t1"]);
    }

    #[test]
    fn contradictory_query_is_empty() {
        let bb = board();
        let x = Tag::new("X").unwrap();
        bb.insert_item(article("a", "", "o").tag(x.clone())).unwrap();
        bb.insert_item(article("b", "", "o")).unwrap();
        let q = Query::new(10).require(x.clone()).forbid(x);
        assert!(bb.query_items(&q).unwrap().is_empty());
    }

    #[test]
    fn zero_limit_rejected() {
        let bb = board();
        assert!(matches!(
            bb.query_items(&Query::new(0)),
            Err(StoreError::InvalidQuery(_))
        ));
    }

    #[test]
    fn add_remove_and_annotate() {
        let bb = board();
        let id = bb
            .insert_item(article("a", "", "o").tag(Tag::new("en").unwrap()))
            .unwrap()
            .id();
        let original = bb.get(id).unwrap().tags;
        let sports = tags(["Sports"]).unwrap();
        bb.add_tags(id, &sports).unwrap();
        assert!(bb.get(id).unwrap().has_tag_str("Sports"));
        bb.remove_tags(id, &sports).unwrap();
        assert_eq!(bb.get(id).unwrap().tags, original);

        bb.set_annotation(id, "mood.joy", json!(0.4)).unwrap();
        assert_eq!(bb.get(id).unwrap().annotation_f64("mood.joy"), Some(0.4));
    }

    #[test]
    fn list_tags_counts_and_drops_zeroes() {
        let bb = board();
        assert!(bb.list_tags().is_empty());
        let s = Tag::new("Sports").unwrap();
        let p = Tag::new("Politics").unwrap();
        let a = bb.insert_item(article("a", "", "o").tag(s.clone())).unwrap().id();
        bb.insert_item(article("b", "", "o").tag(s.clone())).unwrap();
        bb.insert_item(article("c", "", "o").tag(p.clone())).unwrap();
        let counts = bb.list_tags();
        assert_eq!(counts[&s], 2);
        assert_eq!(counts[&p], 1);

        bb.remove_tags(a, &[s.clone()].into()).unwrap();
        let id_b = bb.scan()[1].item_id;
        bb.remove_tags(id_b, &[s.clone()].into()).unwrap();
        assert!(!bb.list_tags().contains_key(&s));
    }

    #[test]
    fn concurrent_add_tags_lose_nothing() {
        let bb = board();
        let id = bb.insert_item(article("a", "", "o")).unwrap().id();
        std::thread::scope(|s| {
            for n in 0..32 {
                let bb = &bb;
                s.spawn(move || {
                    bb.add_tags(id, &tags([format!("t{n}")]).unwrap()).unwrap();
                });
            }
        });
        assert_eq!(bb.get(id).unwrap().tags.len(), 32);
    }

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let written;
        {
            let store = Store::open(dir.path()).unwrap();
            let bb = store.create_blackboard("articles").unwrap();
            let id = bb
                .insert_item(
                    article("A", "B", "o1")
                        .field("feed_ids", json!(["f1"]))
                        .tag(Tag::new("en").unwrap())
                        .annotation("features", json!({"weights": {"cat": 1.25}})),
                )
                .unwrap()
                .id();
            bb.set_annotation(id, "mood.joy", json!(0.1 + 0.2)).unwrap();
            written = bb.get(id).unwrap();
        }
        let store = Store::open(dir.path()).unwrap();
        let bb = store.blackboard("articles").unwrap();
        assert!(bb.dedup_enabled());
        assert_eq!(bb.get(written.item_id).unwrap(), written);
        // dedup index survives the restart
        assert!(!bb.insert_item(article("A", "B", "o1")).unwrap().is_inserted());
        // ids keep increasing
        let next = bb.insert_item(article("C", "D", "o1")).unwrap().id();
        assert!(next > written.item_id);
    }

    #[test]
    fn truncated_tail_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        {
            let store = Store::open(dir.path()).unwrap();
            let bb = store.create_blackboard("tweets").unwrap();
            bb.insert_item(article("A", "", "o")).unwrap();
        }
        let log = dir.path().join("boards/tweets/items.ndjson");
        let mut f = OpenOptions::new().append(true).open(&log).unwrap();
        f.write_all(b"{\"item_id\":2,\"fie").unwrap();
        drop(f);
        let store = Store::open(dir.path()).unwrap();
        assert_eq!(store.blackboard("tweets").unwrap().len(), 1);
    }
}
