//! Input modules: feed crawling, page scraping, feed discovery, the
//! translation slot, and bulk loading of corpora from disk.

pub mod discover;
pub mod feed;
pub mod scrape;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Deserialize;
use serde_json::{json, Value};

pub use discover::find_feeds;
pub use feed::{crawl_feed, crawl_feed_source, fetch_document, parse_feed, CrawlSummary, FeedRecord, OutletRecord};
pub use scrape::scrape_html;

use crate::framework::{Outcome, Producer, Production, RoutineError};
use crate::store::{InsertResult, Item, NewItem, PrivateStore, Query, Store, StoreError, Tag};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("fetch failed: {0}")]
    Fetch(String),
    #[error("malformed feed: {0}")]
    MalformedFeed(String),
    #[error("feed `{0}` has not been approved")]
    NotApproved(String),
    #[error("document has no extractable text")]
    EmptyDocument,
    #[error("{0}")]
    Invalid(String),
    #[error("{source_name} line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub const MACHINE_TRANSLATED: &str = "machine-translated";

/// The translation slot. Content is copied verbatim; the point is the shape
/// of the output: a new English article that points back at its source.
pub fn translate_stub(item: &Item) -> NewItem {
    let source_lang = item.field_str("language").map(str::to_string);
    let mut out = NewItem::new().without_dedup();
    for (k, v) in &item.fields {
        out.fields.insert(k.clone(), v.clone());
    }
    out.fields.insert("language".into(), json!("en"));
    out.fields.insert("source_item_id".into(), json!(item.item_id.0));
    if let Some(l) = &source_lang {
        out.fields.insert("source_language".into(), json!(l));
    }
    for t in &item.tags {
        let is_source_lang = source_lang.as_deref() == Some(t.as_str());
        if !t.is_control() && !t.as_str().starts_with("FAILED>") && !is_source_lang {
            out.tags.insert(t.clone());
        }
    }
    out.tags.insert(Tag::new(MACHINE_TRANSLATED).unwrap());
    out.tags.insert(Tag::new("en").unwrap());
    out.tags.insert(Tag::control("FeatureExtractor").unwrap());
    // the output language is known, so there is nothing left to detect
    out.annotations.insert("lang".into(), json!("en"));
    out.created_at = Some(item.created_at);
    out
}

/// Fetches each article's page and stores its main text as `content`.
///
/// Articles in a declared non-English language are not sent to feature
/// extraction here; their translations are.
pub struct Scraper {
    pub feature_trigger: Tag,
}

impl Default for Scraper {
    fn default() -> Self {
        Scraper {
            feature_trigger: Tag::control("FeatureExtractor").unwrap(),
        }
    }
}

impl Producer for Scraper {
    fn produce(&self, item: &Item, _: &PrivateStore) -> Result<Production, RoutineError> {
        let link = item
            .field_str("link")
            .ok_or_else(|| RoutineError::new("item has no `link` field"))?;
        let (html, _) = fetch_document(link).map_err(|e| RoutineError::new(e.to_string()))?;
        let mut p = Production::default();
        match scrape_html(&html) {
            Ok(text) => {
                p.set_fields.insert("content".into(), json!(text));
            }
            Err(IngestError::EmptyDocument) => {
                p.set_fields.insert("content".into(), json!(""));
                p.outcome = Outcome::new().tag(Tag::new("scrape.empty").unwrap());
                return Ok(p);
            }
            Err(e) => return Err(RoutineError::new(e.to_string())),
        }
        let english = item.field_str("language").is_none_or(|l| l.eq_ignore_ascii_case("en"));
        if english {
            p.outcome.add_tags.insert(self.feature_trigger.clone());
        }
        Ok(p)
    }
}

/// Writes a machine-translated copy of each selected article.
pub struct Translator;

impl Producer for Translator {
    fn produce(&self, item: &Item, _: &PrivateStore) -> Result<Production, RoutineError> {
        Ok(Production {
            new_items: vec![translate_stub(item)],
            ..Production::default()
        })
    }
}

/// Reads a web page (field `page`, a local path or file URL, with `base_url`)
/// and proposes the feeds it links to. Candidates need approval before use.
pub struct FeedFinder;

impl Producer for FeedFinder {
    fn produce(&self, item: &Item, _: &PrivateStore) -> Result<Production, RoutineError> {
        let page = item
            .field_str("page")
            .ok_or_else(|| RoutineError::new("item has no `page` field"))?;
        let base = item.field_str("base_url").unwrap_or(page);
        let (html, _) = fetch_document(page).map_err(|e| RoutineError::new(e.to_string()))?;
        let found = find_feeds(&html, base);
        let outcome = Outcome::new().annotate("feeds.found", found.len() as u64);
        Ok(Production {
            outcome,
            new_items: found.iter().map(FeedRecord::to_item).collect(),
            ..Production::default()
        })
    }
}

/// Record proposed feeds on the `feeds` blackboard, skipping URLs it already has.
pub fn propose_feeds(store: &Store, candidates: &[FeedRecord]) -> Result<Vec<InsertResult>, IngestError> {
    let feeds = store.blackboard("feeds")?;
    let known: BTreeSet<String> = feeds.scan().iter().filter_map(|i| i.field_str("url").map(str::to_string)).collect();
    let mut out = Vec::new();
    for c in candidates {
        if known.contains(&c.url) {
            continue;
        }
        out.push(feeds.insert_item(c.to_item())?);
    }
    Ok(out)
}

/// Put an outlet on the `outlets` blackboard unless one with its id exists.
pub fn register_outlet(store: &Store, outlet: &OutletRecord) -> Result<InsertResult, IngestError> {
    let outlets = store.blackboard("outlets")?;
    if let Some(existing) = outlets
        .scan()
        .into_iter()
        .find(|i| i.field_str("outlet_id") == Some(outlet.outlet_id.as_str()))
    {
        return Ok(InsertResult::Duplicate(existing.item_id));
    }
    Ok(outlets.insert_item(outlet.to_item())?)
}

/// Put an approved feed on the `feeds` blackboard.
pub fn register_feed(store: &Store, feed: &FeedRecord) -> Result<InsertResult, IngestError> {
    Ok(store.blackboard("feeds")?.insert_item(feed.to_item())?)
}

/// The feeds on the watch list that a human has approved.
pub fn approved_feeds(store: &Store) -> Result<Vec<FeedRecord>, IngestError> {
    let feeds = store.blackboard("feeds")?;
    let q = Query::all().require_field("feed_id").require_field("url");
    Ok(feeds
        .query_items(&q)?
        .iter()
        .filter(|i| i.fields.get("approved") == Some(&Value::Bool(true)))
        .map(|i| FeedRecord {
            feed_id: i.field_str("feed_id").unwrap_or_default().to_string(),
            url: i.field_str("url").unwrap_or_default().to_string(),
            outlet_id: i.field_str("outlet_id").unwrap_or_default().to_string(),
            language: i.field_str("language").map(str::to_string),
            location: i.field_str("location").map(str::to_string),
            approved: true,
        })
        .collect())
}

#[derive(Debug, Deserialize)]
struct TweetRecord {
    text: String,
    timestamp: String,
    #[serde(default)]
    city: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TweetSummary {
    pub inserted: usize,
    /// Tweets already on the blackboard (same text, time and city).
    pub duplicates: usize,
    /// Lines that were not a tweet record.
    pub skipped: usize,
}

/// Load newline-delimited tweets (`{"text", "timestamp", "city"}`) into the
/// `tweets` blackboard, each tagged with `triggers`.
pub fn ingest_tweets(store: &Store, ndjson: &str, triggers: &BTreeSet<Tag>) -> Result<TweetSummary, IngestError> {
    let tweets = store.blackboard("tweets")?;
    let key = |content: Option<&str>, ts: Option<&str>, city: Option<&str>| {
        (content.map(str::to_string), ts.map(str::to_string), city.map(str::to_string))
    };
    let mut seen: BTreeSet<_> = tweets
        .scan()
        .iter()
        .map(|i| key(i.field_str("content"), i.field_str("timestamp"), i.field_str("city")))
        .collect();
    let mut summary = TweetSummary::default();
    for line in ndjson.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let Ok(rec) = serde_json::from_str::<TweetRecord>(line) else {
            summary.skipped += 1;
            continue;
        };
        let Some(at) = feed::parse_date(&rec.timestamp) else {
            summary.skipped += 1;
            continue;
        };
        let mut item = NewItem::new()
            .field("content", rec.text.as_str())
            .field("timestamp", at.to_rfc3339())
            .created_at(at);
        if let Some(city) = rec.city.as_deref().map(str::trim).filter(|c| !c.is_empty()) {
            item = item.field("city", city).tag(feed::location_tag(city));
        }
        let k = key(
            item.fields.get("content").and_then(Value::as_str),
            item.fields.get("timestamp").and_then(Value::as_str),
            item.fields.get("city").and_then(Value::as_str),
        );
        if !seen.insert(k) {
            summary.duplicates += 1;
            continue;
        }
        item.tags.extend(triggers.iter().cloned());
        tweets.insert_item(item)?;
        summary.inserted += 1;
    }
    Ok(summary)
}

/// One line of a corpus manifest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManifestEntry {
    /// `feed<TAB>file<TAB>outlet domain<TAB>language<TAB>location`
    Feed {
        file: PathBuf,
        outlet_domain: String,
        language: Option<String>,
        location: Option<String>,
    },
    /// `tweets<TAB>file<TAB>comma-separated trigger tags`
    Tweets { file: PathBuf, triggers: BTreeSet<Tag> },
}

fn opt(s: Option<&&str>) -> Option<String> {
    s.map(|v| v.trim()).filter(|v| !v.is_empty() && *v != "-").map(str::to_string)
}

/// Parse a manifest. Relative file paths are resolved against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |m: &str| IngestError::Parse {
            source_name: "manifest".into(),
            line: idx + 1,
            message: m.into(),
        };
        let cols: Vec<&str> = line.split('\t').collect();
        let file = cols.get(1).map(|f| base.join(f.trim())).ok_or_else(|| err("missing file column"))?;
        match cols[0].trim() {
            "feed" => {
                let outlet_domain = opt(cols.get(2)).ok_or_else(|| err("missing outlet domain"))?;
                if cols.len() > 5 {
                    return Err(err("too many columns"));
                }
                out.push(ManifestEntry::Feed {
                    file,
                    outlet_domain,
                    language: opt(cols.get(3)).map(|l| l.to_lowercase()),
                    location: opt(cols.get(4)),
                });
            }
            "tweets" => {
                let triggers = match opt(cols.get(2)) {
                    Some(list) => crate::store::tags(list.split(',').map(str::trim).filter(|t| !t.is_empty()))
                        .map_err(|e| err(&e.to_string()))?,
                    None => BTreeSet::new(),
                };
                out.push(ManifestEntry::Tweets { file, triggers });
            }
            other => return Err(err(&format!("unknown entry kind `{other}`"))),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub feeds: usize,
    pub inserted: usize,
    pub duplicates: usize,
    pub skipped_entries: usize,
    pub tweets: usize,
    pub tweet_duplicates: usize,
}

impl std::fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} feeds: {} inserted, {} duplicates, {} malformed entries skipped; {} tweets inserted, {} duplicates",
            self.feeds, self.inserted, self.duplicates, self.skipped_entries, self.tweets, self.tweet_duplicates
        )
    }
}

/// Ingest a corpus directory described by a manifest file. Feeds listed in a
/// manifest are treated as approved by whoever wrote it.
pub fn ingest_manifest(store: &Store, manifest: &Path, crawl_time: DateTime<Utc>) -> Result<IngestSummary, IngestError> {
    let text = std::fs::read_to_string(manifest).map_err(|e| IngestError::Fetch(format!("{}: {e}", manifest.display())))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut summary = IngestSummary::default();
    for entry in parse_manifest(&text, base)? {
        match entry {
            ManifestEntry::Feed {
                file,
                outlet_domain,
                language,
                location,
            } => {
                let outlet = OutletRecord::from_domain(&outlet_domain, location.clone());
                register_outlet(store, &outlet)?;
                let file = file.canonicalize().unwrap_or(file);
                let feed_id = file
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .ok_or_else(|| IngestError::Invalid(format!("bad feed path {}", file.display())))?;
                let record = FeedRecord {
                    feed_id,
                    url: file.display().to_string(),
                    outlet_id: outlet.outlet_id,
                    language,
                    location,
                    approved: true,
                };
                register_feed(store, &record)?;
                let crawl = crawl_feed_source(store, &record, crawl_time)?;
                summary.feeds += 1;
                summary.inserted += crawl.inserted();
                summary.duplicates += crawl.duplicates();
                summary.skipped_entries += crawl.skipped;
            }
            ManifestEntry::Tweets { file, triggers } => {
                let text = std::fs::read_to_string(&file).map_err(|e| IngestError::Fetch(format!("{}: {e}", file.display())))?;
                let t = ingest_tweets(store, &text, &triggers)?;
                summary.tweets += t.inserted;
                summary.tweet_duplicates += t.duplicates;
            }
        }
    }
    Ok(summary)
}
