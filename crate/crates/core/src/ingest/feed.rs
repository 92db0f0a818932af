//! RSS 2.0 / Atom 1.0 parsing and the news crawler.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::IngestError;
use crate::store::{InsertResult, NewItem, Store, Tag};

/// A news feed on the watch list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedRecord {
    pub feed_id: String,
    /// URL or local path of the feed document.
    pub url: String,
    pub outlet_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    /// Set by a human; the crawler refuses unapproved feeds.
    pub approved: bool,
}

impl FeedRecord {
    /// The item stored on the `feeds` blackboard. Its title is the URL, so
    /// the dedup hash identifies a feed by (url, outlet).
    pub fn to_item(&self) -> NewItem {
        let mut item = NewItem::new()
            .field("title", self.url.as_str())
            .field("description", "")
            .field("feed_id", self.feed_id.as_str())
            .field("url", self.url.as_str())
            .field("outlet_id", self.outlet_id.as_str())
            .field("approved", self.approved);
        if let Some(l) = &self.language {
            item = item.field("language", l.as_str());
        }
        if let Some(l) = &self.location {
            item = item.field("location", l.as_str());
        }
        item
    }
}

/// A publisher, identified by its website domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutletRecord {
    pub outlet_id: String,
    pub domain: String,
    pub display_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

impl OutletRecord {
    pub fn from_domain(domain: &str, location: Option<String>) -> Self {
        let domain = domain.trim().trim_start_matches("www.").to_lowercase();
        OutletRecord {
            outlet_id: domain.clone(),
            display_name: domain.clone(),
            domain,
            location,
        }
    }

    pub fn to_item(&self) -> NewItem {
        let mut item = NewItem::new()
            .field("title", self.domain.as_str())
            .field("outlet_id", self.outlet_id.as_str())
            .field("domain", self.domain.as_str())
            .field("display_name", self.display_name.as_str());
        if let Some(l) = &self.location {
            item = item.field("location", l.as_str());
        }
        item
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedEntry {
    pub title: Option<String>,
    pub description: Option<String>,
    pub link: Option<String>,
    /// As written in the feed.
    pub published: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedFeed {
    pub entries: Vec<FeedEntry>,
    /// Entries dropped for lacking both title and link.
    pub skipped: usize,
}

fn child_text(node: roxmltree::Node, name: &str) -> Option<String> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == name)
        .map(|c| c.descendants().filter(|d| d.is_text()).filter_map(|d| d.text()).collect::<String>())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
}

/// Parse an RSS 2.0 or Atom 1.0 document.
pub fn parse_feed(xml: &str) -> Result<ParsedFeed, IngestError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| IngestError::MalformedFeed(e.to_string()))?;
    let root = doc.root_element();
    let mut parsed = ParsedFeed::default();
    let raw: Vec<FeedEntry> = match root.tag_name().name() {
        "rss" => {
            let channel = root
                .children()
                .find(|c| c.has_tag_name("channel"))
                .ok_or_else(|| IngestError::MalformedFeed("rss without channel".into()))?;
            channel
                .children()
                .filter(|c| c.has_tag_name("item"))
                .map(|item| FeedEntry {
                    title: child_text(item, "title"),
                    description: child_text(item, "description"),
                    link: child_text(item, "link"),
                    published: child_text(item, "pubDate"),
                })
                .collect()
        }
        "feed" => root
            .children()
            .filter(|c| c.is_element() && c.tag_name().name() == "entry")
            .map(|entry| {
                let link = entry
                    .children()
                    .filter(|c| c.is_element() && c.tag_name().name() == "link")
                    .find(|l| matches!(l.attribute("rel"), None | Some("alternate")))
                    .and_then(|l| l.attribute("href"))
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty());
                FeedEntry {
                    title: child_text(entry, "title"),
                    description: child_text(entry, "summary").or_else(|| child_text(entry, "content")),
                    link,
                    published: child_text(entry, "updated").or_else(|| child_text(entry, "published")),
                }
            })
            .collect(),
        other => {
            return Err(IngestError::MalformedFeed(format!(
                "root element <{other}> is neither rss nor feed"
            )))
        }
    };
    for e in raw {
        if e.title.is_none() && e.link.is_none() {
            parsed.skipped += 1;
        } else {
            parsed.entries.push(e);
        }
    }
    Ok(parsed)
}

/// RFC 822 / RFC 2822 (RSS) or RFC 3339 (Atom).
pub fn parse_date(s: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc2822(s)
        .or_else(|_| DateTime::parse_from_rfc3339(s))
        .ok()
        .map(|d| d.with_timezone(&Utc))
}

/// Turn a location name into a tag (`loc:<name>`, spaces as underscores).
pub fn location_tag(location: &str) -> Tag {
    Tag::new(format!("loc:{}", location.trim().replace(char::is_whitespace, "_")))
        .expect("whitespace replaced")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrawlSummary {
    pub results: Vec<InsertResult>,
    pub skipped: usize,
}

impl CrawlSummary {
    pub fn inserted(&self) -> usize {
        self.results.iter().filter(|r| r.is_inserted()).count()
    }

    pub fn duplicates(&self) -> usize {
        self.results.len() - self.inserted()
    }
}

/// Resolve an entry link against the location of a local feed file.
fn resolve_link(link: &str, feed_dir: Option<&Path>) -> String {
    if url::Url::parse(link).is_ok() {
        return link.to_string();
    }
    match feed_dir {
        Some(dir) => {
            let p: PathBuf = dir.join(link);
            let p = p.canonicalize().unwrap_or(p);
            url::Url::from_file_path(&p)
                .map(|u| u.to_string())
                .unwrap_or_else(|_| p.display().to_string())
        }
        None => link.to_string(),
    }
}

/// Crawl one approved feed document into the `articles` blackboard.
///
/// Duplicates (same title, description and outlet) are not re-added; the
/// existing article gains whatever the new sighting adds, such as another feed id.
pub fn crawl_feed(
    store: &Store,
    feed: &FeedRecord,
    document: &str,
    feed_dir: Option<&Path>,
    crawl_time: DateTime<Utc>,
) -> Result<CrawlSummary, IngestError> {
    if !feed.approved {
        return Err(IngestError::NotApproved(feed.feed_id.clone()));
    }
    let parsed = parse_feed(document)?;
    let articles = store.blackboard("articles")?;
    let feed_tag = Tag::new(format!("feed:{}", feed.feed_id)).map_err(|e| IngestError::Invalid(e.to_string()))?;
    let lang_tag = match &feed.language {
        Some(l) => Some(Tag::new(l.to_lowercase()).map_err(|e| IngestError::Invalid(e.to_string()))?),
        None => None,
    };

    let mut summary = CrawlSummary {
        skipped: parsed.skipped,
        ..CrawlSummary::default()
    };
    for entry in parsed.entries {
        let mut fields: BTreeMap<String, Value> = BTreeMap::new();
        let mut tags: BTreeSet<Tag> = BTreeSet::new();
        fields.insert("title".into(), json!(entry.title.clone().unwrap_or_default()));
        fields.insert("description".into(), json!(entry.description.clone().unwrap_or_default()));
        let published = entry.published.as_deref().and_then(parse_date);
        if published.is_none() {
            tags.insert(Tag::new("date.fallback").unwrap());
        }
        fields.insert("pub_date".into(), json!(published.unwrap_or(crawl_time).to_rfc3339()));
        fields.insert("outlet_id".into(), json!(feed.outlet_id));
        fields.insert("feed_ids".into(), json!([feed.feed_id]));
        if let Some(link) = &entry.link {
            fields.insert("link".into(), json!(resolve_link(link, feed_dir)));
        }
        if let Some(loc) = &feed.location {
            fields.insert("location".into(), json!(loc));
            tags.insert(location_tag(loc));
        }
        if let Some(l) = &feed.language {
            fields.insert("language".into(), json!(l.to_lowercase()));
        }
        tags.insert(feed_tag.clone());
        tags.extend(lang_tag.clone());

        let mut item = NewItem {
            fields: fields.clone(),
            tags: tags.clone(),
            ..NewItem::default()
        };
        if entry.link.is_some() {
            item.tags.insert(Tag::control("Scraper").unwrap());
        }
        if feed.language.as_deref().is_some_and(|l| !l.eq_ignore_ascii_case("en")) {
            item.tags.insert(Tag::control("Translator").unwrap());
        }
        let result = articles.insert_item(item)?;
        if let InsertResult::Duplicate(existing) = result {
            articles.merge_item(existing, &fields, &tags)?;
        }
        summary.results.push(result);
    }
    Ok(summary)
}

/// Load a feed document from a local path or `file://` URL.
pub fn fetch_document(location: &str) -> Result<(String, Option<PathBuf>), IngestError> {
    let path = match url::Url::parse(location) {
        Ok(u) if u.scheme() == "file" => u
            .to_file_path()
            .map_err(|_| IngestError::Fetch(format!("bad file URL `{location}`")))?,
        Ok(u) if u.scheme().len() > 1 => {
            return Err(IngestError::Fetch(format!(
                "`{location}`: only local files can be fetched in this build"
            )))
        }
        _ => PathBuf::from(location),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| IngestError::Fetch(format!("{}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf);
    Ok((text, dir))
}

/// Fetch and crawl a feed whose `url` is a local path or `file://` URL.
pub fn crawl_feed_source(store: &Store, feed: &FeedRecord, crawl_time: DateTime<Utc>) -> Result<CrawlSummary, IngestError> {
    if !feed.approved {
        return Err(IngestError::NotApproved(feed.feed_id.clone()));
    }
    let (doc, dir) = fetch_document(&feed.url)?;
    crawl_feed(store, feed, &doc, dir.as_deref(), crawl_time)
}
