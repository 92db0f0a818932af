//! Discovery of candidate feeds on web pages.

use std::collections::BTreeSet;

use scraper::{Html, Selector};
use url::Url;

use super::feed::FeedRecord;

const FEED_TYPES: [&str; 2] = ["application/rss+xml", "application/atom+xml"];

fn looks_like_feed(href: &str) -> bool {
    let path = href.split(['?', '#']).next().unwrap_or("").to_ascii_lowercase();
    path.ends_with(".rss") || path.ends_with(".xml") || path.ends_with("atom")
}

/// Feed id for a discovered URL: short, stable, and filename-safe.
pub fn feed_id_for(url: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(url.as_bytes());
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("found-{hex}")
}

/// Candidate feeds referenced by a page. Nothing found is an empty list.
/// Every candidate comes back unapproved.
pub fn find_feeds(page_html: &str, base_url: &str) -> Vec<FeedRecord> {
    let Ok(base) = Url::parse(base_url) else {
        return Vec::new();
    };
    let doc = Html::parse_document(page_html);
    let links = Selector::parse("link[rel~=alternate][href]").expect("static selector");
    let anchors = Selector::parse("a[href]").expect("static selector");

    let mut hrefs: Vec<&str> = Vec::new();
    for l in doc.select(&links) {
        let ty = l.value().attr("type").unwrap_or("").trim().to_ascii_lowercase();
        if FEED_TYPES.contains(&ty.as_str()) {
            hrefs.extend(l.value().attr("href"));
        }
    }
    for a in doc.select(&anchors) {
        if let Some(h) = a.value().attr("href").filter(|h| looks_like_feed(h)) {
            hrefs.push(h);
        }
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for href in hrefs {
        let Ok(abs) = base.join(href.trim()) else { continue };
        let url = abs.to_string();
        if !seen.insert(url.clone()) {
            continue;
        }
        let outlet = abs
            .host_str()
            .map(|h| h.trim_start_matches("www.").to_lowercase())
            .unwrap_or_default();
        out.push(FeedRecord {
            feed_id: feed_id_for(&url),
            url,
            outlet_id: outlet,
            language: None,
            location: None,
            approved: false,
        });
    }
    out
}
