//! Main-text extraction from an article page, and feed discovery on a home page.

use mediaboard::ingest::{find_feeds, propose_feeds, scrape_html};
use mediaboard::store::Store;

fn main() {
    let demo = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("demo");
    let page = std::fs::read_to_string(demo.join("pages/herald-01.html")).unwrap();
    println!("page is {} bytes of HTML", page.len());
    println!("story: {}", scrape_html(&page).unwrap());

    let home = r#"<html><head>
        <link rel="alternate" type="application/rss+xml" href="/rss/world.xml">
        <link rel="alternate" type="application/atom+xml" href="https://feeds.example.org/sport/atom">
        <link rel="stylesheet" href="/site.css">
      </head><body>
        <a href="/rss/world.xml">World (RSS)</a> <a href="business.rss">Business</a> <a href="/about">About</a>
      </body></html>"#;
    let found = find_feeds(home, "https://www.example.org/news/");
    for f in &found {
        println!("found {} ({}) outlet={} approved={}", f.url, f.feed_id, f.outlet_id, f.approved);
    }

    let store = Store::in_memory();
    store.init_standard().unwrap();
    let first = propose_feeds(&store, &found).unwrap();
    let second = propose_feeds(&store, &found).unwrap();
    println!("proposed {} candidates, {} on a second look", first.len(), second.len());
}
