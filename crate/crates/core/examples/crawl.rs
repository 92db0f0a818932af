//! Crawl the demo feeds twice: the second pass only finds duplicates, and a
//! story carried by two feeds ends up as one article listing both.

use chrono::Utc;
use mediaboard::ingest::{crawl_feed_source, register_feed, register_outlet, FeedRecord, OutletRecord};
use mediaboard::store::Store;

fn main() {
    let demo = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("demo");
    let store = Store::in_memory();
    store.init_standard().unwrap();

    let outlet = OutletRecord::from_domain("www.DailyHerald.com", Some("New York".into()));
    register_outlet(&store, &outlet).unwrap();
    let feeds: Vec<FeedRecord> = ["herald-main", "herald-sports"]
        .iter()
        .map(|id| FeedRecord {
            feed_id: id.to_string(),
            url: demo.join(format!("feeds/{id}.xml")).display().to_string(),
            outlet_id: outlet.outlet_id.clone(),
            language: Some("en".into()),
            location: outlet.location.clone(),
            approved: true,
        })
        .collect();

    for pass in 1..=2 {
        for feed in &feeds {
            register_feed(&store, feed).unwrap();
            let s = crawl_feed_source(&store, feed, Utc::now()).unwrap();
            println!(
                "pass {pass} {:<14} {} inserted, {} duplicates, {} malformed",
                feed.feed_id,
                s.inserted(),
                s.duplicates(),
                s.skipped
            );
        }
    }

    let articles = store.blackboard("articles").unwrap();
    for item in articles.scan() {
        let feeds = &item.fields["feed_ids"];
        if feeds.as_array().is_some_and(|f| f.len() > 1) {
            println!("{:?} appears in {feeds}", item.field_str("title"));
        }
    }
    println!("{} articles from outlet {}", articles.len(), outlet.outlet_id);

    let mut unapproved = feeds[0].clone();
    unapproved.approved = false;
    println!("unapproved feed: {}", crawl_feed_source(&store, &unapproved, Utc::now()).unwrap_err());
}
