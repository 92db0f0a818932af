//! Topic, mood and outlet reports over hand-built items, exported as XML and NDJSON.

use chrono::{TimeZone, Utc};
use mediaboard::reports::{
    export, mood_timeline, outlet_profiles, style_distances, topic_report, DateRange, ExportFormat, Report,
};
use mediaboard::store::{NewItem, Store, Tag};

fn main() {
    let store = Store::in_memory();
    store.init_standard().unwrap();
    let articles = store.blackboard("articles").unwrap();
    let rows = [
        ("herald.com", "Sports", 88.0, 0.4),
        ("herald.com", "Sports", 92.0, 0.2),
        ("herald.com", "Politics", 35.0, 0.1),
        ("post.co.uk", "Politics", -20.0, 0.3),
        ("post.co.uk", "Business", 41.0, 0.0),
    ];
    for (i, (outlet, topic, read, subj)) in rows.iter().enumerate() {
        articles
            .insert_item(
                NewItem::new()
                    .field("title", format!("story {i}"))
                    .field("outlet_id", *outlet)
                    .field("pub_date", format!("2024-03-{:02}T09:00:00Z", 10 + i))
                    .tag(Tag::new(*topic).unwrap())
                    .annotation(format!("topic.{topic}"), 0.9)
                    .annotation("readability", *read)
                    .annotation("subjectivity", *subj),
            )
            .unwrap();
    }
    let tweets = store.blackboard("tweets").unwrap();
    for (day, joy) in [(24, 0.0), (24, 0.5), (25, 1.0), (25, 0.25), (25, 0.0)] {
        tweets
            .insert_item(
                NewItem::new()
                    .field("content", "…")
                    .field("timestamp", format!("2024-12-{day}T12:00:00Z"))
                    .annotation("mood.joy", joy),
            )
            .unwrap();
    }

    let at = Utc.with_ymd_and_hms(2024, 3, 20, 0, 0, 0).unwrap();
    let topics = topic_report(&articles.scan(), DateRange::all());
    print!("{}", export(&Report::topics(&topics, at), ExportFormat::Xml));

    let march_first_half = DateRange {
        start: Some(Utc.with_ymd_and_hms(2024, 3, 1, 0, 0, 0).unwrap()),
        end: Some(Utc.with_ymd_and_hms(2024, 3, 13, 0, 0, 0).unwrap()),
    };
    let early = topic_report(&articles.scan(), march_first_half);
    println!("before the 13th: {:?}", early.iter().map(|r| (&r.topic, r.count)).collect::<Vec<_>>());

    let joy = mood_timeline(&tweets.scan(), "joy", DateRange::all()).unwrap();
    print!("{}", export(&Report::moods(std::slice::from_ref(&joy), at), ExportFormat::Ndjson));
    println!("joy peaks on {}", joy.peak().unwrap().date);

    let profiles = outlet_profiles(&articles.scan(), None, DateRange::all()).unwrap();
    print!("{}", export(&Report::outlets(&profiles, at), ExportFormat::Ndjson));
    print!("{}", export(&Report::style_distances(&style_distances(&profiles), at), ExportFormat::Xml));

    let known = ["herald.com".to_string()].into();
    println!("with a closed outlet list: {}", outlet_profiles(&articles.scan(), Some(&known), DateRange::all()).unwrap_err());
}
