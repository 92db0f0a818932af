//! Items, tags, annotations and tag queries on one blackboard.

use mediaboard::store::{Query, Store, Tag};
use mediaboard::store::NewItem;

fn tag(s: &str) -> Tag {
    Tag::new(s).unwrap()
}

fn main() {
    let store = Store::in_memory();
    store.init_standard().unwrap();
    let articles = store.blackboard("articles").unwrap();

    let story = |title: &str, outlet: &str| {
        NewItem::new()
            .field("title", title)
            .field("description", "")
            .field("outlet_id", outlet)
            .tag(tag("en"))
    };
    let a = articles.insert_item(story("Late goal seals win", "dailyherald.com").tag(tag("FOR>Scraper"))).unwrap();
    let b = articles.insert_item(story("Central bank holds rates", "dailyherald.com")).unwrap();
    // same title, description and outlet: a duplicate, nothing is added
    let again = articles.insert_item(story("Late goal seals win", "dailyherald.com")).unwrap();
    println!("inserted {:?} and {:?}; re-insert gave {:?}", a.id(), b.id(), again);
    // another outlet running the same headline is a different article
    articles.insert_item(story("Late goal seals win", "eveningpost.co.uk")).unwrap();

    articles.add_tags(b.id(), &[tag("Business")].into()).unwrap();
    articles.set_annotation(b.id(), "readability", 52.3.into()).unwrap();

    let pending = articles.query_items(&Query::new(10).require(tag("FOR>Scraper"))).unwrap();
    println!("waiting for the scraper: {:?}", pending.iter().map(|i| i.field_str("title")).collect::<Vec<_>>());

    let not_business = articles.query_items(&Query::all().require(tag("en")).forbid(tag("Business"))).unwrap();
    println!("English, not Business: {}", not_business.len());

    for (t, n) in articles.list_tags() {
        println!("  {t:<14} {n}");
    }
    println!("{}", serde_json::to_string_pretty(&articles.get(b.id()).unwrap()).unwrap());
}
