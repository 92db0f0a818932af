//! The whole demo deployment on a persistent store: ingest the corpus, let the
//! modules find their work through tags, and print what came out.
//!
//! Pass a directory to keep the store; otherwise a temporary one is used.

use std::sync::Arc;

use chrono::{Duration, TimeZone, Utc};
use mediaboard::annotate::features::rebuild_idf;
use mediaboard::annotate::Lexicon;
use mediaboard::catalog::load_module_dir;
use mediaboard::framework::Registry;
use mediaboard::ingest::ingest_manifest;
use mediaboard::reports::{mood_timeline, topic_report, DateRange};
use mediaboard::scheduler::{parse_schedule, Scheduler};
use mediaboard::store::Store;

fn main() {
    let demo = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("demo");
    let tmp = tempfile::tempdir().unwrap();
    let root = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| tmp.path().join("store"));
    let store = Arc::new(Store::open(&root).unwrap());
    store.init_standard().unwrap();

    let mut clock = Utc.with_ymd_and_hms(2024, 3, 11, 0, 0, 0).unwrap();
    println!("{}", ingest_manifest(&store, &demo.join("manifest.tsv"), clock).unwrap());

    let mut sched = Scheduler::new(Arc::clone(&store), Registry::new());
    for (spec, routine) in load_module_dir(&demo.join("modules")).unwrap() {
        store.ensure_blackboard(&spec.output_blackboard).unwrap();
        sched.add_module(spec, routine).unwrap();
    }
    for entry in parse_schedule(&std::fs::read_to_string(demo.join("schedule.conf")).unwrap()).unwrap() {
        sched.register(entry).unwrap();
    }

    for tick in 1..=6 {
        let reports = sched.tick(clock);
        let work: Vec<String> = reports
            .iter()
            .filter(|r| r.items_selected > 0)
            .map(|r| format!("{}:{}", r.module, r.items_succeeded))
            .collect();
        println!("tick {tick} {clock}: {}", if work.is_empty() { "idle".into() } else { work.join(" ") });
        if tick == 1 {
            // pages are scraped now, so document frequencies can be counted
            let stop = Lexicon::load("stop_en", &demo.join("lexicons/stop_en.txt")).unwrap();
            let docs = rebuild_idf(
                &store.blackboard("articles").unwrap(),
                &stop,
                &store.private_store("FeatureExtractor").unwrap(),
            )
            .unwrap();
            println!("idf over {docs} documents");
        }
        clock += Duration::hours(1);
    }
    sched.drain();

    let articles = store.blackboard("articles").unwrap().scan();
    for row in topic_report(&articles, DateRange::all()) {
        println!(
            "{:<9} {:>2} articles, readability {:>6.1}, subjectivity {:.2}",
            row.topic,
            row.count,
            row.mean_readability.unwrap_or(f64::NAN),
            row.mean_subjectivity.unwrap_or(f64::NAN)
        );
    }
    let joy = mood_timeline(&store.blackboard("tweets").unwrap().scan(), "joy", DateRange::all()).unwrap();
    let peak = joy.peak().unwrap();
    println!("joy peaks on {} ({:.0}% of tweets)", peak.date, peak.volume * 100.0);
    println!("store at {}", root.display());
}
