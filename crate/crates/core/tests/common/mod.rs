//! Shared fixtures for the integration tests: the demo corpus and pipeline.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use chrono::{DateTime, Duration, TimeZone, Utc};
use mediaboard::catalog::load_module_dir;
use mediaboard::framework::{Registry, RunReport};
use mediaboard::ingest::{ingest_manifest, IngestSummary};
use mediaboard::scheduler::{parse_schedule, Scheduler};
use mediaboard::store::{Item, Store};

pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("demo")
}

pub fn start_clock() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 3, 11, 0, 0, 0).unwrap()
}

/// Fresh in-memory store with the standard blackboards and the demo corpus.
pub fn demo_store() -> (Arc<Store>, IngestSummary) {
    let store = Arc::new(Store::in_memory());
    store.init_standard().unwrap();
    let summary = ingest_manifest(&store, &demo_dir().join("manifest.tsv"), start_clock()).unwrap();
    (store, summary)
}

/// Scheduler over every demo module except those named in `without`.
pub fn demo_scheduler(store: Arc<Store>, without: &[&str]) -> Scheduler {
    let mut sched = Scheduler::new(Arc::clone(&store), Registry::new());
    for (spec, routine) in load_module_dir(&demo_dir().join("modules")).unwrap() {
        if without.contains(&spec.name.as_str()) {
            continue;
        }
        store.ensure_blackboard(&spec.output_blackboard).unwrap();
        sched.add_module(spec, routine).unwrap();
    }
    let text = std::fs::read_to_string(demo_dir().join("schedule.conf")).unwrap();
    for entry in parse_schedule(&text).unwrap() {
        if sched.registry().contains(&entry.module) {
            sched.register(entry).unwrap();
        }
    }
    sched
}

/// Tick hourly from `from`, `n` times. Returns the clock after the last tick
/// and every tick's reports.
pub fn tick_hours(sched: &mut Scheduler, from: DateTime<Utc>, n: usize) -> (DateTime<Utc>, Vec<Vec<RunReport>>) {
    let mut now = from;
    let mut all = Vec::new();
    for _ in 0..n {
        all.push(sched.tick(now));
        now += Duration::hours(1);
    }
    sched.drain();
    (now, all)
}

pub fn articles(store: &Store) -> Vec<Item> {
    store.blackboard("articles").unwrap().scan()
}

pub fn tweets(store: &Store) -> Vec<Item> {
    store.blackboard("tweets").unwrap().scan()
}

pub fn has_control_tags(items: &[Item]) -> bool {
    items.iter().any(|i| i.tags.iter().any(|t| t.as_str().starts_with("FOR>")))
}
