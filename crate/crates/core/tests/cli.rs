//! The `mediaboard` binary end to end, against stores in temporary directories.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::demo_dir;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mediaboard"))
}

fn run(store: &Path, args: &[&str]) -> Output {
    bin().arg("--store").arg(store).args(args).output().unwrap()
}

fn ok(store: &Path, args: &[&str]) -> String {
    let out = run(store, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(store: &Path, args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ok(store, &full)).unwrap()
}

fn fresh() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    ok(&store, &["init"]);
    (dir, store)
}

#[test]
fn init_creates_the_standard_blackboards() {
    let (_dir, store) = fresh();
    let status = json(&store, &["status"]);
    let names: Vec<&str> = status["blackboards"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["articles", "feeds", "locations", "outlets", "queries", "tweets", "urls"]);
    assert!(status["blackboards"].as_array().unwrap().iter().all(|b| b["items"] == 0));
    assert!(status["modules"].as_array().unwrap().is_empty());
}

#[test]
fn commands_need_an_initialized_store() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&dir.path().join("nowhere"), &["status"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("init"));

    let out = bin().arg("status").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--store"));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn settings_without_a_name_are_rejected() {
    let (dir, store) = fresh();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "input_blackboard = articles\nmax_items_per_run = 5\nthreads = 1\n").unwrap();
    let out = run(&store, &["register", conf.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`name`"));

    let out = run(&store, &["--json", "register", conf.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("name"));
}

#[test]
fn registering_twice_is_an_error() {
    let (_dir, store) = fresh();
    let conf = demo_dir().join("modules/readability.conf");
    ok(&store, &["register", conf.to_str().unwrap()]);
    let out = run(&store, &["register", conf.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("already registered"));
    ok(&store, &["unregister", "Readability"]);
    ok(&store, &["register", conf.to_str().unwrap()]);
}

fn rss(items: &[(&str, &str)]) -> String {
    let body: String = items
        .iter()
        .map(|(t, d)| format!("<item><title>{t}</title><description>{d}</description></item>"))
        .collect();
    format!("<?xml version=\"1.0\"?><rss version=\"2.0\"><channel><title>x</title>{body}</channel></rss>")
}

#[test]
fn manifest_ingest_counts_and_is_idempotent() {
    let (dir, store) = fresh();
    std::fs::write(dir.path().join("a.xml"), rss(&[("One", "a"), ("Two", "b"), ("Three", "c")])).unwrap();
    std::fs::write(dir.path().join("b.xml"), rss(&[("Four", "d"), ("Five", "e")])).unwrap();
    let manifest = dir.path().join("manifest.tsv");
    std::fs::write(
        &manifest,
        "feed\ta.xml\texample.com\ten\t-\nfeed\tb.xml\texample.com\ten\tBoston\n",
    )
    .unwrap();
    let first = ok(&store, &["ingest", manifest.to_str().unwrap()]);
    assert!(first.contains("2 feeds: 5 inserted, 0 duplicates"), "{first}");
    let again = ok(&store, &["ingest", manifest.to_str().unwrap()]);
    assert!(again.contains("0 inserted, 5 duplicates"), "{again}");

    let status = json(&store, &["status"]);
    let articles = status["blackboards"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["name"] == "articles")
        .unwrap()
        .clone();
    assert_eq!(articles["items"], 5);
    assert_eq!(articles["tags"]["loc:Boston"], 2);
}

#[test]
fn demo_walkthrough_exports_deterministically() {
    let (dir, store) = fresh();
    for entry in std::fs::read_dir(demo_dir().join("modules")).unwrap() {
        ok(&store, &["register", entry.unwrap().path().to_str().unwrap()]);
    }
    ok(&store, &["schedule", demo_dir().join("schedule.conf").to_str().unwrap()]);
    ok(&store, &["ingest", demo_dir().join("manifest.tsv").to_str().unwrap()]);
    ok(&store, &["tick", "--start", "2024-03-11T00:00:00Z"]);
    let idf = ok(&store, &["build-idf"]);
    assert!(idf.contains("35 documents"), "{idf}");
    let ticks = json(&store, &["tick", "5"]);
    assert_eq!(ticks["ticks"].as_array().unwrap().len(), 5);

    let status = json(&store, &["status"]);
    assert_eq!(status["clock"], "2024-03-11T06:00:00Z");
    let pending: u64 = status["blackboards"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|b| b["tags"].as_object().unwrap().iter())
        .filter(|(t, _)| t.starts_with("FOR>"))
        .map(|(_, n)| n.as_u64().unwrap())
        .sum();
    assert_eq!(pending, 0);

    let xml = ok(&store, &["export", "topics"]);
    assert_eq!(xml, ok(&store, &["export", "topics"]));
    assert!(xml.contains("generated_at=\"2024-03-11T06:00:00Z\""));
    assert!(xml.contains("topic=\"Sports\""));

    let out = dir.path().join("moods.ndjson");
    ok(
        &store,
        &["export", "moods", "--format", "ndjson", "--from", "2024-12-25T00:00:00Z", "--to", "2024-12-26T00:00:00Z", "--out", out.to_str().unwrap()],
    );
    let rows: Vec<Value> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 4);
    let joy = rows.iter().find(|r| r["mood"] == "joy").unwrap();
    assert_eq!(joy["date"], "2024-12-25");
    assert_eq!(joy["volume"], 0.7);

    for kind in ["outlets", "style-distances"] {
        let text = ok(&store, &["export", kind, "--format", "ndjson"]);
        assert!(text.lines().count() >= 2, "{kind}: {text}");
    }
}
