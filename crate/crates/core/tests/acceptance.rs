//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{NaiveDate, TimeZone, Utc};
use mediaboard::annotate::{
    build_idf, extract_features, mood_scores, popularity_train, readability, FeatureVector, IdfTable, Lexicon, MoodLexicons,
    TrainingConfig, TrainingPair,
};
use mediaboard::framework::{run_module, Annotator, ModuleSpec, Outcome, Registry, Routine, RoutineError, RunOptions, RunReport};
use mediaboard::ingest::ingest_manifest;
use mediaboard::reports::{mean_std, mood_timeline, topic_report, DateRange};
use mediaboard::scheduler::{ScheduleEntry, Scheduler};
use mediaboard::store::{Item, ItemId, NewItem, PrivateStore, Query, Store, Tag};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use common::*;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

// `!(a > b)` on purpose: a NaN must fail the check.
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// The demo run shared by the pipeline criteria.
struct DemoRun {
    store: Arc<Store>,
    ticks: usize,
    elapsed: Duration,
}

fn run_demo() -> DemoRun {
    let (store, _) = demo_store();
    let mut sched = demo_scheduler(Arc::clone(&store), &[]);
    let t0 = Instant::now();
    let mut now = start_clock();
    let mut ticks = 0;
    while ticks < 10 {
        sched.tick(now);
        ticks += 1;
        now += chrono::Duration::hours(1);
        if !has_control_tags(&articles(&store)) && !has_control_tags(&tweets(&store)) {
            break;
        }
    }
    sched.drain();
    DemoRun {
        store,
        ticks,
        elapsed: t0.elapsed(),
    }
}

fn is_english(item: &Item) -> bool {
    item.annotations.get("lang").and_then(Value::as_str) == Some("en")
}

fn c1_emergent_pipeline(run: &DemoRun) -> Check {
    // Routines only ever see one item and their own private store.
    let _: fn(&dyn Annotator, &Item, &PrivateStore) -> Result<Outcome, RoutineError> = |a, i, p| a.annotate(i, p);

    let arts = articles(&run.store);
    ensure!(!has_control_tags(&arts), "pending FOR> tags after {} ticks", run.ticks);
    ensure!(run.elapsed < Duration::from_secs(60), "took {:?}", run.elapsed);
    let en: Vec<&Item> = arts.iter().filter(|i| is_english(i)).collect();
    ensure!(en.len() >= 30, "only {} English articles", en.len());
    for item in &en {
        for key in ["lang", "features", "readability", "subjectivity"] {
            ensure!(item.annotations.contains_key(key), "article {} lacks `{key}`", item.item_id);
        }
        for m in ["joy", "anger", "fear", "sadness"] {
            ensure!(item.annotations.contains_key(&format!("mood.{m}")), "article {} lacks mood.{m}", item.item_id);
        }
        ensure!(
            item.annotations.keys().any(|k| k.starts_with("topic.")),
            "article {} has no topic evaluation",
            item.item_id
        );
    }
    Ok(format!("{} English articles fully annotated in {} ticks, {:?}", en.len(), run.ticks, run.elapsed))
}

fn c2_dedup_idempotence() -> Check {
    let (store, first) = demo_store();
    let snapshot = |s: &Store| -> BTreeMap<String, String> {
        s.blackboard_names()
            .into_iter()
            .map(|b| (b.clone(), serde_json::to_string(&s.blackboard(&b).unwrap().scan()).unwrap()))
            .collect()
    };
    let before = snapshot(&store);
    let second = ingest_manifest(&store, &demo_dir().join("manifest.tsv"), start_clock()).map_err(|e| e.to_string())?;
    ensure!(second.inserted == 0, "second ingest inserted {}", second.inserted);
    ensure!(
        second.duplicates == first.inserted + first.duplicates,
        "second ingest saw {} duplicates, expected {}",
        second.duplicates,
        first.inserted + first.duplicates
    );
    ensure!(second.tweets == 0, "second ingest inserted {} tweets", second.tweets);
    ensure!(snapshot(&store) == before, "blackboards changed on re-ingest");
    Ok(format!("{} articles, second pass: {second}", first.inserted))
}

fn article_key(item: &Item) -> String {
    ["title", "outlet_id", "language"].map(|f| item.field_str(f).unwrap_or("")).join("|")
}

fn without_mood(map: &BTreeMap<String, Value>) -> String {
    let kept: BTreeMap<&String, &Value> = map.iter().filter(|(k, _)| !k.starts_with("mood.")).collect();
    serde_json::to_string(&kept).unwrap()
}

fn run_totals(reports: &[Vec<RunReport>]) -> BTreeMap<String, (usize, usize, usize)> {
    let mut out: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for r in reports.iter().flatten() {
        let e = out.entry(r.module.clone()).or_default();
        e.0 += r.items_selected;
        e.1 += r.items_succeeded;
        e.2 += r.items_failed;
    }
    out
}

fn c3_mood_removal() -> Check {
    let (full_store, _) = demo_store();
    let mut full = demo_scheduler(Arc::clone(&full_store), &[]);
    let (_, full_reports) = tick_hours(&mut full, start_clock(), 8);

    let (store, _) = demo_store();
    let mut partial = demo_scheduler(Arc::clone(&store), &["MoodDetector"]);
    let (now, partial_reports) = tick_hours(&mut partial, start_clock(), 8);

    let mut a = run_totals(&full_reports);
    a.remove("MoodDetector");
    let b = run_totals(&partial_reports);
    ensure!(a == b, "run totals differ without the mood module:\nfull {a:?}\nwithout {b:?}");

    let full_arts: BTreeMap<String, Item> = articles(&full_store).into_iter().map(|i| (article_key(&i), i)).collect();
    let before: BTreeMap<String, Item> = articles(&store).into_iter().map(|i| (article_key(&i), i)).collect();
    ensure!(
        full_arts.len() == before.len() && before.len() == articles(&store).len(),
        "article keys are not unique or counts differ"
    );
    for (k, item) in &before {
        ensure!(
            !item.annotations.keys().any(|a| a.starts_with("mood.")),
            "mood annotation without a mood module on {k}"
        );
        ensure!(
            without_mood(&item.annotations) == without_mood(&full_arts[k].annotations),
            "annotations of {k} differ from the full run"
        );
    }

    // Re-add the module; it picks up the pending triggers and writes only mood data.
    let (spec, routine) =
        mediaboard::catalog::load_module_file(&demo_dir().join("modules/mood.conf")).map_err(|e| e.to_string())?;
    partial.add_module(spec, routine).map_err(|e| e.to_string())?;
    partial
        .register(ScheduleEntry::new("MoodDetector", Duration::from_secs(3600), Duration::ZERO, Duration::from_secs(30)))
        .map_err(|e| e.to_string())?;
    tick_hours(&mut partial, now, 2);
    let after: BTreeMap<String, Item> = articles(&store).into_iter().map(|i| (article_key(&i), i)).collect();
    let mut scored = 0;
    for (k, old) in &before {
        let new = &after[k];
        ensure!(
            without_mood(&old.annotations) == without_mood(&new.annotations),
            "re-adding mood touched other annotations of {k}"
        );
        ensure!(
            serde_json::to_string(&old.fields).unwrap() == serde_json::to_string(&new.fields).unwrap(),
            "re-adding mood touched fields of {k}"
        );
        if new.annotations.contains_key("mood.joy") {
            scored += 1;
            for m in ["joy", "anger", "fear", "sadness"] {
                ensure!(
                    new.annotations.get(&format!("mood.{m}")) == full_arts[k].annotations.get(&format!("mood.{m}")),
                    "mood.{m} of {k} differs from the full run"
                );
            }
        } else {
            ensure!(
                !full_arts[k].annotations.contains_key("mood.joy"),
                "{k} still lacks mood after re-adding"
            );
        }
    }
    ensure!(scored > 0, "no article was scored after re-adding");
    Ok(format!("{} modules unaffected, {scored} articles scored after re-adding", b.len()))
}

struct EveryThird;

impl Annotator for EveryThird {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let n = item.fields["n"].as_u64().unwrap();
        if n.is_multiple_of(3) {
            return Err(RoutineError::new(format!("item {n} is a multiple of three")));
        }
        Ok(Outcome::new().annotate("ok", true))
    }
}

fn c4_fault_isolation() -> Check {
    for n in [1usize, 10, 31] {
        let store = Store::in_memory();
        let bb = store.create_blackboard_with("work", false).map_err(|e| e.to_string())?;
        let trigger = Tag::control("EveryThird").unwrap();
        for i in 0..n {
            bb.insert_item(NewItem::new().field("n", i as u64).tag(trigger.clone()))
                .map_err(|e| e.to_string())?;
        }
        let spec = ModuleSpec::new("EveryThird", "work").with_max_items(1000);
        let routine = Routine::analysis(EveryThird);
        let bad = n.div_ceil(3);

        let first = run_module(&store, &spec, &routine, &RunOptions::default()).map_err(|e| e.to_string())?;
        ensure!(
            first.items_selected == n && first.items_failed == bad && first.items_succeeded == n - bad,
            "n={n}: first run {first:?}"
        );
        for item in bb.scan() {
            let i = item.fields["n"].as_u64().unwrap();
            if i % 3 == 0 {
                ensure!(item.has_tag(&trigger), "n={n}: failed item {i} lost its trigger");
                ensure!(item.annotations.contains_key("sys.error.EveryThird"), "n={n}: no error recorded on {i}");
            } else {
                ensure!(item.annotations.get("ok") == Some(&Value::Bool(true)), "n={n}: item {i} not annotated");
                ensure!(!item.has_tag(&trigger), "n={n}: item {i} kept its trigger");
            }
        }
        for attempt in 2..=4 {
            let r = run_module(&store, &spec, &routine, &RunOptions::default()).map_err(|e| e.to_string())?;
            ensure!(r.items_selected == bad && r.items_failed == bad, "n={n}: attempt {attempt} {r:?}");
        }
        let last = run_module(&store, &spec, &routine, &RunOptions::default()).map_err(|e| e.to_string())?;
        ensure!(last.items_selected == 0, "n={n}: still selecting after retries");
        let failed = bb.query_items(&Query::all().require(Tag::failed("EveryThird").unwrap())).unwrap();
        ensure!(failed.len() == bad, "n={n}: {} FAILED items, expected {bad}", failed.len());
        ensure!(
            failed.iter().all(|i| i.annotations.get("sys.retries.EveryThird") == Some(&Value::from(3))),
            "n={n}: retry count not 3"
        );
    }
    Ok("failures isolated per item, FAILED> after 4 attempts".into())
}

#[derive(Debug, Clone)]
struct QueryCase {
    items: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
    require: BTreeSet<usize>,
    forbid: BTreeSet<usize>,
    fields: BTreeSet<usize>,
    limit: usize,
}

const TAGS: [&str; 6] = ["news", "sports", "en", "FOR>Scraper", "FAILED>Scraper", "loc:Paris"];
const FIELDS: [&str; 3] = ["title", "content", "link"];

fn query_case() -> impl Strategy<Value = QueryCase> {
    let set = |n: usize, max: usize| proptest::collection::btree_set(0..n, 0..=max);
    (
        proptest::collection::vec((set(TAGS.len(), 4), set(FIELDS.len(), 3)), 0..40),
        set(TAGS.len(), 2),
        set(TAGS.len(), 2),
        set(FIELDS.len(), 2),
        1usize..50,
    )
        .prop_map(|(items, require, forbid, fields, limit)| QueryCase {
            items,
            require,
            forbid,
            fields,
            limit,
        })
}

fn c5_query_oracle() -> Check {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        ..Config::default()
    });
    let t0 = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
    runner
        .run(&query_case(), |case| {
            let store = Store::in_memory();
            let bb = store.create_blackboard_with("b", false).unwrap();
            let mut ids = Vec::new();
            for (i, (tags, fields)) in case.items.iter().enumerate() {
                let mut item = NewItem::new().created_at(t0 + chrono::Duration::seconds(i as i64));
                for t in tags {
                    item = item.tag(Tag::new(TAGS[*t]).unwrap());
                }
                for f in fields {
                    item = item.field(FIELDS[*f], "x");
                }
                ids.push(bb.insert_item(item).unwrap().id());
            }
            let mut q = Query::new(case.limit);
            for t in &case.require {
                q = q.require(Tag::new(TAGS[*t]).unwrap());
            }
            for t in &case.forbid {
                q = q.forbid(Tag::new(TAGS[*t]).unwrap());
            }
            for f in &case.fields {
                q = q.require_field(FIELDS[*f]);
            }
            let got: Vec<ItemId> = bb.query_items(&q).unwrap().iter().map(|i| i.item_id).collect();

            // Oracle: fetch every item one by one and filter by hand, in insertion order.
            let mut want = Vec::new();
            for (idx, id) in ids.iter().enumerate() {
                let item = bb.get(*id).unwrap();
                let (tags, fields) = &case.items[idx];
                assert_eq!(item.tags.len(), tags.len());
                let ok = case.require.iter().all(|t| tags.contains(t))
                    && case.forbid.iter().all(|t| !tags.contains(t))
                    && case.fields.iter().all(|f| fields.contains(f));
                if ok && want.len() < case.limit {
                    want.push(item.item_id);
                }
            }
            prop_assert_eq!(got, want);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 random stores and queries agree with the brute-force oracle".into())
}

fn c6_goldens() -> Check {
    let r = readability("The cat sat.").map_err(|e| e.to_string())?;
    ensure!((r - 119.19).abs() < 0.005, "readability(\"The cat sat.\") = {r}");

    let lex = MoodLexicons::new(
        Lexicon::from_words("joy", ["happy"]).unwrap(),
        Lexicon::from_words("anger", ["furious"]).unwrap(),
        Lexicon::from_words("fear", ["afraid"]).unwrap(),
        Lexicon::from_words("sadness", ["sad"]).unwrap(),
    );
    let stop = Lexicon::from_words("stop", ["the"]).unwrap();
    let fv = extract_features("happy happy sad", &stop, &IdfTable::default()).map_err(|e| e.to_string())?;
    let s = mood_scores(&fv, &lex).map_err(|e| e.to_string())?;
    ensure!((s[0].score - 2.0 / 3.0).abs() < 1e-12, "joy = {}", s[0].score);

    let idf = build_idf(["the cat", "a dog"], &stop);
    ensure!(idf.docs == 2 && idf.idf("cat") == 1.0, "idf over 2 docs = {}", idf.idf("cat"));

    let pair = TrainingPair {
        popular: FeatureVector::from_weights([("a", 1.0)]),
        unpopular: FeatureVector::from_weights([("b", 1.0)]),
    };
    let m = popularity_train(&[pair], TrainingConfig::default()).map_err(|e| e.to_string())?;
    let want: BTreeMap<String, f64> = [("a".to_string(), 0.1), ("b".to_string(), -0.1)].into();
    ensure!(m.weights == want, "perceptron weights {:?}", m.weights);
    Ok("readability 119.19, joy 2/3, idf(N=2, df=1) 1.0, perceptron {a: 0.1, b: -0.1}".into())
}

fn c7_topic_readability(run: &DemoRun) -> Check {
    let rows = topic_report(&articles(&run.store), DateRange::all());
    let mean = |t: &str| rows.iter().find(|r| r.topic == t).and_then(|r| r.mean_readability);
    let (Some(sports), Some(politics)) = (mean("Sports"), mean("Politics")) else {
        return Err(format!("missing topic rows: {rows:?}"));
    };
    ensure!(sports > politics, "Sports {sports:.1} <= Politics {politics:.1}");
    Ok(format!("Sports {sports:.1} > Politics {politics:.1}"))
}

fn c8_holiday_peak(run: &DemoRun) -> Check {
    let tl = mood_timeline(&tweets(&run.store), "joy", DateRange::all()).map_err(|e| e.to_string())?;
    let peak = tl.peak().ok_or("empty joy timeline")?;
    let holiday = NaiveDate::from_ymd_opt(2024, 12, 25).unwrap();
    ensure!(peak.date == holiday, "joy peaks on {} (volume {})", peak.date, peak.volume);
    Ok(format!("joy peaks on {} with volume {:.2}", peak.date, peak.volume))
}

struct Slow {
    per_item: Duration,
    started: Arc<AtomicUsize>,
}

impl Annotator for Slow {
    fn annotate(&self, _: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        self.started.fetch_add(1, Ordering::SeqCst);
        std::thread::sleep(self.per_item);
        Ok(Outcome::new().annotate("slow.done", true))
    }
}

struct Quick;

impl Annotator for Quick {
    fn annotate(&self, _: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        Ok(Outcome::new().annotate("quick.done", true))
    }
}

fn c9_timeout() -> Check {
    let store = Arc::new(Store::in_memory());
    for (board, module, n) in [("slow", "Slow", 20), ("quick", "Quick", 10)] {
        let bb = store.create_blackboard_with(board, false).unwrap();
        for i in 0..n {
            bb.insert_item(NewItem::new().field("n", i).tag(Tag::control(module).unwrap()))
                .unwrap();
        }
    }
    let started = Arc::new(AtomicUsize::new(0));
    let mut sched = Scheduler::new(Arc::clone(&store), Registry::new());
    sched
        .add_module(
            ModuleSpec::new("Slow", "slow").with_threads(1),
            Routine::analysis(Slow {
                per_item: Duration::from_millis(100),
                started: Arc::clone(&started),
            }),
        )
        .unwrap();
    sched.add_module(ModuleSpec::new("Quick", "quick"), Routine::analysis(Quick)).unwrap();
    sched
        .register(ScheduleEntry::new("Slow", Duration::from_secs(3600), Duration::ZERO, Duration::from_millis(450)))
        .unwrap();
    sched.register(ScheduleEntry::hourly("Quick")).unwrap();

    let t0 = Instant::now();
    let reports = sched.tick(start_clock());
    let waited = t0.elapsed();
    let slow = reports.iter().find(|r| r.module == "Slow").ok_or("no Slow report")?;
    let quick = reports.iter().find(|r| r.module == "Quick").ok_or("no Quick report")?;
    ensure!(slow.timed_out, "Slow not reported as timed out: {slow:?}");
    ensure!(waited < Duration::from_millis(1500), "tick blocked for {waited:?}");
    ensure!(
        slow.items_succeeded >= 1 && slow.items_succeeded < 20,
        "Slow finished {} items",
        slow.items_succeeded
    );
    ensure!(!quick.timed_out && quick.items_succeeded == 10, "Quick affected: {quick:?}");

    sched.drain();
    let done = store
        .blackboard("slow")
        .unwrap()
        .scan()
        .into_iter()
        .filter(|i| i.annotations.contains_key("slow.done"))
        .count();
    ensure!(done >= slow.items_succeeded, "partial results lost: {done} < {}", slow.items_succeeded);
    ensure!(done < 20, "run was not cancelled");
    ensure!(started.load(Ordering::SeqCst) == done, "an item was started but not recorded");
    Ok(format!(
        "timed out after {} of 20 items ({done} kept after drain), concurrent module finished 10/10",
        slow.items_succeeded
    ))
}

#[derive(Debug, Clone)]
struct AggItem {
    topics: BTreeSet<usize>,
    readability: Option<f64>,
    subjectivity: Option<f64>,
    evaluated: BTreeSet<usize>,
}

const TOPICS: [&str; 4] = ["Sports", "Politics", "Business", "Science"];

fn agg_items() -> impl Strategy<Value = Vec<AggItem>> {
    let topics = || proptest::collection::btree_set(0..TOPICS.len(), 0..=3);
    proptest::collection::vec(
        (
            topics(),
            proptest::option::of(-100.0f64..150.0),
            proptest::option::of(0.0f64..1.0),
            topics(),
        )
            .prop_map(|(topics, readability, subjectivity, evaluated)| AggItem {
                topics,
                readability,
                subjectivity,
                evaluated,
            }),
        0..=200,
    )
}

/// Welford's running mean and variance, independent of the library's two-pass form.
fn welford(xs: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for x in xs {
        n += 1.0;
        let d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    (n > 0.0).then(|| (mean, (m2 / n).sqrt()))
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())),
        _ => false,
    }
}

fn c10_aggregate_oracle() -> Check {
    let mut runner = TestRunner::new(Config {
        cases: 128,
        ..Config::default()
    });
    runner
        .run(&agg_items(), |corpus| {
            let store = Store::in_memory();
            let bb = store.create_blackboard_with("articles", false).unwrap();
            let mut ids = Vec::new();
            for a in &corpus {
                let mut item = NewItem::new();
                for t in &a.topics {
                    item = item.tag(Tag::new(TOPICS[*t]).unwrap());
                }
                for t in &a.evaluated {
                    item = item.annotation(format!("topic.{}", TOPICS[*t]), 0.5);
                }
                if let Some(r) = a.readability {
                    item = item.annotation("readability", r);
                }
                if let Some(s) = a.subjectivity {
                    item = item.annotation("subjectivity", s);
                }
                ids.push(bb.insert_item(item).unwrap().id());
            }
            let rows = topic_report(&bb.scan(), DateRange::all());

            // Oracle: per-item fetches and hand aggregation.
            let fetched: Vec<Item> = ids.iter().map(|id| bb.get(*id).unwrap()).collect();
            let evaluated: BTreeSet<&str> =
                corpus.iter().flat_map(|a| a.evaluated.iter().map(|t| TOPICS[*t])).collect();
            prop_assert_eq!(rows.len(), evaluated.len());
            for (row, topic) in rows.iter().zip(&evaluated) {
                prop_assert_eq!(row.topic.as_str(), *topic);
                let members: Vec<&Item> = fetched.iter().filter(|i| i.has_tag_str(topic)).collect();
                prop_assert_eq!(row.count, members.len());
                let r = welford(members.iter().filter_map(|i| i.annotations.get("readability")?.as_f64()));
                let s = welford(members.iter().filter_map(|i| i.annotations.get("subjectivity")?.as_f64()));
                prop_assert!(close(row.mean_readability, r.map(|v| v.0)), "{:?} vs {:?}", row, r);
                prop_assert!(close(row.stddev_readability, r.map(|v| v.1)), "{:?} vs {:?}", row, r);
                prop_assert!(close(row.mean_subjectivity, s.map(|v| v.0)), "{:?} vs {:?}", row, s);
                prop_assert!(close(row.stddev_subjectivity, s.map(|v| v.1)), "{:?} vs {:?}", row, s);
            }
            // the library helper agrees with the oracle too
            let xs: Vec<f64> = corpus.iter().filter_map(|a| a.readability).collect();
            prop_assert!(close(mean_std(&xs).map(|v| v.1), welford(xs.iter().copied()).map(|v| v.1)));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("128 random corpora of up to 200 items match the brute-force aggregates within 1e-9".into())
}

fn main() {
    let demo = run_demo();
    let criteria: Vec<Criterion> = vec![
        ("emergent pipeline", Box::new(|| c1_emergent_pipeline(&demo))),
        ("deduplication idempotence", Box::new(c2_dedup_idempotence)),
        ("module removal and re-addition", Box::new(c3_mood_removal)),
        ("per-item fault isolation", Box::new(c4_fault_isolation)),
        ("query oracle", Box::new(c5_query_oracle)),
        ("golden values", Box::new(c6_goldens)),
        ("topic readability ordering", Box::new(|| c7_topic_readability(&demo))),
        ("holiday joy peak", Box::new(|| c8_holiday_peak(&demo))),
        ("scheduler timeout", Box::new(c9_timeout)),
        ("report aggregate oracle", Box::new(c10_aggregate_oracle)),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(std::panic::AssertUnwindSafe(check)) {
            Ok(Ok(detail)) => println!("criterion {:>2} PASS  {name}: {detail}", n + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", n + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: panicked", n + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
