//! Virtual-clock scheduling: periods, offsets, a timeout, and the skip policy.

use std::sync::Arc;
use std::time::Duration;

use chrono::{TimeZone, Utc};
use mediaboard::framework::{Annotator, ModuleSpec, Outcome, Registry, Routine, RoutineError};
use mediaboard::scheduler::{ScheduleEntry, Scheduler};
use mediaboard::store::{Item, NewItem, PrivateStore, Store, Tag};

struct Nap(Duration);

impl Annotator for Nap {
    fn annotate(&self, _: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        std::thread::sleep(self.0);
        Ok(Outcome::new().annotate("rested", true))
    }
}

fn main() {
    let store = Arc::new(Store::in_memory());
    let board = store.create_blackboard_with("jobs", false).unwrap();
    for i in 0..12 {
        board
            .insert_item(
                NewItem::new()
                    .field("n", i)
                    .tag(Tag::control("Slow").unwrap())
                    .tag(Tag::control("Fast").unwrap()),
            )
            .unwrap();
    }

    let mut sched = Scheduler::new(Arc::clone(&store), Registry::new());
    sched
        .add_module(ModuleSpec::new("Slow", "jobs").with_threads(1), Routine::analysis(Nap(Duration::from_millis(80))))
        .unwrap();
    sched.add_module(ModuleSpec::new("Fast", "jobs"), Routine::analysis(Nap(Duration::ZERO))).unwrap();
    // Slow gets 300 ms per run; Fast runs every half hour, 10 minutes past.
    sched
        .register(ScheduleEntry::new("Slow", Duration::from_secs(3600), Duration::ZERO, Duration::from_millis(300)))
        .unwrap();
    sched
        .register(ScheduleEntry::new("Fast", Duration::from_secs(1800), Duration::from_secs(600), Duration::from_secs(5)))
        .unwrap();

    let mut now = Utc.with_ymd_and_hms(2024, 3, 11, 0, 0, 0).unwrap();
    for _ in 0..4 {
        println!("{now}: due {:?}", sched.due(now));
        for r in sched.tick(now) {
            println!(
                "  {:<5} selected {:>2} ok {:>2}{}",
                r.module,
                r.items_selected,
                r.items_succeeded,
                if r.timed_out { "  (timed out)" } else { "" }
            );
        }
        if !sched.skipped_last_tick().is_empty() {
            println!("  skipped, still running: {:?}", sched.skipped_last_tick());
        }
        sched.drain();
        now += chrono::Duration::minutes(30);
    }
    // a slot that has already passed unlaunched is reported as the due time
    println!("at {now} Fast is due for its {:?} slot", sched.next_due("Fast", now));
}
