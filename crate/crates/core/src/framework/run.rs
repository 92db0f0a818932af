use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::routine::{Routine, RoutineError};
use super::spec::{ModuleSpec, TriggerMode};
use crate::store::{Blackboard, Item, ItemUpdate, PrivateStore, Store, StoreError};

/// Failed attempts after which an item is given up on: the first attempt plus three retries.
pub const MAX_RETRIES: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub module: String,
    pub started_at: DateTime<Utc>,
    pub ended_at: DateTime<Utc>,
    pub items_selected: usize,
    pub items_succeeded: usize,
    pub items_failed: usize,
    pub timed_out: bool,
    /// Set when the run could not start at all (e.g. a missing blackboard).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn items_unprocessed(&self) -> usize {
        self.items_selected - self.items_succeeded - self.items_failed
    }
}

/// Live counters of a run, readable from another thread while it executes.
#[derive(Debug, Default)]
pub struct RunProgress {
    selected: AtomicUsize,
    succeeded: AtomicUsize,
    failed: AtomicUsize,
    started_at: std::sync::OnceLock<DateTime<Utc>>,
}

impl RunProgress {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    /// Report as of now; used by the scheduler when it stops waiting for a run.
    pub fn snapshot(&self, module: &str, timed_out: bool) -> RunReport {
        let now = Utc::now();
        RunReport {
            module: module.to_string(),
            started_at: *self.started_at.get().unwrap_or(&now),
            ended_at: now,
            items_selected: self.selected.load(Ordering::SeqCst),
            items_succeeded: self.succeeded.load(Ordering::SeqCst),
            items_failed: self.failed.load(Ordering::SeqCst),
            timed_out,
            error: None,
        }
    }
}

/// Limits on one run. Items are never interrupted midway: the deadline and
/// the cancel flag are checked before each item is started.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
    pub progress: Option<Arc<RunProgress>>,
}

impl RunOptions {
    fn should_stop(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
            || self
                .cancel
                .as_ref()
                .is_some_and(|c| c.load(Ordering::SeqCst))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("module `{module}` uses trigger mode with an output routine; output modules must scan")]
    OutputNeedsScan { module: String },
}

/// One launch of a module: select its work, process each item independently,
/// and write results back as tags and annotations.
pub fn run_module(
    store: &Store,
    spec: &ModuleSpec,
    routine: &Routine,
    opts: &RunOptions,
) -> Result<RunReport, RunError> {
    let progress = opts.progress.clone().unwrap_or_default();
    let _ = progress.started_at.set(Utc::now());
    let input = store.blackboard(&spec.input_blackboard)?;
    let output = store.blackboard(&spec.output_blackboard)?;
    let state = store.private_store(&spec.name)?;

    if let Routine::Output(reporter) = routine {
        if spec.trigger_mode != TriggerMode::Scan {
            return Err(RunError::OutputNeedsScan {
                module: spec.name.clone(),
            });
        }
        let items = input.query_items(&spec.selection_query())?;
        progress.selected.store(items.len(), Ordering::SeqCst);
        let mut error = None;
        match reporter.report(&items, &state) {
            Ok(new_items) => {
                for item in new_items {
                    output.insert_item(item)?;
                }
                progress.succeeded.store(items.len(), Ordering::SeqCst);
            }
            Err(e) => {
                progress.failed.store(items.len(), Ordering::SeqCst);
                error = Some(e.0);
            }
        }
        let mut report = progress.snapshot(&spec.name, false);
        report.error = error;
        return Ok(report);
    }

    let items = input.query_items(&spec.selection_query())?;
    progress.selected.store(items.len(), Ordering::SeqCst);
    let next = AtomicUsize::new(0);
    let stopped_early = AtomicBool::new(false);
    let store_error: std::sync::Mutex<Option<StoreError>> = std::sync::Mutex::new(None);

    let worker = || loop {
        if opts.should_stop() {
            if next.load(Ordering::SeqCst) < items.len() {
                stopped_early.store(true, Ordering::SeqCst);
            }
            return;
        }
        let idx = next.fetch_add(1, Ordering::SeqCst);
        let Some(item) = items.get(idx) else { return };
        let result = process_one(spec, routine, item, &state, &input, &output);
        match result {
            Ok(true) => progress.succeeded.fetch_add(1, Ordering::SeqCst),
            Ok(false) => progress.failed.fetch_add(1, Ordering::SeqCst),
            Err(e) => {
                // the store itself is failing; stop taking work
                store_error.lock().unwrap().get_or_insert(e);
                stopped_early.store(true, Ordering::SeqCst);
                next.store(items.len(), Ordering::SeqCst);
                return;
            }
        };
    };

    let workers = spec.threads.clamp(1, items.len().max(1));
    if workers == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(worker);
            }
        });
    }

    if let Some(e) = store_error.into_inner().unwrap() {
        return Err(e.into());
    }
    Ok(progress.snapshot(&spec.name, stopped_early.load(Ordering::SeqCst)))
}

/// Process one item and write its result. Returns whether the routine succeeded.
fn process_one(
    spec: &ModuleSpec,
    routine: &Routine,
    item: &Item,
    state: &PrivateStore,
    input: &Blackboard,
    output: &Blackboard,
) -> Result<bool, StoreError> {
    let result = catch_unwind(AssertUnwindSafe(|| routine.process(item, state)))
        .unwrap_or_else(|panic| Err(RoutineError::new(panic_message(&panic))));

    match result {
        Ok(production) => {
            for new_item in production.new_items {
                output.insert_item(new_item)?;
            }
            let mut update = ItemUpdate {
                set_fields: production.set_fields,
                annotations: production.outcome.annotations,
                remove_tags: production.outcome.remove_tags,
                add_tags: production.outcome.add_tags,
            };
            if spec.trigger_mode == TriggerMode::Trigger {
                update.remove_tags.insert(spec.trigger_tag());
            }
            update.add_tags.extend(spec.emit_tags.iter().cloned());
            input.apply(item.item_id, &update)?;
            Ok(true)
        }
        Err(err) => {
            let retry_key = spec.retry_annotation();
            input.modify(item.item_id, |stored| {
                let failures = stored
                    .annotations
                    .get(&retry_key)
                    .and_then(Value::as_u64)
                    .unwrap_or(0);
                stored
                    .annotations
                    .insert(format!("sys.error.{}", spec.name), Value::from(err.0.clone()));
                if failures >= MAX_RETRIES {
                    stored.tags.remove(&spec.trigger_tag());
                    stored.tags.insert(spec.failed_tag());
                } else {
                    stored
                        .annotations
                        .insert(retry_key.clone(), Value::from(failures + 1));
                }
            })?;
            Ok(false)
        }
    }
}

fn panic_message(panic: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = panic.downcast_ref::<&str>() {
        format!("routine panicked: {s}")
    } else if let Some(s) = panic.downcast_ref::<String>() {
        format!("routine panicked: {s}")
    } else {
        "routine panicked".to_string()
    }
}
