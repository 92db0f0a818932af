//! Time-slot launching of modules with enforced timeouts.
//!
//! The scheduler looks only at clocks and its schedule table. Which items get
//! processed, and in what order across modules, is decided entirely by the
//! tags on the blackboards.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use chrono::{DateTime, TimeZone, Utc};

use crate::framework::{
    run_module, ModuleSpec, Registry, RegistryError, Routine, RunOptions, RunProgress, RunReport,
};
use crate::settings;
use crate::store::Store;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub module: String,
    pub period: Duration,
    /// Position of the launch slot within each period.
    pub offset: Duration,
    pub timeout: Duration,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("module `{0}` is not registered")]
    UnknownModule(String),
    #[error("module `{0}` already has a schedule entry")]
    DuplicateEntry(String),
    #[error("schedule entry for `{module}`: {message}")]
    InvalidEntry { module: String, message: String },
    #[error("schedule file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl ScheduleEntry {
    pub fn new(module: &str, period: Duration, offset: Duration, timeout: Duration) -> Self {
        ScheduleEntry {
            module: module.to_string(),
            period,
            offset,
            timeout,
            enabled: true,
        }
    }

    pub fn hourly(module: &str) -> Self {
        Self::new(module, Duration::from_secs(3600), Duration::ZERO, Duration::from_secs(600))
    }

    pub fn disabled(mut self) -> Self {
        self.enabled = false;
        self
    }

    fn validate(&self) -> Result<(), ScheduleError> {
        let invalid = |m: &str| ScheduleError::InvalidEntry {
            module: self.module.clone(),
            message: m.to_string(),
        };
        if self.period.as_secs() == 0 {
            return Err(invalid("period must be at least one second"));
        }
        if self.offset >= self.period {
            return Err(invalid("offset must be smaller than the period"));
        }
        if self.timeout.is_zero() {
            return Err(invalid("timeout must be positive"));
        }
        Ok(())
    }

    /// The most recent slot at or before `now`.
    pub fn latest_slot(&self, now: DateTime<Utc>) -> DateTime<Utc> {
        let period = self.period.as_secs() as i64;
        let offset = self.offset.as_secs() as i64;
        let k = (now.timestamp() - offset).div_euclid(period);
        Utc.timestamp_opt(k * period + offset, 0).unwrap()
    }

    pub fn to_settings(&self) -> String {
        format!(
            "module = {}\nperiod_seconds = {}\noffset_seconds = {}\ntimeout_seconds = {}\nenabled = {}\n",
            self.module,
            self.period.as_secs(),
            self.offset.as_secs(),
            self.timeout.as_secs(),
            self.enabled
        )
    }
}

/// Parse a schedule file: one blank-line separated block per entry.
pub fn parse_schedule(text: &str) -> Result<Vec<ScheduleEntry>, ScheduleError> {
    let blocks = settings::parse_blocks(text).map_err(|e| ScheduleError::Parse {
        line: e.line,
        message: e.message,
    })?;
    let mut out = Vec::new();
    for block in blocks {
        let first_line = block[0].line;
        let get = |key: &str| block.iter().find(|e| e.key == key);
        for e in &block {
            if !matches!(
                e.key.as_str(),
                "module" | "period_seconds" | "offset_seconds" | "timeout_seconds" | "enabled"
            ) {
                return Err(ScheduleError::Parse {
                    line: e.line,
                    message: format!("unknown key `{}`", e.key),
                });
            }
        }
        let module = get("module")
            .ok_or(ScheduleError::Parse {
                line: first_line,
                message: "entry without `module`".into(),
            })?
            .value
            .clone();
        let secs = |key: &str, default: Option<u64>| -> Result<Duration, ScheduleError> {
            match get(key) {
                Some(e) => e.value.parse::<u64>().map(Duration::from_secs).map_err(|_| {
                    ScheduleError::Parse {
                        line: e.line,
                        message: format!("`{key}` must be a whole number of seconds"),
                    }
                }),
                None => default.map(Duration::from_secs).ok_or(ScheduleError::Parse {
                    line: first_line,
                    message: format!("entry for `{module}` is missing `{key}`"),
                }),
            }
        };
        let enabled = match get("enabled") {
            Some(e) => e.value.parse::<bool>().map_err(|_| ScheduleError::Parse {
                line: e.line,
                message: "`enabled` must be true or false".into(),
            })?,
            None => true,
        };
        let entry = ScheduleEntry {
            period: secs("period_seconds", None)?,
            offset: secs("offset_seconds", Some(0))?,
            timeout: secs("timeout_seconds", None)?,
            enabled,
            module,
        };
        entry.validate()?;
        out.push(entry);
    }
    Ok(out)
}

struct InFlight {
    handle: JoinHandle<()>,
}

/// Launches registered modules in their time slots.
///
/// `tick` takes the current time as a parameter so a virtual clock can drive
/// it. A module whose previous run is still executing when its next slot comes
/// up skips that slot.
pub struct Scheduler {
    store: Arc<Store>,
    registry: Registry,
    entries: BTreeMap<String, ScheduleEntry>,
    last_launch: BTreeMap<String, DateTime<Utc>>,
    in_flight: BTreeMap<String, InFlight>,
    skipped: Vec<String>,
}

impl Scheduler {
    pub fn new(store: Arc<Store>, registry: Registry) -> Self {
        Scheduler {
            store,
            registry,
            entries: BTreeMap::new(),
            last_launch: BTreeMap::new(),
            in_flight: BTreeMap::new(),
            skipped: Vec::new(),
        }
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn add_module(&mut self, spec: ModuleSpec, routine: Routine) -> Result<(), ScheduleError> {
        Ok(self.registry.register(spec, routine)?)
    }

    /// Remove a module together with its schedule entry.
    pub fn remove_module(&mut self, name: &str) -> Result<(), ScheduleError> {
        self.registry.unregister(name)?;
        self.entries.remove(name);
        Ok(())
    }

    pub fn register(&mut self, entry: ScheduleEntry) -> Result<(), ScheduleError> {
        if !self.registry.contains(&entry.module) {
            return Err(ScheduleError::UnknownModule(entry.module));
        }
        if self.entries.contains_key(&entry.module) {
            return Err(ScheduleError::DuplicateEntry(entry.module));
        }
        entry.validate()?;
        self.entries.insert(entry.module.clone(), entry);
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = &ScheduleEntry> {
        self.entries.values()
    }

    pub fn last_launches(&self) -> &BTreeMap<String, DateTime<Utc>> {
        &self.last_launch
    }

    /// Restore launch history saved from an earlier process.
    pub fn restore_last_launches(&mut self, history: BTreeMap<String, DateTime<Utc>>) {
        self.last_launch = history;
    }

    /// Modules skipped by the most recent tick because they were still running.
    pub fn skipped_last_tick(&self) -> &[String] {
        &self.skipped
    }

    /// Smallest period among enabled entries.
    pub fn min_period(&self) -> Option<Duration> {
        self.entries
            .values()
            .filter(|e| e.enabled)
            .map(|e| e.period)
            .min()
    }

    /// Modules with a slot in `(last launch, now]`. Never-launched modules are due.
    pub fn due(&self, now: DateTime<Utc>) -> Vec<String> {
        self.entries
            .values()
            .filter(|e| e.enabled)
            .filter(|e| {
                let slot = e.latest_slot(now);
                self.last_launch.get(&e.module).is_none_or(|last| *last < slot)
            })
            .map(|e| e.module.clone())
            .collect()
    }

    /// The next slot at which `module` becomes due, as seen from `now`.
    pub fn next_due(&self, module: &str, now: DateTime<Utc>) -> Option<DateTime<Utc>> {
        let e = self.entries.get(module).filter(|e| e.enabled)?;
        if self.due(now).iter().any(|m| m == module) {
            return Some(e.latest_slot(now));
        }
        Some(e.latest_slot(now) + chrono::Duration::from_std(e.period).ok()?)
    }

    /// Launch every due module concurrently and wait for each up to its timeout.
    pub fn tick(&mut self, now: DateTime<Utc>) -> Vec<RunReport> {
        self.skipped.clear();
        self.in_flight.retain(|_, f| !f.handle.is_finished());

        let mut launched = Vec::new();
        for name in self.due(now) {
            self.last_launch.insert(name.clone(), now);
            if self.in_flight.contains_key(&name) {
                self.skipped.push(name);
                continue;
            }
            let entry = &self.entries[&name];
            let module = self.registry.get(&name).expect("entries only for registered modules").clone();
            let store = Arc::clone(&self.store);
            let cancel = Arc::new(AtomicBool::new(false));
            let progress = RunProgress::new();
            let deadline = Instant::now() + entry.timeout;
            let opts = RunOptions {
                deadline: Some(deadline),
                cancel: Some(Arc::clone(&cancel)),
                progress: Some(Arc::clone(&progress)),
            };
            let (tx, rx) = mpsc::channel();
            let handle = std::thread::spawn(move || {
                let result = run_module(&store, &module.spec, &module.routine, &opts);
                let _ = tx.send(result);
            });
            launched.push((name, handle, rx, cancel, progress, deadline));
        }

        let mut reports = Vec::new();
        for (name, handle, rx, cancel, progress, deadline) in launched {
            let wait = deadline.saturating_duration_since(Instant::now());
            let report = match rx.recv_timeout(wait) {
                Ok(Ok(report)) => report,
                Ok(Err(e)) => {
                    let mut r = progress.snapshot(&name, false);
                    r.error = Some(e.to_string());
                    r
                }
                Err(RecvTimeoutError::Timeout) => {
                    cancel.store(true, Ordering::SeqCst);
                    self.in_flight.insert(name.clone(), InFlight { handle });
                    reports.push(progress.snapshot(&name, true));
                    continue;
                }
                Err(RecvTimeoutError::Disconnected) => {
                    let mut r = progress.snapshot(&name, false);
                    r.error = Some("run thread terminated unexpectedly".into());
                    r
                }
            };
            let _ = handle.join();
            reports.push(report);
        }
        reports
    }

    /// Wait for runs abandoned by earlier ticks to finish their current item.
    pub fn drain(&mut self) {
        for (_, f) in std::mem::take(&mut self.in_flight) {
            let _ = f.handle.join();
        }
    }

    /// Drive `tick` from the wall clock until `max_ticks` launches have happened.
    pub fn run_wall_clock(
        &mut self,
        max_ticks: Option<usize>,
        mut on_tick: impl FnMut(DateTime<Utc>, &[RunReport]),
    ) {
        let mut ticks = 0;
        while max_ticks.is_none_or(|m| ticks < m) {
            let now = Utc::now();
            if !self.due(now).is_empty() {
                let reports = self.tick(now);
                on_tick(now, &reports);
                ticks += 1;
            }
            let next = self
                .entries
                .keys()
                .filter_map(|m| self.next_due(m, Utc::now()))
                .min();
            let sleep = next
                .and_then(|n| (n - Utc::now()).to_std().ok())
                .unwrap_or(Duration::from_millis(200))
                .clamp(Duration::from_millis(50), Duration::from_secs(60));
            std::thread::sleep(sleep);
        }
        self.drain();
    }
}

impl Drop for Scheduler {
    fn drop(&mut self) {
        self.drain();
    }
}
