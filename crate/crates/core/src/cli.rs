//! The operator command line.
//!
//! A store directory holds the blackboards plus the deployment state:
//!
//! ```text
//! <store>/boards/          blackboards
//! <store>/private/         module private state
//! <store>/modules.json     registered module settings and where they came from
//! <store>/schedule.conf    schedule entries
//! <store>/scheduler.json   virtual clock and last launch per module
//! <store>/runs.json        last run report per module
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::annotate::features::rebuild_idf;
use crate::annotate::Lexicon;
use crate::catalog::build_routine;
use crate::framework::{load_spec, ModuleSpec, Registry, RunReport};
use crate::ingest::ingest_manifest;
use crate::reports::{
    export, known_outlets, mood_timeline, outlet_profiles, style_distances, topic_report, DateRange, ExportFormat,
    Report,
};
use crate::scheduler::{parse_schedule, ScheduleEntry, Scheduler};
use crate::store::{Store, STANDARD_BLACKBOARDS};

#[derive(Debug, Parser)]
#[command(name = "mediaboard", version, about = "Run analysis modules over a tagged item store")]
pub struct Cli {
    /// Store directory.
    #[arg(long, global = true, value_name = "PATH")]
    pub store: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create the store and its standard blackboards.
    Init,
    /// Validate and register module settings files.
    Register {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Remove a registered module and its schedule entry.
    Unregister { name: String },
    /// Load a schedule file, replacing the current schedule.
    Schedule { file: PathBuf },
    /// Crawl every feed in a corpus manifest and load its tweet files.
    Ingest { manifest: PathBuf },
    /// Advance the virtual clock, running whatever is due at each step.
    Tick {
        #[arg(default_value_t = 1)]
        count: usize,
        /// Virtual time of the first tick (default: the stored clock, else now).
        #[arg(long)]
        start: Option<DateTime<Utc>>,
    },
    /// Tick until a tick finds no work, or run against the wall clock.
    Run {
        /// Launch modules at their real slots instead of stepping a virtual clock
        #[arg(long)]
        wall_clock: bool,
        /// Stop after this many ticks (virtual default: 50; wall clock: never)
        #[arg(long)]
        max_ticks: Option<usize>,
    },
    /// Item counts, tag histograms, last runs, and the schedule.
    Status,
    /// Compute a report from the current blackboards and write it out.
    Export {
        #[arg(value_enum)]
        report: ReportKind,
        #[arg(long, default_value = "xml")]
        format: ExportFormat,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        from: Option<DateTime<Utc>>,
        #[arg(long)]
        to: Option<DateTime<Utc>>,
        /// Timestamp written into the document (default: the virtual clock).
        #[arg(long)]
        generated_at: Option<DateTime<Utc>>,
    },
    /// Recompute a feature extractor's IDF table over its input blackboard.
    BuildIdf {
        #[arg(long, default_value = "FeatureExtractor")]
        module: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Topics,
    Moods,
    Outlets,
    StyleDistances,
}

#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError(msg.into()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ModuleRecord {
    name: String,
    base_dir: PathBuf,
    settings: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct SchedulerState {
    clock: Option<DateTime<Utc>>,
    last_launch: BTreeMap<String, DateTime<Utc>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoardStatus {
    pub name: String,
    pub items: usize,
    pub tags: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleStatus {
    pub name: String,
    pub input_blackboard: String,
    pub last_run: Option<RunReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleStatus {
    pub module: String,
    pub period_seconds: u64,
    pub offset_seconds: u64,
    pub timeout_seconds: u64,
    pub enabled: bool,
    pub last_launch: Option<DateTime<Utc>>,
    pub next_due: Option<DateTime<Utc>>,
}

/// What `status` prints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatusSnapshot {
    pub clock: Option<DateTime<Utc>>,
    pub blackboards: Vec<BoardStatus>,
    pub modules: Vec<ModuleStatus>,
    pub schedule: Vec<ScheduleStatus>,
}

/// A store directory together with its deployment state files.
struct Deployment {
    root: PathBuf,
    store: Arc<Store>,
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de> + Default>(path: &Path) -> Result<T> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(T::default()),
        Err(e) => fail(format!("{}: {e}", path.display())),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

impl Deployment {
    fn init(root: &Path) -> Result<Self> {
        let store = Store::open(root)?;
        store.init_standard()?;
        Ok(Deployment {
            root: root.to_path_buf(),
            store: Arc::new(store),
        })
    }

    fn open(root: &Path) -> Result<Self> {
        if !root.join("boards").is_dir() {
            return fail(format!("no store at {}; run `mediaboard --store {} init` first", root.display(), root.display()));
        }
        Ok(Deployment {
            root: root.to_path_buf(),
            store: Arc::new(Store::open(root)?),
        })
    }

    fn modules(&self) -> Result<Vec<ModuleRecord>> {
        read_json(&self.root.join("modules.json"))
    }

    fn save_modules(&self, m: &[ModuleRecord]) -> Result<()> {
        write_json(&self.root.join("modules.json"), &m)
    }

    fn schedule(&self) -> Result<Vec<ScheduleEntry>> {
        match std::fs::read_to_string(self.root.join("schedule.conf")) {
            Ok(text) => Ok(parse_schedule(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    fn save_schedule(&self, entries: &[ScheduleEntry]) -> Result<()> {
        let text: Vec<String> = entries.iter().map(ScheduleEntry::to_settings).collect();
        write_atomic(&self.root.join("schedule.conf"), &text.join("\n"))
    }

    fn state(&self) -> Result<SchedulerState> {
        read_json(&self.root.join("scheduler.json"))
    }

    fn save_state(&self, s: &SchedulerState) -> Result<()> {
        write_json(&self.root.join("scheduler.json"), s)
    }

    fn runs(&self) -> Result<BTreeMap<String, RunReport>> {
        read_json(&self.root.join("runs.json"))
    }

    fn record_runs(&self, reports: &[RunReport]) -> Result<()> {
        if reports.is_empty() {
            return Ok(());
        }
        let mut runs = self.runs()?;
        for r in reports {
            runs.insert(r.module.clone(), r.clone());
        }
        write_json(&self.root.join("runs.json"), &runs)
    }

    fn spec_of(record: &ModuleRecord) -> Result<ModuleSpec> {
        load_spec(&record.settings).map_err(|e| CliError(format!("module `{}`: {e}", record.name)))
    }

    /// Build every registered module, creating missing output blackboards.
    fn scheduler(&self) -> Result<Scheduler> {
        let mut registry = Registry::new();
        for record in self.modules()? {
            let spec = Self::spec_of(&record)?;
            let routine = build_routine(&spec, &record.base_dir)?;
            self.store.ensure_blackboard(&spec.output_blackboard)?;
            registry.register(spec, routine)?;
        }
        let mut scheduler = Scheduler::new(Arc::clone(&self.store), registry);
        for entry in self.schedule()? {
            scheduler.register(entry)?;
        }
        scheduler.restore_last_launches(self.state()?.last_launch);
        Ok(scheduler)
    }
}

/// Next slot at which an entry becomes due, seen from `now`.
fn next_due(entry: &ScheduleEntry, last: Option<DateTime<Utc>>, now: DateTime<Utc>) -> Option<DateTime<Utc>> {
    if !entry.enabled {
        return None;
    }
    let slot = entry.latest_slot(now);
    match last {
        Some(l) if l >= slot => Some(slot + chrono::Duration::from_std(entry.period).ok()?),
        _ => Some(slot),
    }
}

fn emit(out: &mut dyn Write, json_mode: bool, value: serde_json::Value, human: impl FnOnce() -> String) -> Result<()> {
    if json_mode {
        writeln!(out, "{}", serde_json::to_string(&value)?)?;
    } else {
        let text = human();
        if !text.is_empty() {
            writeln!(out, "{}", text.trim_end())?;
        }
    }
    Ok(())
}

fn describe_run(r: &RunReport) -> String {
    let mut s = format!(
        "  {:<24} selected {:>4}  ok {:>4}  failed {:>4}",
        r.module, r.items_selected, r.items_succeeded, r.items_failed
    );
    if r.timed_out {
        s.push_str("  TIMED OUT");
    }
    if let Some(e) = &r.error {
        s.push_str(&format!("  error: {e}"));
    }
    s
}

fn tick_loop(
    dep: &Deployment,
    start: Option<DateTime<Utc>>,
    max: usize,
    stop_when_idle: bool,
    out: &mut dyn Write,
    json_mode: bool,
) -> Result<()> {
    let mut scheduler = dep.scheduler()?;
    let step = scheduler
        .min_period()
        .ok_or_else(|| CliError("nothing is scheduled; load a schedule with `schedule` first".into()))?;
    let step = chrono::Duration::from_std(step).map_err(|e| CliError(e.to_string()))?;
    let mut state = dep.state()?;
    let mut clock = start.or(state.clock).unwrap_or_else(Utc::now);
    let mut ticks = Vec::new();
    for n in 1..=max {
        let reports = scheduler.tick(clock);
        let skipped = scheduler.skipped_last_tick().to_vec();
        dep.record_runs(&reports)?;
        let idle = reports.iter().all(|r| r.items_selected == 0);
        if !json_mode {
            writeln!(out, "tick {n} @ {}", clock.to_rfc3339())?;
            for r in &reports {
                writeln!(out, "{}", describe_run(r))?;
            }
            for s in &skipped {
                writeln!(out, "  {s:<24} skipped (previous run still going)")?;
            }
        }
        ticks.push(json!({ "time": clock, "reports": reports, "skipped": skipped }));
        clock += step;
        state.clock = Some(clock);
        state.last_launch = scheduler.last_launches().clone();
        dep.save_state(&state)?;
        if stop_when_idle && idle {
            break;
        }
    }
    scheduler.drain();
    if json_mode {
        writeln!(out, "{}", serde_json::to_string(&json!({ "ticks": ticks }))?)?;
    }
    Ok(())
}

fn status(dep: &Deployment) -> Result<StatusSnapshot> {
    let state = dep.state()?;
    let runs = dep.runs()?;
    let now = state.clock.unwrap_or_else(Utc::now);
    let blackboards = dep
        .store
        .blackboard_names()
        .into_iter()
        .map(|name| {
            let b = dep.store.blackboard(&name)?;
            Ok(BoardStatus {
                items: b.len(),
                tags: b.list_tags().into_iter().map(|(t, n)| (t.as_str().to_string(), n)).collect(),
                name,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let modules = dep
        .modules()?
        .iter()
        .map(|r| {
            let spec = Deployment::spec_of(r)?;
            Ok(ModuleStatus {
                last_run: runs.get(&r.name).cloned(),
                name: r.name.clone(),
                input_blackboard: spec.input_blackboard,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let schedule = dep
        .schedule()?
        .into_iter()
        .map(|e| {
            let last = state.last_launch.get(&e.module).copied();
            ScheduleStatus {
                next_due: next_due(&e, last, now),
                module: e.module.clone(),
                period_seconds: e.period.as_secs(),
                offset_seconds: e.offset.as_secs(),
                timeout_seconds: e.timeout.as_secs(),
                enabled: e.enabled,
                last_launch: last,
            }
        })
        .collect();
    Ok(StatusSnapshot {
        clock: state.clock,
        blackboards,
        modules,
        schedule,
    })
}

fn render_status(s: &StatusSnapshot) -> String {
    let mut out = String::new();
    if let Some(c) = s.clock {
        out.push_str(&format!("virtual clock: {}\n", c.to_rfc3339()));
    }
    out.push_str("blackboards:\n");
    for b in &s.blackboards {
        out.push_str(&format!("  {:<10} {:>6} items\n", b.name, b.items));
        for (t, n) in &b.tags {
            out.push_str(&format!("      {t:<34} {n:>6}\n"));
        }
    }
    if !s.modules.is_empty() {
        out.push_str("modules:\n");
        for m in &s.modules {
            match &m.last_run {
                Some(r) => out.push_str(&describe_run(r)),
                None => out.push_str(&format!("  {:<24} never run", m.name)),
            }
            out.push('\n');
        }
    }
    if !s.schedule.is_empty() {
        out.push_str("schedule:\n");
        for e in &s.schedule {
            let next = e.next_due.map_or("disabled".to_string(), |t| t.to_rfc3339());
            out.push_str(&format!("  {:<24} every {:>6}s  next {next}\n", e.module, e.period_seconds));
        }
    }
    out
}

fn build_report(
    dep: &Deployment,
    kind: ReportKind,
    range: DateRange,
    at: DateTime<Utc>,
) -> Result<Report> {
    let store = &dep.store;
    Ok(match kind {
        ReportKind::Topics => Report::topics(&topic_report(&store.blackboard("articles")?.scan(), range), at),
        ReportKind::Moods => {
            let tweets = store.blackboard("tweets")?.scan();
            let timelines = crate::annotate::MOODS
                .iter()
                .map(|m| mood_timeline(&tweets, m, range))
                .collect::<Result<Vec<_>, _>>()?;
            Report::moods(&timelines, at)
        }
        ReportKind::Outlets | ReportKind::StyleDistances => {
            let known = known_outlets(store)?;
            let profiles = outlet_profiles(&store.blackboard("articles")?.scan(), Some(&known), range)?;
            if kind == ReportKind::Outlets {
                Report::outlets(&profiles, at)
            } else {
                Report::style_distances(&style_distances(&profiles), at)
            }
        }
    })
}

/// Stdout that remembers whether the reader hung up.
struct PipeWriter<W> {
    inner: W,
    closed: bool,
}

impl<W: Write> Write for PipeWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let r = self.inner.write(buf);
        self.closed |= matches!(&r, Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe);
        r
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Execute one parsed command, writing its output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let root = cli
        .store
        .clone()
        .ok_or_else(|| CliError("--store <path> is required".into()))?;
    let json_mode = cli.json;
    match cli.command {
        Command::Init => {
            let dep = Deployment::init(&root)?;
            let names = dep.store.blackboard_names();
            emit(out, json_mode, json!({ "store": root, "blackboards": names }), || {
                format!("initialized {} with blackboards: {}", root.display(), STANDARD_BLACKBOARDS.join(", "))
            })
        }
        Command::Register { files } => {
            let dep = Deployment::open(&root)?;
            let mut records = dep.modules()?;
            let mut registry = Registry::new();
            for r in &records {
                let spec = Deployment::spec_of(r)?;
                let routine = build_routine(&spec, &r.base_dir)?;
                registry.register(spec, routine)?;
            }
            let mut added = Vec::new();
            for file in &files {
                let text = std::fs::read_to_string(file).map_err(|e| CliError(format!("{}: {e}", file.display())))?;
                let spec = load_spec(&text).map_err(|e| CliError(format!("{}: {e}", file.display())))?;
                let base = file
                    .canonicalize()?
                    .parent()
                    .map(Path::to_path_buf)
                    .unwrap_or_default();
                let routine = build_routine(&spec, &base).map_err(|e| CliError(format!("{}: {e}", file.display())))?;
                let name = spec.name.clone();
                registry
                    .register(spec, routine)
                    .map_err(|e| CliError(format!("{}: {e}", file.display())))?;
                records.push(ModuleRecord {
                    name: name.clone(),
                    base_dir: base,
                    settings: text,
                });
                added.push(name);
            }
            dep.save_modules(&records)?;
            emit(out, json_mode, json!({ "registered": added }), || {
                added.iter().map(|n| format!("registered {n}\n")).collect()
            })
        }
        Command::Unregister { name } => {
            let dep = Deployment::open(&root)?;
            let mut records = dep.modules()?;
            let before = records.len();
            records.retain(|r| r.name != name);
            if records.len() == before {
                return fail(format!("module `{name}` is not registered"));
            }
            dep.save_modules(&records)?;
            let schedule: Vec<ScheduleEntry> = dep.schedule()?.into_iter().filter(|e| e.module != name).collect();
            dep.save_schedule(&schedule)?;
            emit(out, json_mode, json!({ "unregistered": name }), || format!("unregistered {name}"))
        }
        Command::Schedule { file } => {
            let dep = Deployment::open(&root)?;
            let text = std::fs::read_to_string(&file).map_err(|e| CliError(format!("{}: {e}", file.display())))?;
            let entries = parse_schedule(&text).map_err(|e| CliError(format!("{}: {e}", file.display())))?;
            let names: Vec<String> = dep.modules()?.into_iter().map(|r| r.name).collect();
            let mut seen = std::collections::BTreeSet::new();
            for e in &entries {
                if !names.contains(&e.module) {
                    return fail(format!("{}: module `{}` is not registered", file.display(), e.module));
                }
                if !seen.insert(e.module.clone()) {
                    return fail(format!("{}: module `{}` is scheduled twice", file.display(), e.module));
                }
            }
            dep.save_schedule(&entries)?;
            let listed: Vec<&str> = entries.iter().map(|e| e.module.as_str()).collect();
            emit(out, json_mode, json!({ "scheduled": listed }), || {
                format!("scheduled {} modules", entries.len())
            })
        }
        Command::Ingest { manifest } => {
            let dep = Deployment::open(&root)?;
            let summary = ingest_manifest(&dep.store, &manifest, Utc::now())?;
            emit(
                out,
                json_mode,
                json!({
                    "feeds": summary.feeds,
                    "inserted": summary.inserted,
                    "duplicates": summary.duplicates,
                    "skipped_entries": summary.skipped_entries,
                    "tweets": summary.tweets,
                    "tweet_duplicates": summary.tweet_duplicates,
                }),
                || summary.to_string(),
            )
        }
        Command::Tick { count, start } => {
            let dep = Deployment::open(&root)?;
            tick_loop(&dep, start, count, false, out, json_mode)
        }
        Command::Run { wall_clock, max_ticks } => {
            let dep = Deployment::open(&root)?;
            if !wall_clock {
                return tick_loop(&dep, None, max_ticks.unwrap_or(50), true, out, json_mode);
            }
            let mut scheduler = dep.scheduler()?;
            let mut failure = None;
            scheduler.run_wall_clock(max_ticks, |now, reports| {
                if failure.is_some() {
                    return;
                }
                let result = dep.record_runs(reports).and_then(|_| {
                    if json_mode {
                        writeln!(out, "{}", serde_json::to_string(&json!({ "time": now, "reports": reports }))?)?;
                    } else {
                        writeln!(out, "tick @ {}", now.to_rfc3339())?;
                        for r in reports {
                            writeln!(out, "{}", describe_run(r))?;
                        }
                    }
                    Ok(())
                });
                failure = result.err();
            });
            let state = SchedulerState {
                clock: None,
                last_launch: scheduler.last_launches().clone(),
            };
            dep.save_state(&state)?;
            failure.map_or(Ok(()), Err)
        }
        Command::Status => {
            let dep = Deployment::open(&root)?;
            let snapshot = status(&dep)?;
            emit(out, json_mode, serde_json::to_value(&snapshot)?, || render_status(&snapshot))
        }
        Command::Export {
            report,
            format,
            out: path,
            from,
            to,
            generated_at,
        } => {
            let dep = Deployment::open(&root)?;
            let at = generated_at.or(dep.state()?.clock).unwrap_or_else(Utc::now);
            let rep = build_report(&dep, report, DateRange { start: from, end: to }, at)?;
            let doc = export(&rep, format);
            match &path {
                Some(p) => {
                    std::fs::write(p, &doc).map_err(|e| CliError(format!("{}: {e}", p.display())))?;
                    emit(out, json_mode, json!({ "report": rep.kind, "rows": rep.rows.len(), "out": p }), || {
                        format!("wrote {} rows to {}", rep.rows.len(), p.display())
                    })
                }
                None => {
                    out.write_all(doc.as_bytes())?;
                    Ok(())
                }
            }
        }
        Command::BuildIdf { module } => {
            let dep = Deployment::open(&root)?;
            let record = dep
                .modules()?
                .into_iter()
                .find(|r| r.name == module)
                .ok_or_else(|| CliError(format!("module `{module}` is not registered")))?;
            let spec = Deployment::spec_of(&record)?;
            if spec.params.get("routine").map(String::as_str) != Some("features") {
                return fail(format!("module `{module}` is not a feature extractor"));
            }
            let stop_path = spec
                .params
                .get("stopwords")
                .map(|p| record.base_dir.join(p))
                .ok_or_else(|| CliError(format!("module `{module}` has no `params.stopwords`")))?;
            let stopwords = Lexicon::load("stopwords", &stop_path)?;
            let board = dep.store.blackboard(&spec.input_blackboard)?;
            let docs = rebuild_idf(&board, &stopwords, &dep.store.private_store(&module)?)?;
            emit(out, json_mode, json!({ "module": module, "documents": docs }), || {
                format!("{module}: idf table built over {docs} documents")
            })
        }
    }
}

/// Parse arguments and execute; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let json_mode = cli.json;
    let mut lock = PipeWriter {
        inner: std::io::stdout().lock(),
        closed: false,
    };
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        // reader went away (`| head`); nothing left to say
        Err(_) if lock.closed => 0,
        Err(e) => {
            if json_mode {
                let _ = writeln!(lock, "{}", json!({ "error": e.0 }));
            }
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("mediaboard").chain(args.iter().copied()))
            .map_err(|e| CliError(e.to_string()))?;
        let mut buf = Vec::new();
        execute(cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn init_then_empty_status() {
        let dir = tempfile::tempdir().unwrap();
        let store = dir.path().join("s");
        let s = store.to_str().unwrap();
        run(&["--store", s, "init"]).unwrap();
        let out = run(&["--store", s, "--json", "status"]).unwrap();
        let snap: StatusSnapshot = serde_json::from_str(&out).unwrap();
        assert_eq!(snap.blackboards.len(), 7);
        assert!(snap.blackboards.iter().all(|b| b.items == 0 && b.tags.is_empty()));
    }

    #[test]
    fn commands_need_an_initialized_store() {
        let dir = tempfile::tempdir().unwrap();
        let s = dir.path().join("nope");
        let err = run(&["--store", s.to_str().unwrap(), "status"]).unwrap_err();
        assert!(err.0.contains("init"));
        assert!(run(&["status"]).unwrap_err().0.contains("--store"));
    }

    #[test]
    fn next_due_times() {
        let e = ScheduleEntry::hourly("M");
        let now: DateTime<Utc> = "2024-01-01T10:30:00Z".parse().unwrap();
        assert_eq!(next_due(&e, None, now).unwrap().to_rfc3339(), "2024-01-01T10:00:00+00:00");
        let last = Some("2024-01-01T10:00:00Z".parse().unwrap());
        assert_eq!(next_due(&e, last, now).unwrap().to_rfc3339(), "2024-01-01T11:00:00+00:00");
    }
}
