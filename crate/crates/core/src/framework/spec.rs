use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::settings::{self, split_list};
use crate::store::{Query, Tag};

/// How a module finds its work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TriggerMode {
    /// Items must carry `FOR><name>`; the tag is consumed on success.
    #[default]
    Trigger,
    /// Items are selected by fields and required tags alone, minus those
    /// already carrying one of the module's plain emit tags (its done-markers).
    Scan,
}

impl FromStr for TriggerMode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "trigger" => Ok(TriggerMode::Trigger),
            "scan" => Ok(TriggerMode::Scan),
            _ => Err(()),
        }
    }
}

impl fmt::Display for TriggerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriggerMode::Trigger => "trigger",
            TriggerMode::Scan => "scan",
        })
    }
}

/// Declarative settings for one module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    pub name: String,
    pub description: String,
    pub input_blackboard: String,
    pub output_blackboard: String,
    pub required_tags: BTreeSet<Tag>,
    pub required_fields: BTreeSet<String>,
    pub emit_tags: BTreeSet<Tag>,
    pub max_items_per_run: usize,
    pub threads: usize,
    pub trigger_mode: TriggerMode,
    /// Module-specific parameters, keys without the `params.` prefix.
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("missing mandatory key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}` at line {line}: {message}")]
    InvalidValue {
        key: String,
        line: usize,
        message: String,
    },
}

impl From<settings::SyntaxError> for SpecError {
    fn from(e: settings::SyntaxError) -> Self {
        SpecError::ParseError {
            line: e.line,
            message: e.message,
        }
    }
}

const MANDATORY: [&str; 4] = ["name", "input_blackboard", "max_items_per_run", "threads"];

impl ModuleSpec {
    /// A spec with defaults, for building modules in code.
    pub fn new(name: &str, input_blackboard: &str) -> Self {
        ModuleSpec {
            name: name.to_string(),
            description: String::new(),
            input_blackboard: input_blackboard.to_string(),
            output_blackboard: input_blackboard.to_string(),
            required_tags: BTreeSet::new(),
            required_fields: BTreeSet::new(),
            emit_tags: BTreeSet::new(),
            max_items_per_run: 100,
            threads: 1,
            trigger_mode: TriggerMode::Trigger,
            params: BTreeMap::new(),
        }
    }

    pub fn with_max_items(mut self, n: usize) -> Self {
        self.max_items_per_run = n;
        self
    }

    pub fn with_threads(mut self, n: usize) -> Self {
        self.threads = n;
        self
    }

    pub fn emitting(mut self, tags: impl IntoIterator<Item = Tag>) -> Self {
        self.emit_tags.extend(tags);
        self
    }

    pub fn requiring_field(mut self, field: &str) -> Self {
        self.required_fields.insert(field.to_string());
        self
    }

    pub fn scan(mut self) -> Self {
        self.trigger_mode = TriggerMode::Scan;
        self
    }

    pub fn param(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// The `FOR><name>` tag this module consumes.
    pub fn trigger_tag(&self) -> Tag {
        Tag::control(&self.name).expect("module names contain no whitespace")
    }

    pub fn failed_tag(&self) -> Tag {
        Tag::failed(&self.name).expect("module names contain no whitespace")
    }

    /// Annotation holding the failure count of this module on an item.
    pub fn retry_annotation(&self) -> String {
        format!("sys.retries.{}", self.name)
    }

    /// Plain (non-control) emit tags; in scan mode these mark items as done.
    pub fn done_markers(&self) -> impl Iterator<Item = &Tag> {
        self.emit_tags.iter().filter(|t| !t.is_control())
    }

    /// Tags an item must carry, including the implicit trigger tag.
    pub fn effective_required_tags(&self) -> BTreeSet<Tag> {
        let mut tags = self.required_tags.clone();
        if self.trigger_mode == TriggerMode::Trigger {
            tags.insert(self.trigger_tag());
        }
        tags
    }

    /// The blackboard query that selects this module's next batch of work.
    pub fn selection_query(&self) -> Query {
        let mut q = Query::new(self.max_items_per_run);
        q.require_tags = self.effective_required_tags();
        q.require_fields = self.required_fields.clone();
        q.forbid_tags.insert(self.failed_tag());
        if self.trigger_mode == TriggerMode::Scan {
            q.forbid_tags.extend(self.done_markers().cloned());
        }
        q
    }

    pub fn param_list(&self, key: &str) -> BTreeSet<String> {
        self.params.get(key).map(|v| split_list(v)).unwrap_or_default()
    }

    /// Render back to settings text that [`load_spec`] accepts.
    pub fn to_settings(&self) -> String {
        let join = |set: &BTreeSet<Tag>| {
            set.iter().map(Tag::as_str).collect::<Vec<_>>().join(", ")
        };
        let mut out = String::new();
        out.push_str(&format!("name = {}\n", self.name));
        if !self.description.is_empty() {
            out.push_str(&format!("description = {}\n", self.description));
        }
        out.push_str(&format!("input_blackboard = {}\n", self.input_blackboard));
        out.push_str(&format!("output_blackboard = {}\n", self.output_blackboard));
        if !self.required_tags.is_empty() {
            out.push_str(&format!("required_tags = {}\n", join(&self.required_tags)));
        }
        if !self.required_fields.is_empty() {
            let fields: Vec<_> = self.required_fields.iter().cloned().collect();
            out.push_str(&format!("required_fields = {}\n", fields.join(", ")));
        }
        if !self.emit_tags.is_empty() {
            out.push_str(&format!("emit_tags = {}\n", join(&self.emit_tags)));
        }
        out.push_str(&format!("max_items_per_run = {}\n", self.max_items_per_run));
        out.push_str(&format!("threads = {}\n", self.threads));
        out.push_str(&format!("trigger_mode = {}\n", self.trigger_mode));
        for (k, v) in &self.params {
            out.push_str(&format!("params.{k} = {v}\n"));
        }
        out
    }
}

/// Parse and validate a module settings document.
pub fn load_spec(text: &str) -> Result<ModuleSpec, SpecError> {
    let entries = settings::parse_single(text)?;
    let find = |key: &str| entries.iter().find(|e| e.key == key);
    for key in MANDATORY {
        if find(key).is_none() {
            return Err(SpecError::MissingKey(key.to_string()));
        }
    }

    let invalid = |e: &settings::Entry, message: String| SpecError::InvalidValue {
        key: e.key.clone(),
        line: e.line,
        message,
    };
    let positive = |e: &settings::Entry| -> Result<usize, SpecError> {
        match e.value.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(invalid(e, format!("expected a positive integer, got `{}`", e.value))),
        }
    };
    let word = |e: &settings::Entry| -> Result<String, SpecError> {
        if e.value.is_empty() || e.value.chars().any(char::is_whitespace) {
            Err(invalid(e, "expected a single word".into()))
        } else {
            Ok(e.value.clone())
        }
    };
    let tag_set = |e: &settings::Entry| -> Result<BTreeSet<Tag>, SpecError> {
        split_list(&e.value)
            .into_iter()
            .map(|t| Tag::new(t).map_err(|err| invalid(e, err.to_string())))
            .collect()
    };

    let name_entry = find("name").expect("checked above");
    let mut spec = ModuleSpec::new(&word(name_entry)?, &word(find("input_blackboard").unwrap())?);
    spec.max_items_per_run = positive(find("max_items_per_run").unwrap())?;
    spec.threads = positive(find("threads").unwrap())?;

    for e in &entries {
        match e.key.as_str() {
            "name" | "input_blackboard" | "max_items_per_run" | "threads" => {}
            "description" => spec.description = e.value.clone(),
            "output_blackboard" => spec.output_blackboard = word(e)?,
            "required_tags" => spec.required_tags = tag_set(e)?,
            "emit_tags" => spec.emit_tags = tag_set(e)?,
            "required_fields" => spec.required_fields = split_list(&e.value),
            "trigger_mode" => {
                spec.trigger_mode = e
                    .value
                    .parse()
                    .map_err(|_| invalid(e, "expected `trigger` or `scan`".into()))?
            }
            key => match key.strip_prefix("params.") {
                Some(p) if !p.is_empty() => {
                    spec.params.insert(p.to_string(), e.value.clone());
                }
                _ => return Err(invalid(e, format!("unknown key `{key}`"))),
            },
        }
    }
    // the trigger tag must be a valid tag
    Tag::control(&spec.name).map_err(|err| invalid(name_entry, err.to_string()))?;
    Ok(spec)
}
