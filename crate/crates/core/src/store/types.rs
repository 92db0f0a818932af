use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::StoreError;

/// Prefix that turns a tag into a work request for the named module.
pub const CONTROL_PREFIX: &str = "FOR>";
/// Prefix placed on items a module gave up on after exhausting its retries.
pub const FAILED_PREFIX: &str = "FAILED>";

/// A short whitespace-free string attached to an item.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Tag(String);

impl Tag {
    pub fn new(value: impl Into<String>) -> Result<Self, StoreError> {
        let value = value.into();
        if value.is_empty() || value.chars().any(char::is_whitespace) {
            return Err(StoreError::InvalidTag(value));
        }
        Ok(Tag(value))
    }

    /// The `FOR><module>` trigger tag for a module.
    pub fn control(module: &str) -> Result<Self, StoreError> {
        Tag::new(format!("{CONTROL_PREFIX}{module}"))
    }

    /// The `FAILED><module>` marker for a module.
    pub fn failed(module: &str) -> Result<Self, StoreError> {
        Tag::new(format!("{FAILED_PREFIX}{module}"))
    }

    /// Name of the module this tag asks for work from, if it is a control tag.
    pub fn control_target(&self) -> Option<&str> {
        self.0.strip_prefix(CONTROL_PREFIX)
    }

    pub fn is_control(&self) -> bool {
        self.control_target().is_some()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Tag {
    type Error = StoreError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Tag::new(value)
    }
}

impl TryFrom<&str> for Tag {
    type Error = StoreError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Tag::new(value)
    }
}

impl From<Tag> for String {
    fn from(tag: Tag) -> String {
        tag.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parse a list of tag strings, failing on the first invalid one.
pub fn tags<I, S>(values: I) -> Result<BTreeSet<Tag>, StoreError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    values.into_iter().map(|v| Tag::new(v)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u64);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One schema-less document on a blackboard.
///
/// Fields hold the item's content, tags mark set membership and pending work,
/// and annotations hold everything modules computed about it. All three live
/// in the same document so a single fetch returns the whole picture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub item_id: ItemId,
    #[serde(default)]
    pub fields: BTreeMap<String, Value>,
    #[serde(default)]
    pub tags: BTreeSet<Tag>,
    #[serde(default)]
    pub annotations: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dedup_hash: Option<String>,
    pub created_at: DateTime<Utc>,
}

impl Item {
    pub fn has_tag(&self, tag: &Tag) -> bool {
        self.tags.contains(tag)
    }

    pub fn has_tag_str(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t.as_str() == tag)
    }

    pub fn field_str(&self, name: &str) -> Option<&str> {
        self.fields.get(name).and_then(Value::as_str)
    }

    pub fn annotation_f64(&self, name: &str) -> Option<f64> {
        self.annotations.get(name).and_then(Value::as_f64)
    }
}

/// An item that has not been stored yet.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NewItem {
    pub fields: BTreeMap<String, Value>,
    pub tags: BTreeSet<Tag>,
    pub annotations: BTreeMap<String, Value>,
    /// Overrides the store clock; used by importers and tests.
    pub created_at: Option<DateTime<Utc>>,
    /// Store without a dedup hash even on a dedup-enabled blackboard.
    pub skip_dedup: bool,
}

impl NewItem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.fields.insert(name.into(), value.into());
        self
    }

    pub fn tag(mut self, tag: Tag) -> Self {
        self.tags.insert(tag);
        self
    }

    pub fn annotation(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.annotations.insert(name.into(), value.into());
        self
    }

    pub fn created_at(mut self, at: DateTime<Utc>) -> Self {
        self.created_at = Some(at);
        self
    }

    pub fn without_dedup(mut self) -> Self {
        self.skip_dedup = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertResult {
    Inserted(ItemId),
    Duplicate(ItemId),
}

impl InsertResult {
    pub fn id(&self) -> ItemId {
        match self {
            InsertResult::Inserted(id) | InsertResult::Duplicate(id) => *id,
        }
    }

    pub fn is_inserted(&self) -> bool {
        matches!(self, InsertResult::Inserted(_))
    }
}

/// Selection over one blackboard: tag and field constraints plus a size cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub require_tags: BTreeSet<Tag>,
    pub forbid_tags: BTreeSet<Tag>,
    pub require_fields: BTreeSet<String>,
    pub limit: usize,
}

impl Query {
    pub fn new(limit: usize) -> Self {
        Query {
            require_tags: BTreeSet::new(),
            forbid_tags: BTreeSet::new(),
            require_fields: BTreeSet::new(),
            limit,
        }
    }

    /// A query with no constraints and no practical size cap.
    pub fn all() -> Self {
        Query::new(usize::MAX)
    }

    pub fn require(mut self, tag: Tag) -> Self {
        self.require_tags.insert(tag);
        self
    }

    pub fn forbid(mut self, tag: Tag) -> Self {
        self.forbid_tags.insert(tag);
        self
    }

    pub fn require_field(mut self, name: impl Into<String>) -> Self {
        self.require_fields.insert(name.into());
        self
    }

    pub fn matches(&self, item: &Item) -> bool {
        self.require_tags.iter().all(|t| item.tags.contains(t))
            && !self.forbid_tags.iter().any(|t| item.tags.contains(t))
            && self.require_fields.iter().all(|f| item.fields.contains_key(f))
    }
}

/// A set of changes applied to one item under a single lock.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ItemUpdate {
    /// Overwrites existing field values.
    pub set_fields: BTreeMap<String, Value>,
    pub annotations: BTreeMap<String, Value>,
    pub remove_tags: BTreeSet<Tag>,
    /// Applied after `remove_tags`, so a tag in both sets ends up present.
    pub add_tags: BTreeSet<Tag>,
}

impl ItemUpdate {
    pub fn is_empty(&self) -> bool {
        self.set_fields.is_empty()
            && self.annotations.is_empty()
            && self.remove_tags.is_empty()
            && self.add_tags.is_empty()
    }

    pub(crate) fn apply_to(&self, item: &mut Item) {
        for (k, v) in &self.set_fields {
            item.fields.insert(k.clone(), v.clone());
        }
        for (k, v) in &self.annotations {
            item.annotations.insert(k.clone(), v.clone());
        }
        for t in &self.remove_tags {
            item.tags.remove(t);
        }
        item.tags.extend(self.add_tags.iter().cloned());
    }
}
