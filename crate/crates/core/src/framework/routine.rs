use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::Value;

use crate::store::{Item, NewItem, PrivateStore, Tag};

/// Why a routine could not process an item. The framework records it and
/// leaves the item's trigger tag in place for a later retry.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct RoutineError(pub String);

impl RoutineError {
    pub fn new(msg: impl Into<String>) -> Self {
        RoutineError(msg.into())
    }
}

/// The complete output of an analysis routine for one item.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub annotations: BTreeMap<String, Value>,
    pub add_tags: BTreeSet<Tag>,
    pub remove_tags: BTreeSet<Tag>,
}

impl Outcome {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn annotate(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.annotations.insert(name.into(), value.into());
        self
    }

    pub fn tag(mut self, tag: Tag) -> Self {
        self.add_tags.insert(tag);
        self
    }

    pub fn untag(mut self, tag: Tag) -> Self {
        self.remove_tags.insert(tag);
        self
    }
}

/// An analysis module: reads one item (and its own private state) and
/// returns annotations and tag changes. It has no other way to affect the world.
pub trait Annotator: Send + Sync {
    fn annotate(&self, item: &Item, state: &PrivateStore) -> Result<Outcome, RoutineError>;
}

/// What an input module produces per item: the analysis outcome plus content
/// fields for the item itself and whole new items for the output blackboard.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Production {
    pub outcome: Outcome,
    pub set_fields: BTreeMap<String, Value>,
    pub new_items: Vec<NewItem>,
}

/// An input module that creates content: scraping, translation, feed discovery.
pub trait Producer: Send + Sync {
    fn produce(&self, item: &Item, state: &PrivateStore) -> Result<Production, RoutineError>;
}

/// An output module: summarises the selected items into new items
/// (typically on a `reports` blackboard) without touching the inputs.
pub trait Reporter: Send + Sync {
    fn report(&self, items: &[Item], state: &PrivateStore) -> Result<Vec<NewItem>, RoutineError>;
}

/// The processing routine behind a module, by category.
#[derive(Clone)]
pub enum Routine {
    Analysis(Arc<dyn Annotator>),
    Input(Arc<dyn Producer>),
    Output(Arc<dyn Reporter>),
}

impl std::fmt::Debug for Routine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Routine::Analysis(_) => "Routine::Analysis",
            Routine::Input(_) => "Routine::Input",
            Routine::Output(_) => "Routine::Output",
        })
    }
}

impl Routine {
    pub fn analysis(a: impl Annotator + 'static) -> Self {
        Routine::Analysis(Arc::new(a))
    }

    pub fn input(p: impl Producer + 'static) -> Self {
        Routine::Input(Arc::new(p))
    }

    pub fn output(r: impl Reporter + 'static) -> Self {
        Routine::Output(Arc::new(r))
    }

    pub(crate) fn process(&self, item: &Item, state: &PrivateStore) -> Result<Production, RoutineError> {
        match self {
            Routine::Analysis(a) => a.annotate(item, state).map(|outcome| Production {
                outcome,
                ..Production::default()
            }),
            Routine::Input(p) => p.produce(item, state),
            Routine::Output(_) => unreachable!("output routines run over batches"),
        }
    }
}

/// Closures work as analysis routines, which keeps tests and examples short.
impl<F> Annotator for F
where
    F: Fn(&Item, &PrivateStore) -> Result<Outcome, RoutineError> + Send + Sync,
{
    fn annotate(&self, item: &Item, state: &PrivateStore) -> Result<Outcome, RoutineError> {
        self(item, state)
    }
}
