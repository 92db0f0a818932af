use std::collections::BTreeMap;

use super::routine::Routine;
use super::spec::{ModuleSpec, TriggerMode};

#[derive(Clone)]
pub struct RegisteredModule {
    pub spec: ModuleSpec,
    pub routine: Routine,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("module `{0}` is already registered")]
    DuplicateModule(String),
    #[error("module `{0}` is not registered")]
    UnknownModule(String),
    #[error("module `{module}`: {message}")]
    Invalid { module: String, message: String },
}

/// The set of modules known to one deployment, keyed by unique name.
#[derive(Clone, Default)]
pub struct Registry {
    modules: BTreeMap<String, RegisteredModule>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, spec: ModuleSpec, routine: Routine) -> Result<(), RegistryError> {
        if self.modules.contains_key(&spec.name) {
            return Err(RegistryError::DuplicateModule(spec.name));
        }
        let invalid = |message: &str| RegistryError::Invalid {
            module: spec.name.clone(),
            message: message.to_string(),
        };
        match (&routine, spec.trigger_mode) {
            (Routine::Output(_), TriggerMode::Trigger) => {
                return Err(invalid("output modules must use trigger_mode = scan"))
            }
            (Routine::Analysis(_) | Routine::Input(_), TriggerMode::Scan)
                if spec.done_markers().next().is_none() =>
            {
                return Err(invalid(
                    "scan-mode modules need a plain done-marker tag in emit_tags",
                ))
            }
            _ => {}
        }
        self.modules
            .insert(spec.name.clone(), RegisteredModule { spec, routine });
        Ok(())
    }

    pub fn unregister(&mut self, name: &str) -> Result<RegisteredModule, RegistryError> {
        self.modules
            .remove(name)
            .ok_or_else(|| RegistryError::UnknownModule(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Option<&RegisteredModule> {
        self.modules.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.modules.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.modules.keys().map(String::as_str)
    }

    pub fn modules(&self) -> impl Iterator<Item = &RegisteredModule> {
        self.modules.values()
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }
}
