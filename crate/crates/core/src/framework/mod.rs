//! Modules, their settings, and the generic launch loop.
//!
//! A module is a [`ModuleSpec`] plus a [`Routine`]. The framework hands a
//! routine one item at a time together with the module's own
//! [`PrivateStore`](crate::store::PrivateStore); the routine answers with
//! annotations and tag changes. No handle to other modules, their state, or
//! the store itself is ever passed in.

mod registry;
mod routine;
mod run;
mod spec;

pub use registry::{RegisteredModule, Registry, RegistryError};
pub use routine::{Annotator, Outcome, Producer, Production, Reporter, Routine, RoutineError};
pub use run::{run_module, RunError, RunOptions, RunProgress, RunReport, MAX_RETRIES};
pub use spec::{load_spec, ModuleSpec, SpecError, TriggerMode};
