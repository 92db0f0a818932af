pub mod annotate;
pub mod catalog;
pub mod cli;
pub mod framework;
pub mod ingest;
pub mod reports;
pub mod scheduler;
pub mod settings;
pub mod store;
