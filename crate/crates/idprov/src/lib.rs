//! File system, persistence and command line support for `idprov-core`.

pub mod cli;
pub mod golden;
pub mod ingest;
pub mod report;
pub mod store;
