//! Std companion to `pramana-core`: key loading, ledger and corpus files,
//! constitution TOML, fixture and live fetchers, a parallel benchmark runner
//! and the `pramana` command-line tool.

pub mod bench;
pub mod cli;
pub mod constitution;
pub mod corpus;
pub mod fetch;
pub mod keys;
pub mod ledger_file;
pub mod time;
