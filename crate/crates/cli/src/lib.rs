//! Command-line front end for `spectral-corr`.
//!
//! | command    | output                                                           |
//! |------------|------------------------------------------------------------------|
//! | `corr`     | CSV `m,n,t,s,pairing,regime,value,lower,upper,asymptotic`        |
//! | `simulate` | CSV `path_id,t,value`, optional lag-correlation summary           |
//! | `estimate` | JSON: κ̂ table, symmetry, range-dependence and jump verdicts     |
//! | `validate` | PASS/FAIL lines on stderr, optional JSON report                   |
//! | `rerun`    | replays a manifest written next to an earlier output              |
//!
//! Settings resolve as flags > `--config` file > defaults. Every file output
//! is accompanied by `<output>.manifest.json`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;
pub mod params;
pub mod systems;

pub use cli::{execute, run};
pub use error::{CliError, Result};
