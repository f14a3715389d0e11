//! Library surface of the `hdg` command-line tool: job configuration,
//! execution, and artifact encoding/decoding.

pub mod config;
pub mod output;
pub mod run;
