//! File formats, formula parsers, scenario scripts and verification suites
//! behind the `dtml` binary.

pub mod cli;
pub mod files;
pub mod fixtures;
pub mod parse;
pub mod scenario;
pub mod verify;
