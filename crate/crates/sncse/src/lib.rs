//! Std companion of `sncse-core`: CoNLL-U input, corpus and STS loaders,
//! checkpoints, run-config files and the `sncse` command-line tool.

#![warn(rust_2018_idioms)]

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod conllu;
pub mod error;
pub mod io;
pub mod workflow;

pub use error::{Error, Result};
