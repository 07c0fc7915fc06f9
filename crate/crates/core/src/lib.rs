//! Contrastive sentence-embedding training with soft negative samples.
//!
//! The crate is `no_std` (with `alloc`) and holds every algorithmic piece of
//! the toolkit:
//!
//! - [`numerics`]: dense tensors, a define-then-run reverse-mode graph,
//!   central-difference gradient checking and AdamW.
//! - [`encoder`]: vocabulary, prompt templates and a small transformer
//!   encoder with a mask-slot readout.
//! - [`objectives`]: InfoNCE, the cosine gap between soft-negative and
//!   positive pairs, the bidirectional margin loss and the PL/NL ablation
//!   losses, each with analytic gradients.
//! - [`negation`]: rule-based explicit negation over dependency parses.
//! - [`data`]: STS pairs, triplet batching and hold-out splitting.
//! - [`trainer`]: the training loop and the hyperparameter sweep.
//! - [`gradsuite`]: finite-difference checks of every loss and the encoder.
//! - [`evaluation`]: Spearman scoring, rank-based error analysis and
//!   similarity histograms.
//!
//! File formats, checkpoints and the command-line front end live in the
//! `sncse` crate.

#![no_std]
#![warn(rust_2018_idioms)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod data;
pub mod encoder;
pub mod error;
pub mod evaluation;
pub mod gradsuite;
pub mod negation;
pub mod numerics;
pub mod objectives;
pub mod rng;
pub mod trainer;

pub use error::{Error, Result};
