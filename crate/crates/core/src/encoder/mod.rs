//! Prompted sentence encoder.
//!
//! Each sentence is wrapped in a fixed prompt with a single `[MASK]` slot,
//! run through a small transformer, and read out at the mask position. In
//! training mode the readout passes through a tanh-activated linear layer;
//! at evaluation time that layer is skipped unless asked for.

mod model;
mod params;
mod template;
mod vocab;

pub use model::{encode, EncodeOptions, EncodedBatch, Readout};
pub use params::{init_params, EncoderConfig, EncoderParams};
pub use template::{apply_template, Prompted, PromptedTriplet, TemplateVariant, MAX_LEN};
pub use vocab::{tokenize, Vocabulary, MASK, PAD, RESERVED, TEMPLATE_WORDS, UNK};
