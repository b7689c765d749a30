//! Wordnet induction through a bilingual dictionary.
//!
//! Words of a language without a wordnet are linked to synsets of a reference
//! wordnet through their dictionary translations. Each candidate link is then
//! described by seven corpus-derived features and classified as correct or
//! incorrect by a classifier trained on links from an existing seed wordnet.

pub mod candidates;
pub mod distributional;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod learning;
pub mod pipeline;
pub mod resources;
pub mod synthgen;

mod io;

pub use error::{Error, Result};
