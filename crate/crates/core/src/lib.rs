//! Mining a deliberately simple classifier's mispredictions for cases worth
//! reading closely.
//!
//! The pipeline: interaction records ([`corpus`]) are folded into a verb ×
//! trait-value contingency table ([`featurization`]), a from-scratch kNN
//! predicts each held-out verb's voice ([`knn`]), and the wrong predictions
//! are ranked by how often the verb is used ([`failures`]).

pub mod cli;
pub mod corpus;
pub mod distribution;
pub mod error;
pub mod failures;
pub mod featurization;
pub mod knn;
pub mod report;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
