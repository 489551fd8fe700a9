//! Personalized global retweet filtering.
//!
//! Predicts whether a recipient will retweet an incoming tweet from one
//! shared logistic-regression model over fifty recipient-specific features.
//! The pipeline runs from raw text normalization through corpus ingestion,
//! feature extraction and training to the batch-based experiments.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod features;
pub mod history;
pub mod learner;
pub mod textnorm;
pub mod vectorspace;

pub use error::{Error, Result};
