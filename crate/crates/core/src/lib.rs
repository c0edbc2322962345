//! Co-offender network analysis toolkit.
//!
//! Builds a co-arrest network from offender-level arrest records and turns
//! it into per-offender risk features: neighborhood violence, community
//! structure inside gangs, subset-restricted path centralities, threshold
//! diffusion reach, and geographic and temporal activity summaries. On top
//! of the features sit two simple watchlist baselines, decision-tree and
//! random-forest classifiers with minority oversampling, and two
//! evaluation protocols: stratified cross-validation on the full network,
//! and a month-by-month walk where models only ever see the past. A
//! calibrated generator produces synthetic arrest data with realistic
//! network shape for all of it to run on.

pub mod baselines;
pub mod centrality;
pub mod community;
pub mod diffusion;
pub mod domain;
pub mod error;
pub mod features;
pub mod graph;
pub mod learn;
pub mod synth;

pub use error::{Error, Result};
