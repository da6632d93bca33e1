//! Three-step fixed-point iteration with errors for set-valued mappings.
//!
//! The crate provides, in layers:
//!
//! - [`geometry`]: vectors, compact set representations, point-to-set
//!   distance, Hausdorff distance (closed forms plus a sampled estimator),
//!   and metric projection;
//! - [`mappings`]: the set-valued map abstraction, the metric-projection
//!   wrapper, and grid-based checkers for nonexpansiveness, condition (C),
//!   quasi-nonexpansiveness, and condition (II);
//! - [`catalog`]: built-in problems with known fixed-point structure,
//!   including two falsification controls;
//! - [`schedules`]: coefficient and bounded-error sequences with hypothesis
//!   validation;
//! - [`engine`]: the three-step processes A (raw images) and B (metric
//!   projections), deterministic traces, and the per-step Fejér monitor;
//! - [`oracles`]: standalone numeric checks of the supporting lemmas;
//! - [`experiment`]: the config-driven runner behind the CLI.

pub mod catalog;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod mappings;
pub mod oracles;
pub mod report;
pub mod schedules;

pub use error::{Error, Result};
