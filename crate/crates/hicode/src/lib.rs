//! Multi-layer hidden community detection.
//!
//! Networks often carry several superimposed community structures of
//! comparable strength; a standard detector only ever reports the dominant
//! one. This crate peels layers apart: detect a partition, statistically
//! reduce its edges back to background density, detect again on the
//! residual, then refine every layer against the others and pick the layer
//! count automatically from modularity-improvement ratios.
//!
//! The crate also ships the supporting cast needed to verify the pipeline:
//! partition metrics (modularity, NMI, best-match Jaccard scores), a
//! layered stochastic-blockmodel benchmark generator, and a CLI
//! (`gen` / `detect` / `eval` / `trace`) over plain text formats.
//!
//! Data-parallel inner loops (per-community reduction and sampling, metric
//! best-match search) run on rayon under the default `parallel` feature and
//! fall back to sequential iterators without it; results are identical
//! either way.

pub mod cli;
pub mod detect;
mod error;
pub mod exec;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod reduce;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
