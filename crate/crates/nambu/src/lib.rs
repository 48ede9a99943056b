//! File formats, parallel batches, checkpoints, reports and the end-to-end
//! pipeline on top of `nambu-core`.

pub mod batch;
pub mod checkpoint;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use nambu_core;
pub use pipeline::{run, Outcome, ProblemSpec, RunOptions, SkewMode, Source, Stage};
