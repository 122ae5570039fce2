//! Mining public-transport incident reports from operator social-media posts.
//!
//! The pipeline classifies posts by incident type, resolves street and stop
//! mentions to coordinates through a gazetteer, counts affected lines,
//! estimates passenger impact from mobility-survey flows and summarizes
//! comment sentiment and engagement. Results are written as GeoJSON and CSV.

pub mod classifier;
pub mod engagement;
pub mod error;
pub mod exec;
pub mod geoparse;
pub mod impact;
pub mod ingest;
pub mod lines;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
