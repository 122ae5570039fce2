//! Pipeline orchestration and report export (GeoJSON and CSV).

mod export;
mod pipeline;
mod records;

pub use export::{export_geojson, export_summaries, line_counts_csv, FeatureCollection, GeoJsonExport, SummaryFiles};
pub use pipeline::{
    comment_sentiment_csv, load_toponyms, parse_timezone, pretty_json, run_pipeline, write_artifacts,
    ImpactSummary, ModelSource, PipelineConfig, PipelineSummary, DEFAULT_TIMEZONE,
};
pub use records::{located_incidents, IncidentRecord, LabeledPost};
