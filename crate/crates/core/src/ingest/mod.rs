//! Input parsing: post corpora, GTFS stops, gazetteers, mobility regions and
//! passenger flows.

mod gazetteer;
mod posts;
mod regions;

pub use gazetteer::{
    build_gazetteer, load_gazetteer_csv, load_gtfs_stops, Gazetteer, Toponym, ToponymKind,
    ToponymSource,
};
pub use posts::{load_jsonl, load_posts, read_jsonl, timestamp, to_jsonl, Comment, Platform, Post};
pub use regions::{load_flows, load_regions, load_regions_and_flows, DayKind, FlowTable, MobilityRegion};

pub(crate) use gazetteer::{column_indices, parse_field, read_records};
