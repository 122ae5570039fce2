use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::classifier::IncidentLabel;
use crate::engagement::{interaction_summary, InteractionSummary};
use crate::geoparse::IncidentLocation;
use crate::ingest::{timestamp, Post};

/// A post with its predicted incident type, as written by `classify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPost {
    #[serde(flatten)]
    pub post: Post,
    pub label: IncidentLabel,
    #[serde(default)]
    pub label_probability: f64,
}

/// A classified, geocoded post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidentRecord {
    pub post_id: String,
    pub label: IncidentLabel,
    #[serde(with = "timestamp")]
    pub published_at: DateTime<Utc>,
    pub locations: Vec<IncidentLocation>,
    #[serde(default)]
    pub lines: BTreeSet<String>,
    #[serde(default)]
    pub region_id: Option<String>,
    pub interactions: InteractionSummary,
}

impl IncidentRecord {
    pub fn new(post: &Post, label: IncidentLabel, locations: Vec<IncidentLocation>) -> Self {
        IncidentRecord {
            post_id: post.id.clone(),
            label,
            published_at: post.published_at,
            locations,
            lines: BTreeSet::new(),
            region_id: None,
            interactions: interaction_summary(post),
        }
    }

    /// The location used for maps and impact: the first one matched.
    pub fn primary_location(&self) -> Option<&IncidentLocation> {
        self.locations.first()
    }
}

/// Incidents with a location, paired with their timestamps, for impact estimation.
pub fn located_incidents(records: &[IncidentRecord]) -> Vec<(IncidentLocation, DateTime<Utc>)> {
    records
        .iter()
        .filter_map(|r| r.primary_location().map(|l| (l.clone(), r.published_at)))
        .collect()
}
