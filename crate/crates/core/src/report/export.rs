use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::records::IncidentRecord;
use crate::classifier::{IncidentLabel, SentimentLabel};
use crate::engagement::ReactionTable;
use crate::error::{Error, Result};
use crate::lines::{compare_line_ids, LineMentionCount};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureCollection {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub features: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoJsonExport {
    pub collection: FeatureCollection,
    /// Records without any location.
    pub skipped: usize,
}

impl GeoJsonExport {
    pub fn to_string_pretty(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.collection).map_err(|e| Error::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// One Point feature per record at its first location, ordered by post id.
/// Positions follow GeoJSON order: `[lon, lat]`.
pub fn export_geojson(records: &[IncidentRecord]) -> GeoJsonExport {
    let mut sorted: Vec<&IncidentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    let mut skipped = 0;
    let mut features = Vec::with_capacity(records.len());
    for r in sorted {
        let Some(loc) = r.primary_location() else {
            skipped += 1;
            continue;
        };
        let mut lines: Vec<&String> = r.lines.iter().collect();
        lines.sort_by(|a, b| compare_line_ids(a, b));
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [loc.lon, loc.lat]},
            "properties": {
                "post_id": r.post_id,
                "label": r.label,
                "interactions": r.interactions.interactions,
                "lines": lines,
                "region_id": r.region_id,
                "place": loc.name,
                "source_kind": loc.source_kind,
            },
        }));
    }
    GeoJsonExport {
        collection: FeatureCollection {
            kind: "FeatureCollection",
            features,
        },
        skipped,
    }
}

/// The four summary tables, as CSV text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryFiles {
    pub post_types: String,
    pub line_counts: String,
    pub sentiment: String,
    pub reactions: String,
}

impl SummaryFiles {
    pub fn named(&self) -> [(&'static str, &str); 4] {
        [
            ("post_types.csv", &self.post_types),
            ("line_counts.csv", &self.line_counts),
            ("sentiment_distribution.csv", &self.sentiment),
            ("reactions.csv", &self.reactions),
        ]
    }
}

fn csv_text(comment: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Internal(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| Error::Internal(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(format!("# {comment}\n{body}"))
}

fn by_count_desc<K: Ord>(counts: BTreeMap<K, u64>) -> Vec<(K, u64)> {
    let mut v: Vec<(K, u64)> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
    v.sort_by(|a, b| match b.1.cmp(&a.1) {
        Ordering::Equal => a.0.cmp(&b.0),
        other => other,
    });
    v
}

pub fn line_counts_csv(line_counts: &[LineMentionCount]) -> Result<String> {
    csv_text(
        "line mentions; rows by post_count descending, then line_id (numeric first)",
        &["line_id", "mode", "post_count"],
        line_counts
            .iter()
            .map(|c| vec![c.line_id.clone(), c.mode.to_string(), c.post_count.to_string()])
            .collect(),
    )
}

pub fn export_summaries(
    records: &[IncidentRecord],
    line_counts: &[LineMentionCount],
    sentiment: &BTreeMap<String, SentimentLabel>,
    reactions: &ReactionTable,
) -> Result<SummaryFiles> {
    let mut types: BTreeMap<IncidentLabel, u64> = BTreeMap::new();
    for r in records {
        *types.entry(r.label).or_default() += 1;
    }
    let post_types = csv_text(
        "post types; rows by count descending, then label",
        &["label", "count"],
        by_count_desc(types)
            .into_iter()
            .map(|(l, n)| vec![l.to_string(), n.to_string()])
            .collect(),
    )?;

    let lines = line_counts_csv(line_counts)?;

    let mut sentiments: BTreeMap<SentimentLabel, u64> = BTreeMap::new();
    for label in sentiment.values() {
        *sentiments.entry(*label).or_default() += 1;
    }
    let sentiment_csv = csv_text(
        "comment sentiment; rows by count descending, then positive/neutral/negative",
        &["label", "count"],
        by_count_desc(sentiments)
            .into_iter()
            .map(|(l, n)| vec![l.to_string(), n.to_string()])
            .collect(),
    )?;

    let mut header = vec!["label"];
    header.extend(reactions.kinds.iter().map(String::as_str));
    header.push("total");
    let reaction_rows = IncidentLabel::ALL
        .iter()
        .filter(|l| reactions.posts.get(l).copied().unwrap_or(0) > 0)
        .map(|&l| {
            let mut row = vec![l.to_string()];
            row.extend(reactions.kinds.iter().map(|k| reactions.get(l, k).to_string()));
            row.push(reactions.row_total(l).to_string());
            row
        })
        .collect();
    let reactions_csv = csv_text(
        "reactions per post type; columns: label, reaction kinds sorted by name, total; rows in label order",
        &header,
        reaction_rows,
    )?;

    Ok(SummaryFiles {
        post_types,
        line_counts: lines,
        sentiment: sentiment_csv,
        reactions: reactions_csv,
    })
}
