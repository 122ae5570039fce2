use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::gazetteer::{check_coordinates, column_indices, parse_field, read_records};
use crate::error::{Error, Result};

/// A survey zone. The ring is stored open: the closing edge from the last
/// vertex back to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityRegion {
    pub region_id: String,
    /// (lat, lon) vertices.
    pub polygon: Vec<(f64, f64)>,
}

impl MobilityRegion {
    /// Builds a region, dropping a repeated closing vertex and checking the
    /// ring has at least three distinct vertices and no self-intersections.
    pub fn new(region_id: impl Into<String>, mut ring: Vec<(f64, f64)>) -> std::result::Result<Self, String> {
        let region_id = region_id.into();
        if ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        let distinct: HashSet<(u64, u64)> =
            ring.iter().map(|&(a, b)| (a.to_bits(), b.to_bits())).collect();
        if distinct.len() < 3 {
            return Err(format!(
                "region `{region_id}`: polygon needs at least 3 distinct vertices, found {}",
                distinct.len()
            ));
        }
        for &(lat, lon) in &ring {
            check_coordinates(lat, lon).map_err(|m| format!("region `{region_id}`: {m}"))?;
        }
        if !is_simple(&ring) {
            return Err(format!("region `{region_id}`: polygon ring intersects itself"));
        }
        Ok(MobilityRegion {
            region_id,
            polygon: ring,
        })
    }
}

fn orientation(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_touch(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// O(n²) check that no two non-adjacent edges of the closed ring meet.
fn is_simple(ring: &[(f64, f64)]) -> bool {
    let n = ring.len();
    let edge = |i: usize| (ring[i], ring[(i + 1) % n]);
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (a, b) = edge(i);
            let (c, d) = edge(j);
            if segments_touch(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayKind {
    Weekday,
    Weekend,
}

impl std::str::FromStr for DayKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_lowercase().as_str() {
            "weekday" => Ok(DayKind::Weekday),
            "weekend" => Ok(DayKind::Weekend),
            other => Err(format!("unknown day kind `{other}` (expected weekday|weekend)")),
        }
    }
}

/// Typical-day passenger counts keyed by (region, hour, day kind).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowTable {
    rows: BTreeMap<(String, u8, DayKind), u64>,
}

impl FlowTable {
    pub fn insert(&mut self, region_id: impl Into<String>, hour: u8, day: DayKind, passengers: u64) -> Result<()> {
        if hour > 23 {
            return Err(Error::invalid(format!("hour {hour} outside 0-23")));
        }
        self.rows.insert((region_id.into(), hour, day), passengers);
        Ok(())
    }

    pub fn get(&self, region_id: &str, hour: u8, day: DayKind) -> Option<u64> {
        self.rows.get(&(region_id.to_string(), hour, day)).copied()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u8, DayKind, u64)> {
        self.rows.iter().map(|((r, h, d), p)| (r.as_str(), *h, *d, *p))
    }
}

fn region_id_of(props: &Value) -> Option<String> {
    match props.get("region_id")? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn ring_of(geometry: &Value) -> std::result::Result<Vec<(f64, f64)>, String> {
    let kind = geometry.get("type").and_then(Value::as_str).unwrap_or("");
    if kind != "Polygon" {
        return Err(format!("geometry type `{kind}` is not Polygon"));
    }
    let outer = geometry
        .get("coordinates")
        .and_then(|c| c.get(0))
        .and_then(Value::as_array)
        .ok_or("polygon has no outer ring")?;
    outer
        .iter()
        .map(|pos| {
            let lon = pos.get(0).and_then(Value::as_f64);
            let lat = pos.get(1).and_then(Value::as_f64);
            match (lat, lon) {
                (Some(lat), Some(lon)) => Ok((lat, lon)),
                _ => Err(format!("bad position {pos}")),
            }
        })
        .collect()
}

/// Reads a feature collection of Polygon features carrying a `region_id`
/// property. Positions are GeoJSON `[lon, lat]`; only the outer ring is used.
pub fn load_regions(path: impl AsRef<Path>) -> Result<Vec<MobilityRegion>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: Value = serde_json::from_str(&raw)
        .map_err(|e| Error::parse(path, e.line(), e))?;
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::invalid(format!("{}: not a feature collection", path.display())))?;
    let mut seen = HashSet::new();
    let mut regions = Vec::with_capacity(features.len());
    for (i, feature) in features.iter().enumerate() {
        let fail = |m: String| Error::invalid(format!("{}: feature {i}: {m}", path.display()));
        let id = feature
            .get("properties")
            .and_then(region_id_of)
            .ok_or_else(|| fail("missing region_id property".into()))?;
        if !seen.insert(id.clone()) {
            return Err(fail(format!("duplicate region_id `{id}`")));
        }
        let ring = feature
            .get("geometry")
            .ok_or_else(|| fail("missing geometry".into()))
            .and_then(|g| ring_of(g).map_err(fail))?;
        regions.push(MobilityRegion::new(id, ring).map_err(fail)?);
    }
    Ok(regions)
}

/// Reads `flows.csv` (region_id, hour, day_kind, passengers). Every row must
/// name a region from `regions`.
pub fn load_flows(path: impl AsRef<Path>, regions: &[MobilityRegion]) -> Result<FlowTable> {
    let path = path.as_ref();
    let known: HashSet<&str> = regions.iter().map(|r| r.region_id.as_str()).collect();
    let (headers, rows) = read_records(path)?;
    let [region_col, hour_col, day_col, pax_col] =
        column_indices(path, &headers, ["region_id", "hour", "day_kind", "passengers"])?;
    let mut table = FlowTable::default();
    for (line, rec) in rows {
        let region = rec.get(region_col).unwrap_or("").to_string();
        if !known.contains(region.as_str()) {
            return Err(Error::parse(path, line, Error::UnknownRegion(region)));
        }
        let hour: u8 = parse_field(path, line, &rec, hour_col, "hour")?;
        if hour > 23 {
            return Err(Error::parse(path, line, format!("hour {hour} outside 0-23")));
        }
        let day: DayKind = parse_field(path, line, &rec, day_col, "day_kind")?;
        let passengers: u64 = parse_field(path, line, &rec, pax_col, "passengers")?;
        if table.get(&region, hour, day).is_some() {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate flow row for ({region}, {hour}, {day:?})"),
            ));
        }
        table.insert(region, hour, day, passengers)?;
    }
    Ok(table)
}

pub fn load_regions_and_flows(
    regions_path: impl AsRef<Path>,
    flows_path: impl AsRef<Path>,
) -> Result<(Vec<MobilityRegion>, FlowTable)> {
    let regions = load_regions(regions_path)?;
    let flows = load_flows(flows_path, &regions)?;
    Ok((regions, flows))
}
