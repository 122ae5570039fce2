use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geoparse::NameNormalizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToponymKind {
    Stop,
    Street,
    Intersection,
}

impl ToponymKind {
    /// Lower wins when several entries match equally well.
    pub fn priority(self) -> u8 {
        match self {
            ToponymKind::Stop => 0,
            ToponymKind::Intersection => 1,
            ToponymKind::Street => 2,
        }
    }
}

impl std::str::FromStr for ToponymKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_lowercase().as_str() {
            "stop" => Ok(ToponymKind::Stop),
            "street" => Ok(ToponymKind::Street),
            "intersection" => Ok(ToponymKind::Intersection),
            other => Err(format!("unknown toponym kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToponymSource {
    Gtfs,
    Osm,
    Manual,
}

impl std::str::FromStr for ToponymSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_lowercase().as_str() {
            "gtfs" => Ok(ToponymSource::Gtfs),
            "osm" => Ok(ToponymSource::Osm),
            "manual" => Ok(ToponymSource::Manual),
            other => Err(format!("unknown toponym source `{other}`")),
        }
    }
}

/// A named place with WGS84 coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Toponym {
    pub name: String,
    pub kind: ToponymKind,
    pub lat: f64,
    pub lon: f64,
    pub source: ToponymSource,
}

impl Toponym {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.name.trim().is_empty() {
            return Err("toponym name is empty".into());
        }
        check_coordinates(self.lat, self.lon)
    }
}

pub(crate) fn check_coordinates(lat: f64, lon: f64) -> std::result::Result<(), String> {
    if !(-90.0..=90.0).contains(&lat) {
        return Err(format!("latitude {lat} outside [-90, 90]"));
    }
    if !(-180.0..=180.0).contains(&lon) {
        return Err(format!("longitude {lon} outside [-180, 180]"));
    }
    Ok(())
}

/// Place names indexed by their normalized form.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<Toponym>,
    normalized: Vec<String>,
    index: BTreeMap<String, Vec<usize>>,
    normalizer: NameNormalizer,
}

impl Gazetteer {
    pub fn new(toponyms: Vec<Toponym>, normalizer: NameNormalizer) -> Self {
        let normalized: Vec<String> = toponyms.iter().map(|t| normalizer.normalize(&t.name)).collect();
        let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, key) in normalized.iter().enumerate() {
            index.entry(key.clone()).or_default().push(i);
        }
        Gazetteer {
            entries: toponyms,
            normalized,
            index,
            normalizer,
        }
    }

    pub fn entries(&self) -> &[Toponym] {
        &self.entries
    }

    /// Normalized name of entry `i`, parallel to [`Gazetteer::entries`].
    pub fn normalized_name(&self, i: usize) -> &str {
        &self.normalized[i]
    }

    pub fn index(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.index
    }

    pub fn normalizer(&self) -> &NameNormalizer {
        &self.normalizer
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact lookup after normalization.
    pub fn lookup(&self, name: &str) -> Vec<&Toponym> {
        self.index
            .get(&self.normalizer.normalize(name))
            .map(|ix| ix.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    /// (min_lat, min_lon, max_lat, max_lon), or `None` when empty.
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        self.entries.iter().fold(None, |acc, t| {
            Some(match acc {
                None => (t.lat, t.lon, t.lat, t.lon),
                Some((a, b, c, d)) => (a.min(t.lat), b.min(t.lon), c.max(t.lat), d.max(t.lon)),
            })
        })
    }
}

pub fn build_gazetteer(toponyms: Vec<Toponym>) -> Gazetteer {
    Gazetteer::new(toponyms, NameNormalizer::default())
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file))
}

/// Resolves required header names to column positions.
pub(crate) fn column_indices<const N: usize>(
    path: &Path,
    headers: &csv::StringRecord,
    names: [&str; N],
) -> Result<[usize; N]> {
    let mut out = [0; N];
    for (slot, name) in out.iter_mut().zip(names) {
        *slot = headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}') == name)
            .ok_or_else(|| Error::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            })?;
    }
    Ok(out)
}

pub(crate) fn read_records(
    path: &Path,
) -> Result<(csv::StringRecord, Vec<(usize, csv::StringRecord)>)> {
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e))?
        .clone();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(line);
            Error::parse(path, line, e)
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(line);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, rec));
    }
    Ok((headers, rows))
}

pub(crate) fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    rec: &csv::StringRecord,
    col: usize,
    name: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(col).unwrap_or("");
    raw.parse::<T>()
        .map_err(|e| Error::parse(path, line, format!("{name} `{raw}`: {e}")))
}

/// Reads GTFS `stops.txt`, one stop toponym per distinct (name, position).
pub fn load_gtfs_stops(path: impl AsRef<Path>) -> Result<Vec<Toponym>> {
    let path = path.as_ref();
    let (headers, rows) = read_records(path)?;
    let [_, name_col, lat_col, lon_col] =
        column_indices(path, &headers, ["stop_id", "stop_name", "stop_lat", "stop_lon"])?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, rec) in rows {
        let name = rec.get(name_col).unwrap_or("").to_string();
        let lat: f64 = parse_field(path, line, &rec, lat_col, "stop_lat")?;
        let lon: f64 = parse_field(path, line, &rec, lon_col, "stop_lon")?;
        let stop = Toponym {
            name,
            kind: ToponymKind::Stop,
            lat,
            lon,
            source: ToponymSource::Gtfs,
        };
        stop.validate().map_err(|m| Error::parse(path, line, m))?;
        let key = (
            stop.name.clone(),
            (lat * 1e6).round() as i64,
            (lon * 1e6).round() as i64,
        );
        if seen.insert(key) {
            out.push(stop);
        }
    }
    Ok(out)
}

/// Reads `gazetteer.csv` with columns name, kind, lat, lon, source.
pub fn load_gazetteer_csv(path: impl AsRef<Path>) -> Result<Vec<Toponym>> {
    let path = path.as_ref();
    let (headers, rows) = read_records(path)?;
    let [name_col, kind_col, lat_col, lon_col, source_col] =
        column_indices(path, &headers, ["name", "kind", "lat", "lon", "source"])?;
    rows.into_iter()
        .map(|(line, rec)| {
            let t = Toponym {
                name: rec.get(name_col).unwrap_or("").to_string(),
                kind: parse_field(path, line, &rec, kind_col, "kind")?,
                lat: parse_field(path, line, &rec, lat_col, "lat")?,
                lon: parse_field(path, line, &rec, lon_col, "lon")?,
                source: parse_field(path, line, &rec, source_col, "source")?,
            };
            t.validate().map_err(|m| Error::parse(path, line, m))?;
            Ok(t)
        })
        .collect()
}
