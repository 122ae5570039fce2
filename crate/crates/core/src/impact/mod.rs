//! Passenger-impact and disruption-frequency estimates.
//!
//! Each incident is placed in the mobility region containing its location and
//! charged the region's typical passenger count for the start hour, assuming
//! the disruption is cleared within that hour. Only weekday incidents count.

mod polygon;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Datelike, NaiveDate, Timelike, Utc, Weekday};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geoparse::IncidentLocation;
use crate::ingest::{DayKind, FlowTable, MobilityRegion};

pub use polygon::{point_in_polygon, point_in_region};

pub const SECONDS_PER_DAY: i64 = 86_400;

pub fn day_kind(date: NaiveDate) -> DayKind {
    match date.weekday() {
        Weekday::Sat | Weekday::Sun => DayKind::Weekend,
        _ => DayKind::Weekday,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowLookup {
    pub passengers: u64,
    /// No row for the key; `passengers` is 0.
    pub missing: bool,
}

/// Typical passengers in `region_id` during the civil hour (in `tz`) of `at`.
pub fn passengers_at(region_id: &str, at: DateTime<Utc>, flows: &FlowTable, tz: Tz) -> FlowLookup {
    let local = at.with_timezone(&tz);
    let hour = local.hour() as u8;
    match flows.get(region_id, hour, day_kind(local.date_naive())) {
        Some(passengers) => FlowLookup {
            passengers,
            missing: false,
        },
        None => FlowLookup {
            passengers: 0,
            missing: true,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub total_passengers: u64,
    pub per_region: BTreeMap<String, u64>,
    pub per_day_average: f64,
    pub distinct_incident_weekdays: usize,
    pub unmapped_incidents: usize,
    pub weekday_incidents: usize,
    /// Mapped incidents whose (region, hour, day kind) had no flow row.
    pub missing_flow_rows: usize,
}

enum Contribution<'a> {
    Weekend,
    Unmapped(NaiveDate),
    Mapped {
        date: NaiveDate,
        region: &'a str,
        flow: FlowLookup,
    },
}

pub fn estimate_impact(
    incidents: &[(IncidentLocation, DateTime<Utc>)],
    regions: &[MobilityRegion],
    flows: &FlowTable,
    tz: Tz,
    exec: Execution,
) -> ImpactReport {
    let contributions = exec.map(incidents, |(loc, at)| {
        let date = at.with_timezone(&tz).date_naive();
        if day_kind(date) == DayKind::Weekend {
            return Contribution::Weekend;
        }
        match point_in_region((loc.lat, loc.lon), regions) {
            None => Contribution::Unmapped(date),
            Some(region) => Contribution::Mapped {
                date,
                region,
                flow: passengers_at(region, *at, flows, tz),
            },
        }
    });

    let mut per_region: BTreeMap<String, u64> = BTreeMap::new();
    let mut dates = BTreeSet::new();
    let (mut unmapped, mut missing, mut weekday) = (0, 0, 0);
    for c in contributions {
        match c {
            Contribution::Weekend => {}
            Contribution::Unmapped(date) => {
                weekday += 1;
                unmapped += 1;
                dates.insert(date);
            }
            Contribution::Mapped { date, region, flow } => {
                weekday += 1;
                dates.insert(date);
                missing += usize::from(flow.missing);
                *per_region.entry(region.to_string()).or_default() += flow.passengers;
            }
        }
    }
    let total: u64 = per_region.values().sum();
    ImpactReport {
        total_passengers: total,
        per_region,
        per_day_average: total as f64 / dates.len().max(1) as f64,
        distinct_incident_weekdays: dates.len(),
        unmapped_incidents: unmapped,
        weekday_incidents: weekday,
        missing_flow_rows: missing,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyStats {
    pub incident_count: usize,
    pub span_days: f64,
    pub days_per_incident: f64,
}

/// Average spacing of incidents: the observed span divided by the count.
pub fn frequency_stats(timestamps: &[DateTime<Utc>]) -> Result<FrequencyStats> {
    let (Some(first), Some(last)) = (timestamps.iter().min(), timestamps.iter().max()) else {
        return Err(Error::invalid("frequency statistics need at least one incident"));
    };
    let span_secs = (*last - *first).num_seconds();
    let n = timestamps.len();
    Ok(FrequencyStats {
        incident_count: n,
        span_days: span_secs as f64 / SECONDS_PER_DAY as f64,
        // one rounding step from the exact ratio
        days_per_incident: span_secs as f64 / (n as i64 * SECONDS_PER_DAY) as f64,
    })
}
