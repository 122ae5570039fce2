use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Seven-class typology of operator posts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IncidentLabel {
    Accident,
    Event,
    Fix,
    Incident,
    Malfunction,
    Renovation,
    Unknown,
}

impl IncidentLabel {
    pub const ALL: [IncidentLabel; 7] = [
        IncidentLabel::Accident,
        IncidentLabel::Event,
        IncidentLabel::Fix,
        IncidentLabel::Incident,
        IncidentLabel::Malfunction,
        IncidentLabel::Renovation,
        IncidentLabel::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IncidentLabel::Accident => "accident",
            IncidentLabel::Event => "event",
            IncidentLabel::Fix => "fix",
            IncidentLabel::Incident => "incident",
            IncidentLabel::Malfunction => "malfunction",
            IncidentLabel::Renovation => "renovation",
            IncidentLabel::Unknown => "unknown",
        }
    }

    /// Unplanned disruptions. Planned changes (event, renovation) and
    /// restorations (fix) fall outside the analysis set.
    pub fn is_disruption(self) -> bool {
        !matches!(
            self,
            IncidentLabel::Event | IncidentLabel::Renovation | IncidentLabel::Fix
        )
    }

    pub fn label_set() -> Vec<String> {
        Self::ALL.iter().map(|l| l.as_str().to_string()).collect()
    }
}

impl fmt::Display for IncidentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IncidentLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s.trim())
            .ok_or_else(|| format!("unknown incident label `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Neutral,
    Negative,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Positive,
        SentimentLabel::Neutral,
        SentimentLabel::Negative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Negative => "negative",
        }
    }

    pub fn label_set() -> Vec<String> {
        Self::ALL.iter().map(|l| l.as_str().to_string()).collect()
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s.trim())
            .ok_or_else(|| format!("unknown sentiment label `{s}`"))
    }
}
