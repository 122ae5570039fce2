//! Spatial mention detection and gazetteer resolution.

mod distance;
mod matching;
mod mentions;
mod normalize;

pub use distance::{distances_to_prefixes, edit_distance};
pub use matching::{
    geocode_post, match_score, match_toponym, Geocoder, IncidentLocation, MatchResult,
    DEFAULT_THRESHOLD, MAX_TRUNCATION,
};
pub use mentions::{detect_mentions, SpatialMention, TriggerLexicon};
pub use normalize::{normalize_name, NameNormalizer};
