use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::distance::distances_to_prefixes;
use super::mentions::{detect_mentions, SpatialMention, TriggerLexicon};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{Gazetteer, Post, Toponym, ToponymKind};

/// Longest entry suffix ignored when scoring, to absorb inflectional endings.
pub const MAX_TRUNCATION: usize = 3;

pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub toponym: Toponym,
    /// Position of the toponym in the gazetteer.
    pub entry: usize,
    pub score: f64,
    pub mention: SpatialMention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidentLocation {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub source_kind: ToponymKind,
    pub confidence: f64,
}

/// Normalized distance between a mention and a gazetteer name, minimized
/// over dropping the last 0..=3 characters of the name:
/// `min_t d(mention, entry[..len-t]) / max(|mention|, len - t)`.
pub fn match_score(mention: &str, entry: &str) -> f64 {
    let m: Vec<char> = mention.chars().collect();
    let e: Vec<char> = entry.chars().collect();
    let row = distances_to_prefixes(&m, &e);
    (0..=MAX_TRUNCATION.min(e.len()))
        .map(|t| {
            let kept = e.len() - t;
            let denom = m.len().max(kept);
            if denom == 0 {
                0.0
            } else {
                row[kept] as f64 / denom as f64
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn check_threshold(threshold: f64) -> Result<()> {
    if (0.0..=1.0).contains(&threshold) {
        Ok(())
    } else {
        Err(Error::invalid(format!("threshold {threshold} outside [0, 1]")))
    }
}

/// Best gazetteer entry for a mention, if its score is within `threshold`.
/// Ties go to the lower score, then stop > intersection > street, then name.
pub fn match_toponym(mention: &SpatialMention, gaz: &Gazetteer, threshold: f64) -> Option<MatchResult> {
    let needle = gaz.normalizer().normalize(&mention.text());
    let mut best: Option<(f64, usize)> = None;
    for (i, entry) in gaz.entries().iter().enumerate() {
        let score = match_score(&needle, gaz.normalized_name(i));
        if score > threshold {
            continue;
        }
        let better = match best {
            None => true,
            Some((s, j)) => {
                let other = &gaz.entries()[j];
                score
                    .total_cmp(&s)
                    .then(entry.kind.priority().cmp(&other.kind.priority()))
                    .then(entry.name.cmp(&other.name))
                    .then(i.cmp(&j))
                    == Ordering::Less
            }
        };
        if better {
            best = Some((score, i));
        }
    }
    best.map(|(score, entry)| MatchResult {
        toponym: gaz.entries()[entry].clone(),
        entry,
        score,
        mention: mention.clone(),
    })
}

/// Resolves spatial mentions in post text against a gazetteer.
#[derive(Debug, Clone)]
pub struct Geocoder {
    gazetteer: Gazetteer,
    lexicon: TriggerLexicon,
    threshold: f64,
}

impl Geocoder {
    pub fn new(gazetteer: Gazetteer, lexicon: TriggerLexicon, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(Geocoder {
            gazetteer,
            lexicon,
            threshold,
        })
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn matches(&self, text: &str) -> Vec<MatchResult> {
        if self.gazetteer.is_empty() {
            return Vec::new();
        }
        detect_mentions(text, &self.lexicon)
            .iter()
            .filter_map(|m| match_toponym(m, &self.gazetteer, self.threshold))
            .collect()
    }

    /// One location per distinct matched toponym, in mention order.
    pub fn locate(&self, text: &str) -> Vec<IncidentLocation> {
        let mut seen = HashSet::new();
        self.matches(text)
            .into_iter()
            .filter(|m| seen.insert(m.entry))
            .map(|m| IncidentLocation {
                name: m.toponym.name,
                lat: m.toponym.lat,
                lon: m.toponym.lon,
                source_kind: m.toponym.kind,
                confidence: 1.0 - m.score,
            })
            .collect()
    }

    pub fn geocode_all(&self, posts: &[Post], exec: Execution) -> Vec<Vec<IncidentLocation>> {
        exec.map(posts, |p| self.locate(&p.text))
    }
}

pub fn geocode_post(
    post: &Post,
    gaz: &Gazetteer,
    lexicon: &TriggerLexicon,
    threshold: f64,
) -> Vec<IncidentLocation> {
    Geocoder {
        gazetteer: gaz.clone(),
        lexicon: lexicon.clone(),
        threshold,
    }
    .locate(&post.text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_gazetteer, Platform, ToponymSource};

    fn topo(name: &str, kind: ToponymKind, lat: f64, lon: f64) -> Toponym {
        Toponym {
            name: name.into(),
            kind,
            lat,
            lon,
            source: ToponymSource::Manual,
        }
    }

    fn mention(words: &[&str]) -> SpatialMention {
        SpatialMention {
            surface: words.iter().map(|s| s.to_string()).collect(),
            char_span: (0, 0),
            trigger: "ul".into(),
        }
    }

    fn post(text: &str) -> Post {
        Post {
            id: "p".into(),
            platform: Platform::Twitter,
            published_at: "2019-05-06T08:00:00Z".parse().unwrap(),
            text: text.into(),
            hashtags: vec![],
            reactions: Default::default(),
            comments: vec![],
        }
    }

    #[test]
    fn exact_name_scores_zero() {
        let gaz = build_gazetteer(vec![topo("Legnicka", ToponymKind::Street, 51.12, 16.99)]);
        let m = match_toponym(&mention(&["legnicka"]), &gaz, 0.3).unwrap();
        assert_eq!(m.score, 0.0);
    }

    #[test]
    fn genitive_form_matches_at_default_threshold() {
        // d("legnickiej", "legnicka") = 3 and d(.., "legnick") = 3, both over 10 chars
        assert_eq!(match_score("legnickiej", "legnicka"), 0.3);
        let gaz = build_gazetteer(vec![topo("ul. Legnicka", ToponymKind::Street, 51.12, 16.99)]);
        let m = match_toponym(&mention(&["legnickiej"]), &gaz, DEFAULT_THRESHOLD).unwrap();
        assert!(m.score <= 0.3);
    }

    #[test]
    fn unrelated_text_does_not_match() {
        let gaz = build_gazetteer(vec![topo("Legnicka", ToponymKind::Street, 51.12, 16.99)]);
        assert!(match_score("xyzqw", "legnicka") > 0.3);
        assert!(match_toponym(&mention(&["xyzqw"]), &gaz, 0.3).is_none());
    }

    #[test]
    fn ties_prefer_stops_then_intersections() {
        let gaz = build_gazetteer(vec![
            topo("Rynek", ToponymKind::Street, 51.0, 17.0),
            topo("Rynek", ToponymKind::Intersection, 51.1, 17.1),
            topo("Rynek", ToponymKind::Stop, 51.2, 17.2),
        ]);
        let m = match_toponym(&mention(&["rynek"]), &gaz, 0.3).unwrap();
        assert_eq!(m.toponym.kind, ToponymKind::Stop);
        let gaz = build_gazetteer(vec![
            topo("Rynek", ToponymKind::Street, 51.0, 17.0),
            topo("Rynek", ToponymKind::Intersection, 51.1, 17.1),
        ]);
        assert_eq!(match_toponym(&mention(&["rynek"]), &gaz, 0.3).unwrap().entry, 1);
    }

    #[test]
    fn geocodes_a_post() {
        let gaz = build_gazetteer(vec![
            topo("Legnicka", ToponymKind::Street, 51.12, 16.99),
            topo("Kazimierza Wielkiego", ToponymKind::Street, 51.11, 17.03),
        ]);
        let lex = TriggerLexicon::default();
        let locs = geocode_post(&post("Awaria na ul. Legnickiej"), &gaz, &lex, 0.3);
        assert_eq!(locs.len(), 1);
        assert_eq!((locs[0].lat, locs[0].lon, locs[0].source_kind), (51.12, 16.99, ToponymKind::Street));
        assert!(geocode_post(&post("Tramwaje kursują normalnie"), &gaz, &lex, 0.3).is_empty());
        let two = geocode_post(
            &post("Objazd przez ul. Legnicką, a potem przez ul. Kazimierza Wielkiego"),
            &gaz,
            &lex,
            0.3,
        );
        assert_eq!(two.len(), 2);
    }

    #[test]
    fn repeated_mentions_collapse() {
        let gaz = build_gazetteer(vec![topo("Legnicka", ToponymKind::Street, 51.12, 16.99)]);
        let locs = geocode_post(&post("ul. Legnicka zamknięta, objazd ul. Legnicka"), &gaz, &TriggerLexicon::default(), 0.3);
        assert_eq!(locs.len(), 1);
    }

    #[test]
    fn threshold_is_validated() {
        let gaz = build_gazetteer(vec![]);
        assert!(Geocoder::new(gaz.clone(), TriggerLexicon::default(), 1.5).is_err());
        let g = Geocoder::new(gaz, TriggerLexicon::default(), 0.3).unwrap();
        assert!(g.locate("na ul. Legnickiej").is_empty());
    }
}
