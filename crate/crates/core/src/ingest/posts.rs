use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Facebook,
    Twitter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub author_hash: String,
    #[serde(with = "timestamp")]
    pub published_at: DateTime<Utc>,
}

/// One operator message as scraped from a social-media channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub platform: Platform,
    #[serde(with = "timestamp")]
    pub published_at: DateTime<Utc>,
    pub text: String,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub reactions: BTreeMap<String, u64>,
    #[serde(default)]
    pub comments: Vec<Comment>,
}

impl Post {
    /// Case-insensitive hashtag test against both the `hashtags` list and
    /// `#tag` occurrences in the text.
    pub fn has_hashtag(&self, tag: &str) -> bool {
        let wanted = tag.trim().trim_start_matches('#').to_lowercase();
        if wanted.is_empty() {
            return true;
        }
        if self
            .hashtags
            .iter()
            .any(|h| h.trim().trim_start_matches('#').to_lowercase() == wanted)
        {
            return true;
        }
        let needle = format!("#{wanted}");
        let text = self.text.to_lowercase();
        text.match_indices(&needle).any(|(at, m)| {
            text[at + m.len()..]
                .chars()
                .next()
                .is_none_or(|c| !c.is_alphanumeric())
        })
    }
}

/// RFC 3339 timestamps with a mandatory offset, stored at whole-second precision.
pub mod timestamp {
    use chrono::{DateTime, NaiveDateTime, SubsecRound, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn parse(s: &str) -> Result<DateTime<Utc>, String> {
        match DateTime::parse_from_rfc3339(s.trim()) {
            Ok(t) => Ok(t.with_timezone(&Utc).trunc_subsecs(0)),
            Err(e) => {
                if NaiveDateTime::parse_from_str(s.trim(), "%Y-%m-%dT%H:%M:%S%.f").is_ok() {
                    Err(format!("timestamp `{s}` has no timezone offset"))
                } else {
                    Err(format!("invalid timestamp `{s}`: {e}"))
                }
            }
        }
    }

    pub fn format(t: &DateTime<Utc>) -> String {
        t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
    }

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(t))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).map_err(serde::de::Error::custom)
    }
}

/// Reads a JSONL post corpus. Posts come back sorted by publication time;
/// with `hashtag_filter` set only posts carrying that tag are kept.
pub fn load_posts(path: impl AsRef<Path>, hashtag_filter: Option<&str>) -> Result<Vec<Post>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut posts: Vec<Post> = read_jsonl(path, &raw)?;
    validate_posts(path, &raw, &posts)?;
    if let Some(tag) = hashtag_filter {
        posts.retain(|p| p.has_hashtag(tag));
    }
    posts.sort_by_key(|p| p.published_at);
    Ok(posts)
}

fn validate_posts(path: &Path, raw: &str, posts: &[Post]) -> Result<()> {
    let line_numbers: Vec<usize> = raw
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, _)| i + 1)
        .collect();
    let mut seen = HashSet::new();
    for (post, &line) in posts.iter().zip(&line_numbers) {
        if post.id.is_empty() {
            return Err(Error::parse(path, line, "post id is empty"));
        }
        if !seen.insert(post.id.as_str()) {
            return Err(Error::parse(path, line, format!("duplicate post id `{}`", post.id)));
        }
        let mut comment_ids = HashSet::new();
        for c in &post.comments {
            if !comment_ids.insert(c.id.as_str()) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("duplicate comment id `{}` in post `{}`", c.id, post.id),
                ));
            }
        }
    }
    Ok(())
}

/// Parses one JSON value per non-blank line, reporting 1-based line numbers.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path, raw: &str) -> Result<Vec<T>> {
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e)))
        .collect()
}

pub fn load_jsonl<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_jsonl(path, &raw)
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).map_err(|e| Error::Internal(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}
