//! Transit line mentions and per-line post counts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::tokenize;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{column_indices, parse_field, read_records, Post};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineMode {
    Tram,
    Bus,
}

impl std::str::FromStr for LineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_lowercase().as_str() {
            "tram" => Ok(LineMode::Tram),
            "bus" => Ok(LineMode::Bus),
            other => Err(format!("unknown line mode `{other}` (expected tram|bus)")),
        }
    }
}

impl std::fmt::Display for LineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LineMode::Tram => "tram",
            LineMode::Bus => "bus",
        })
    }
}

/// Known lines and the token sequences that refer to each.
#[derive(Debug, Clone, Default)]
pub struct LineRegistry {
    lines: BTreeMap<String, LineMode>,
    // (tokens, line id), longest patterns first
    patterns: Vec<(Vec<String>, String)>,
}

impl LineRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, id: &str, mode: LineMode, aliases: &[&str]) -> Result<()> {
        let id = id.trim().to_string();
        if tokenize(&id).is_empty() {
            return Err(Error::invalid(format!("line id `{id}` has no tokens")));
        }
        if self.lines.insert(id.clone(), mode).is_some() {
            return Err(Error::invalid(format!("duplicate line id `{id}`")));
        }
        for spelling in std::iter::once(id.as_str()).chain(aliases.iter().copied()) {
            let toks = tokenize(spelling);
            if !toks.is_empty() {
                self.patterns.push((toks, id.clone()));
            }
        }
        self.patterns.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.cmp(b)));
        Ok(())
    }

    /// Reads `lines.csv` with columns line_id, mode and an optional `aliases`
    /// column of `|`-separated alternate spellings.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let (headers, rows) = read_records(path)?;
        let [id_col, mode_col] = column_indices(path, &headers, ["line_id", "mode"])?;
        let alias_col = headers.iter().position(|h| h == "aliases");
        let mut reg = LineRegistry::new();
        for (line, rec) in rows {
            let mode: LineMode = parse_field(path, line, &rec, mode_col, "mode")?;
            let aliases: Vec<&str> = alias_col
                .and_then(|c| rec.get(c))
                .map(|a| a.split('|').map(str::trim).filter(|s| !s.is_empty()).collect())
                .unwrap_or_default();
            reg.add(rec.get(id_col).unwrap_or(""), mode, &aliases)
                .map_err(|e| Error::parse(path, line, e))?;
        }
        Ok(reg)
    }

    pub fn mode(&self, id: &str) -> Option<LineMode> {
        self.lines.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineMentionCount {
    pub line_id: String,
    pub mode: LineMode,
    pub post_count: u64,
}

/// Registered lines referenced in `text`. Tokens must equal a line id or
/// alias exactly, so unregistered numbers (minutes, dates) are ignored.
pub fn extract_line_mentions(text: &str, registry: &LineRegistry) -> BTreeSet<String> {
    let tokens = tokenize(text);
    let mut found = BTreeSet::new();
    for i in 0..tokens.len() {
        for (pattern, id) in &registry.patterns {
            if tokens[i..].starts_with(pattern) {
                found.insert(id.clone());
            }
        }
    }
    found
}

/// Orders numeric ids numerically ("4" < "10"), others after them lexically.
pub fn compare_line_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Number of distinct posts mentioning each line, for lines mentioned at
/// least once; sorted by count descending, then line id.
pub fn count_line_mentions(posts: &[Post], registry: &LineRegistry, exec: Execution) -> Vec<LineMentionCount> {
    let per_post = exec.map(posts, |p| extract_line_mentions(&p.text, registry));
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for id in per_post.iter().flatten() {
        *counts.entry(id.as_str()).or_default() += 1;
    }
    let mut out: Vec<LineMentionCount> = counts
        .into_iter()
        .map(|(id, n)| LineMentionCount {
            line_id: id.to_string(),
            mode: registry.lines[id],
            post_count: n,
        })
        .collect();
    out.sort_by(|a, b| {
        b.post_count
            .cmp(&a.post_count)
            .then_with(|| compare_line_ids(&a.line_id, &b.line_id))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Platform;

    fn registry() -> LineRegistry {
        let mut r = LineRegistry::new();
        r.add("4", LineMode::Tram, &[]).unwrap();
        r.add("5", LineMode::Tram, &[]).unwrap();
        r.add("74", LineMode::Bus, &[]).unwrap();
        r.add("D", LineMode::Bus, &["linia d"]).unwrap();
        r
    }

    fn post(id: &str, text: &str) -> Post {
        Post {
            id: id.into(),
            platform: Platform::Twitter,
            published_at: "2019-05-06T08:00:00Z".parse().unwrap(),
            text: text.into(),
            hashtags: vec![],
            reactions: Default::default(),
            comments: vec![],
        }
    }

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exact_token_matches() {
        let r = registry();
        assert_eq!(
            extract_line_mentions("Tramwaje linii 4, 5 i 74 skierowano objazdem", &r),
            set(&["4", "5", "74"])
        );
        assert!(extract_line_mentions("opóźnienie 15 minut", &r).is_empty());
        assert_eq!(extract_line_mentions("linia 4 ... ponownie 4", &r), set(&["4"]));
        assert!(extract_line_mentions("linia 44 i 745", &r).is_empty());
        assert_eq!(extract_line_mentions("Autobusy D kursują", &r), set(&["D"]));
    }

    #[test]
    fn counts_distinct_posts() {
        let r = registry();
        let posts = [
            post("1", "linia 4 stoi"),
            post("2", "linia 4 i 4 stoi"),
            post("3", "4 objazd, także 74"),
        ];
        let counts = count_line_mentions(&posts, &r, Execution::Sequential);
        assert_eq!(counts[0], LineMentionCount { line_id: "4".into(), mode: LineMode::Tram, post_count: 3 });
        assert_eq!(counts[1].line_id, "74");
        assert_eq!(counts.len(), 2);
    }

    #[test]
    fn ties_sort_numerically() {
        let mut r = LineRegistry::new();
        for id in ["10", "4", "A"] {
            r.add(id, LineMode::Bus, &[]).unwrap();
        }
        let counts = count_line_mentions(&[post("1", "10 4 a")], &r, Execution::Parallel);
        let ids: Vec<_> = counts.iter().map(|c| c.line_id.as_str()).collect();
        assert_eq!(ids, ["4", "10", "A"]);
    }

    #[test]
    fn duplicate_line_rejected() {
        let mut r = registry();
        assert!(r.add("4", LineMode::Bus, &[]).is_err());
    }
}
