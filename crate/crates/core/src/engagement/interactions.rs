use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::classifier::IncidentLabel;
use crate::ingest::Post;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionSummary {
    pub post_id: String,
    pub reactions_total: u64,
    pub comments_total: u64,
    /// reactions + comments
    pub interactions: u64,
    pub reaction_breakdown: BTreeMap<String, u64>,
}

pub fn interaction_summary(post: &Post) -> InteractionSummary {
    let reactions_total: u64 = post.reactions.values().sum();
    let comments_total = post.comments.len() as u64;
    InteractionSummary {
        post_id: post.id.clone(),
        reactions_total,
        comments_total,
        interactions: reactions_total + comments_total,
        reaction_breakdown: post.reactions.clone(),
    }
}

/// Reaction counts summed per incident type; every type has a row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReactionTable {
    /// Reaction kinds seen anywhere, sorted.
    pub kinds: Vec<String>,
    pub rows: BTreeMap<IncidentLabel, BTreeMap<String, u64>>,
    pub posts: BTreeMap<IncidentLabel, u64>,
}

impl ReactionTable {
    pub fn get(&self, label: IncidentLabel, kind: &str) -> u64 {
        self.rows
            .get(&label)
            .and_then(|r| r.get(kind))
            .copied()
            .unwrap_or(0)
    }

    pub fn row_total(&self, label: IncidentLabel) -> u64 {
        self.rows.get(&label).map(|r| r.values().sum()).unwrap_or(0)
    }
}

pub fn reaction_distribution<'a, I>(items: I) -> ReactionTable
where
    I: IntoIterator<Item = (IncidentLabel, &'a BTreeMap<String, u64>)>,
{
    let mut rows: BTreeMap<IncidentLabel, BTreeMap<String, u64>> =
        IncidentLabel::ALL.iter().map(|l| (*l, BTreeMap::new())).collect();
    let mut posts: BTreeMap<IncidentLabel, u64> =
        IncidentLabel::ALL.iter().map(|l| (*l, 0)).collect();
    let mut kinds = BTreeSet::new();
    for (label, reactions) in items {
        *posts.entry(label).or_default() += 1;
        let row = rows.entry(label).or_default();
        for (kind, count) in reactions {
            kinds.insert(kind.clone());
            *row.entry(kind.clone()).or_default() += count;
        }
    }
    ReactionTable {
        kinds: kinds.into_iter().collect(),
        rows,
        posts,
    }
}
