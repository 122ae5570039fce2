use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kappa::{cohen_kappa, AgreementResult};
use crate::error::{Error, Result};
use crate::ingest::{column_indices, read_records};

/// Labels keyed by annotator, then item.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Annotations {
    by_annotator: BTreeMap<String, BTreeMap<String, String>>,
}

impl Annotations {
    pub fn insert(&mut self, item: &str, annotator: &str, label: &str) -> bool {
        self.by_annotator
            .entry(annotator.to_string())
            .or_default()
            .insert(item.to_string(), label.to_string())
            .is_none()
    }

    pub fn annotators(&self) -> impl Iterator<Item = &str> {
        self.by_annotator.keys().map(String::as_str)
    }

    /// Items both annotators labelled, as aligned label lists.
    pub fn aligned(&self, a: &str, b: &str) -> (Vec<&str>, Vec<&str>) {
        let (Some(la), Some(lb)) = (self.by_annotator.get(a), self.by_annotator.get(b)) else {
            return (Vec::new(), Vec::new());
        };
        la.iter()
            .filter_map(|(item, x)| lb.get(item).map(|y| (x.as_str(), y.as_str())))
            .unzip()
    }
}

/// Reads `item_id,annotator_id,label` rows. An annotator labelling the same
/// item twice is an error.
pub fn load_annotations(path: impl AsRef<Path>) -> Result<Annotations> {
    let path = path.as_ref();
    let (headers, rows) = read_records(path)?;
    let [item, annotator, label] = column_indices(path, &headers, ["item_id", "annotator_id", "label"])?;
    let mut out = Annotations::default();
    for (line, rec) in rows {
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let (it, an, lb) = (field(item), field(annotator), field(label));
        if it.is_empty() || an.is_empty() || lb.is_empty() {
            return Err(Error::parse(path, line, "empty item_id, annotator_id or label"));
        }
        if !out.insert(it, an, lb) {
            return Err(Error::parse(path, line, format!("annotator `{an}` labelled item `{it}` twice")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAgreement {
    pub annotator_a: String,
    pub annotator_b: String,
    pub items: usize,
    #[serde(flatten)]
    pub agreement: AgreementResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub pairs: Vec<PairAgreement>,
    pub mean_kappa: Option<f64>,
}

/// Cohen's kappa for every annotator pair sharing at least one item.
pub fn pairwise_agreement(annotations: &Annotations) -> Result<AgreementReport> {
    let names: Vec<&str> = annotations.annotators().collect();
    if names.len() < 2 {
        return Err(Error::invalid("agreement needs at least two annotators"));
    }
    let mut pairs = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let (la, lb) = annotations.aligned(a, b);
            if la.is_empty() {
                continue;
            }
            pairs.push(PairAgreement {
                annotator_a: a.to_string(),
                annotator_b: b.to_string(),
                items: la.len(),
                agreement: cohen_kappa(&la, &lb)?,
            });
        }
    }
    if pairs.is_empty() {
        return Err(Error::invalid("no two annotators labelled a common item"));
    }
    let mean_kappa = Some(pairs.iter().map(|p| p.agreement.kappa).sum::<f64>() / pairs.len() as f64);
    Ok(AgreementReport { pairs, mean_kappa })
}
