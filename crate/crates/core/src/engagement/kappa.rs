use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub kappa: f64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
}

/// Cohen's kappa for two annotators labelling the same items.
///
/// When chance agreement is total (both annotators used one and the same
/// label throughout) kappa is defined as 1.
pub fn cohen_kappa<L: Eq + Hash>(labels_a: &[L], labels_b: &[L]) -> Result<AgreementResult> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::invalid(format!(
            "annotation lists differ in length ({} vs {})",
            labels_a.len(),
            labels_b.len()
        )));
    }
    if labels_a.is_empty() {
        return Err(Error::invalid("no annotations to compare"));
    }
    let n = labels_a.len() as u64;
    let agree = labels_a.iter().zip(labels_b).filter(|(a, b)| a == b).count() as u64;
    let mut marginals: HashMap<&L, (u64, u64)> = HashMap::new();
    for l in labels_a {
        marginals.entry(l).or_default().0 += 1;
    }
    for l in labels_b {
        marginals.entry(l).or_default().1 += 1;
    }
    let chance: u64 = marginals.values().map(|(a, b)| a * b).sum();
    let po = agree as f64 / n as f64;
    let pe = chance as f64 / (n * n) as f64;
    let kappa = if chance == n * n {
        1.0
    } else {
        ((agree * n) as f64 - chance as f64) / ((n * n) as f64 - chance as f64)
    };
    Ok(AgreementResult {
        kappa,
        observed_agreement: po,
        expected_agreement: pe,
    })
}
